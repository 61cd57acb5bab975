#pragma once

#include "cnsdeblur/image.hpp"

#include <filesystem>
#include <iosfwd>

namespace cnsdeblur {

//! PNG, PGM (P5) or PPM (P6); 8 or 16 bit, grey or RGB. Values scaled to [0,1].
MultiChannelImage load_image(const std::filesystem::path& path);
//! Clamps to [0,1], rounds half-up to 8 bit. Format picked by extension.
void save_image(const MultiChannelImage& img, const std::filesystem::path& path);

//! "L M" header then L rows of M values, 17 significant digits.
void write_kernel(std::ostream& os, const Kernel& k);
Kernel read_kernel(std::istream& is);
void save_kernel(const Kernel& k, const std::filesystem::path& path);
Kernel load_kernel(const std::filesystem::path& path);

} // namespace cnsdeblur
