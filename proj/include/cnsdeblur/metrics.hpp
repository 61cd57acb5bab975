#pragma once

#include "cnsdeblur/image.hpp"

#include <optional>

namespace cnsdeblur {

double mean_abs(const ImagePlane& a);
double mean_sq(const ImagePlane& a);
double max_abs(const ImagePlane& a);
double inner(const ImagePlane& a, const ImagePlane& b);

//! Peak-1 PSNR in dB; +infinity for identical planes.
double psnr(const ImagePlane& reference, const ImagePlane& test);
//! Pools the squared error of all channels.
double psnr(const MultiChannelImage& reference, const MultiChannelImage& test);

//! Zero-mean normalized cross-correlation of two equally sized kernels.
//! Kernels of different size are compared after zero-padding the smaller one about its center.
double ncc(const Kernel& a, const Kernel& b);

struct QualityReport {
    double psnr = 0.0;
    double mean_abs_diff = 0.0;
    double max_abs_diff = 0.0;
    std::optional<double> kernel_ncc;
    double psnr_input = 0.0;
    double improvement_db = 0.0;
};

} // namespace cnsdeblur
