#pragma once

#include "cnsdeblur/image.hpp"

#include <cstdint>
#include <string>

namespace cnsdeblur {

struct PsfSpec {
    enum class Kind { Gaussian, MotionH, MotionDiag };
    Kind kind = Kind::Gaussian;
    double sigma = 1.5;     //!< Gaussian
    double length = 5.0;    //!< motion blur extent in pixels
    double angle_deg = 45.0; //!< MotionDiag, counter-clockwise from the x axis

    static PsfSpec gaussian(double sigma) { return {Kind::Gaussian, sigma, 0.0, 0.0}; }
    static PsfSpec motion_h(double length) { return {Kind::MotionH, 0.0, length, 0.0}; }
    static PsfSpec motion_diag(double length, double angle_deg) { return {Kind::MotionDiag, 0.0, length, angle_deg}; }
    //! "gaussian:1.5", "motion_h:5", "motion_diag:5:30".
    static PsfSpec parse(const std::string& text);
};

struct NoiseSpec {
    enum class Kind { None, Gaussian, Impulsive };
    Kind kind = Kind::None;
    double level = 0.0; //!< standard deviation, or fraction of corrupted pixels

    //! "none", "gaussian:0.01", "impulsive:0.01".
    static NoiseSpec parse(const std::string& text);
};

//! Sampled, sum-normalized analytic kernel.
Kernel make_psf(const PsfSpec& spec, int l, int m);

struct SyntheticFixture {
    MultiChannelImage clean;
    Kernel true_psf;
    MultiChannelImage blurred;
    NoiseSpec noise;
    std::uint64_t seed = 0;
};

//! Blur with replicated borders, then add seeded noise (impulses are 0 or 1 with equal odds).
SyntheticFixture make_fixture(const MultiChannelImage& clean, const PsfSpec& psf, int l, int m,
                              const NoiseSpec& noise = {}, std::uint64_t seed = 0);

//! Piecewise-constant test scenes in [0,1]: "mosaic" (rectangles), "disks", "shards" (triangles).
ImagePlane make_texture(const std::string& kind, int size, std::uint64_t seed);

} // namespace cnsdeblur
