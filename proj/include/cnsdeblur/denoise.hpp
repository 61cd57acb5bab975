#pragma once

#include "cnsdeblur/image.hpp"

#include <utility>
#include <vector>

namespace cnsdeblur {

struct CascadeOrders {
    int p = 17, q = 17;
    int l = 7, m = 7;
    double svd_cutoff = 1e-4; //!< pseudo-inverse cutoff of the prior inverse filter
};

struct CascadeStage {
    Kernel psf;
    Kernel ipsf_prior;
    ImagePlane x_out;
    bool patch_undersized = false;
};

//! AR fit, CNS PSF and plain least-squares inverse kernel, applied to x.
CascadeStage prior_filter(const ImagePlane& x, const CascadeOrders& orders = {});

//! Repeated prior_filter, each stage re-estimated on the previous output.
std::pair<ImagePlane, std::vector<CascadeStage>> cascade(const ImagePlane& x, int stages = 2,
                                                         const CascadeOrders& orders = {});

} // namespace cnsdeblur
