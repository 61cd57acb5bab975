#pragma once

#include "cnsdeblur/image.hpp"

#include <Eigen/Dense>

#include <vector>

namespace cnsdeblur {

//! P x Q autoregressive stencil, center coefficient pinned to 1.
struct ArModel {
    Kernel coeffs;
    bool degenerate = false; //!< rank-deficient fit or information-free patch

    int p() const { return coeffs.rows(); }
    int q() const { return coeffs.cols(); }
    bool center_only() const { return coeffs.off_center_mass() == 0.0; }
};

//! Lazy view of the matrix whose rows are the vectorized P x Q windows of a plane.
class ExtendedDataMatrix {
public:
    ExtendedDataMatrix(ImagePlane source, int p, int q);

    int p() const { return p_; }
    int q() const { return q_; }
    long rows() const { return static_cast<long>(source_.height() - p_ + 1) * (source_.width() - q_ + 1); }
    int cols() const { return p_ * q_; }
    const ImagePlane& source() const { return source_; }

    //! Row for shift (n, m) at index n * (N_x - Q + 1) + m.
    std::vector<double> row(long index) const;
    Eigen::MatrixXd materialize() const;
    //! Transpose(X) * X without forming X.
    Eigen::MatrixXd gram() const;

private:
    ImagePlane source_;
    int p_, q_;
};

struct PatchSelection {
    ImagePlane patch;
    bool undersized = false; //!< image smaller than 2PQ in some direction; whole extent used
};

//! Centered square of side max(2PQ, 4 max(P,Q)), clipped to the image.
PatchSelection select_patch(const ImagePlane& img, int p, int q);

ExtendedDataMatrix build_extended(const ImagePlane& img, int p, int q);

struct ArRegularization {
    bool enabled = false;
    double lambda = 1e-3;
    int q_steps = 3;
    double theta = 1.0;
    double eps = 1e-8;
    int max_iters = 50;
};

struct ArFit {
    ArModel model;
    bool regularized = false; //!< regularized iteration accepted
    int iterations = 0;
    double residual_msq = 0.0; //!< mean square of the stencil response over the patch
};

//! Least-squares fit of the stencil on img (callers pass the selected patch).
ArFit estimate_ar(const ImagePlane& img, int p, int q, const ArRegularization& reg = {});

//! Stencil response sum_{i,k} a(i,k) img(n+i, m+k) over all valid shifts.
ImagePlane ar_residual(const ImagePlane& img, const Kernel& coeffs);

} // namespace cnsdeblur
