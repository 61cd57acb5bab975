#pragma once

#include "cnsdeblur/image.hpp"

namespace cnsdeblur {

enum class BoundaryMode { ZeroPad, NeumannReplicate };

struct Regularizer {
    enum class Kind { SAF, TV };
    Kind kind = Kind::SAF;
    double beta = 0.0; //!< TV smoothing, ignored for SAF

    static Regularizer saf() { return {Kind::SAF, 0.0}; }
    static Regularizer tv(double beta) { return {Kind::TV, beta}; }
};

//! out(r,c) = sum_{i,j} img(r + i - cr, c + j - cc) * k(i,j), same size as img.
ImagePlane conv_same(const ImagePlane& img, const Kernel& k, BoundaryMode mode);
//! Flipped-kernel counterpart; exact adjoint of conv_same under ZeroPad.
ImagePlane correlate_adjoint(const ImagePlane& img, const Kernel& k, BoundaryMode mode);
//! Kernel c with conv_same(conv_same(s, a), b) == conv_same(s, c) away from the border.
Kernel compose_kernels(const Kernel& a, const Kernel& b);

//! Central differences inside, one-sided at the edges. x runs along columns.
ImagePlane grad_x(const ImagePlane& img);
ImagePlane grad_y(const ImagePlane& img);
//! Transposes of grad_x / grad_y as linear maps.
ImagePlane grad_x_adjoint(const ImagePlane& img);
ImagePlane grad_y_adjoint(const ImagePlane& img);

struct SecondDerivatives {
    ImagePlane xx, yy, xy;
};
//! 3-point second differences with replicated edges; xy = grad_y(grad_x(img)).
SecondDerivatives second_derivs(const ImagePlane& img);

//! 1 + Ix^2 + Iy^2.
ImagePlane metric_det(const ImagePlane& img);

//! Mean-curvature operator div(grad I / sqrt(1 + |grad I|^2)) in conservative form:
//! the exact negative gradient of sum sqrt(1 + Ix^2 + Iy^2).
ImagePlane saf_operator(const ImagePlane& img);
//! The same operator evaluated pointwise from first and second differences:
//! ((1+Iy^2) Ixx + (1+Ix^2) Iyy - 2 Ix Iy Ixy) / (1 + Ix^2 + Iy^2)^{3/2}.
//! This is the form the iterative schemas use.
ImagePlane saf_pointwise(const ImagePlane& img);
//! div(grad I / sqrt(Ix^2 + Iy^2 + beta)); zero where the denominator vanishes.
ImagePlane tv_operator(const ImagePlane& img, double beta);

//! saf_pointwise or tv_operator.
ImagePlane apply_regularizer(const ImagePlane& img, const Regularizer& reg);

} // namespace cnsdeblur
