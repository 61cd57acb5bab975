#pragma once

#include "cnsdeblur/image.hpp"

#include <Eigen/Dense>

namespace cnsdeblur::detail {

// Windows of size wr x wc whose top-left corner runs over rows [r0, r0+nr), cols [c0, c0+nc).
struct WindowRange {
    int wr, wc;
    int r0, c0;
    int nr, nc;
};

// G[(i,k),(i',k')] = sum over window positions of src(.+i, .+k) * src(.+i', .+k').
Eigen::MatrixXd window_gram(const ImagePlane& src, const WindowRange& w);

// v[(i,k)] = sum over window positions (n,m) of src(r0+n+i, c0+m+k) * tgt(t0+n, u0+m).
Eigen::VectorXd window_cross(const ImagePlane& src, const WindowRange& w, const ImagePlane& tgt, int t0, int u0);

// Pseudo-inverse solve with singular values below cutoff * sigma_max discarded.
Eigen::VectorXd pinv_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double cutoff);

} // namespace cnsdeblur::detail
