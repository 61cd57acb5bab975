#pragma once

#include "cnsdeblur/image.hpp"

#include <Eigen/Dense>

namespace cnsdeblur::detail {

// Dense matrix of a linear plane operator on a rows x cols grid, built column by
// column from unit basis planes (row-major vectorization).
template <class Op>
Eigen::MatrixXd operator_matrix(int rows, int cols, Op op)
{
    const int n = rows * cols;
    Eigen::MatrixXd m(n, n);
    ImagePlane e(cols, rows);
    for (int j = 0; j < n; ++j) {
        e.data()[static_cast<std::size_t>(j)] = 1.0;
        const ImagePlane col = op(e);
        for (int i = 0; i < n; ++i)
            m(i, j) = col.data()[static_cast<std::size_t>(i)];
        e.data()[static_cast<std::size_t>(j)] = 0.0;
    }
    return m;
}

// Linearized surface-area operator about g, assembled from difference matrices:
// diag(sigma^-3/2) (diag(1+b^2) Dxx + diag(1+a^2) Dyy - 2 diag(a) diag(b) Dxy), a = Dx g, b = Dy g.
Eigen::MatrixXd linearized_saf(const ImagePlane& g);

Eigen::VectorXd to_vector(const ImagePlane& p);

} // namespace cnsdeblur::detail
