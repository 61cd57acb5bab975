#include "detail/grid_operators.hpp"

#include "cnsdeblur/conv_ops.hpp"

#include <cmath>

namespace cnsdeblur::detail {

Eigen::VectorXd to_vector(const ImagePlane& p)
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = p.data()[i];
    return v;
}

Eigen::MatrixXd linearized_saf(const ImagePlane& g)
{
    const int rows = g.height(), cols = g.width();
    const Eigen::MatrixXd dxx = operator_matrix(rows, cols, [](const ImagePlane& e) { return second_derivs(e).xx; });
    const Eigen::MatrixXd dyy = operator_matrix(rows, cols, [](const ImagePlane& e) { return second_derivs(e).yy; });
    const Eigen::MatrixXd dxy = operator_matrix(rows, cols, [](const ImagePlane& e) { return grad_y(grad_x(e)); });
    const Eigen::VectorXd a = to_vector(grad_x(g));
    const Eigen::VectorXd b = to_vector(grad_y(g));
    const Eigen::ArrayXd sigma = 1.0 + a.array().square() + b.array().square();
    const Eigen::ArrayXd scale = sigma.pow(-1.5);
    Eigen::MatrixXd m = (1.0 + b.array().square()).matrix().asDiagonal() * dxx;
    m += (1.0 + a.array().square()).matrix().asDiagonal() * dyy;
    m -= (2.0 * a.array() * b.array()).matrix().asDiagonal() * dxy;
    return scale.matrix().asDiagonal() * m;
}

} // namespace cnsdeblur::detail
