#include "cnsdeblur/ar_model.hpp"
#include "cnsdeblur/error.hpp"
#include "cnsdeblur/metrics.hpp"

#include "detail/grid_operators.hpp"
#include "detail/window_gram.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cnsdeblur {

namespace {

void check_orders(const ImagePlane& img, int p, int q)
{
    if (p < 1 || q < 1 || p % 2 == 0 || q % 2 == 0)
        throw InputError("AR orders must be odd and positive");
    if (p > img.height() || q > img.width())
        throw InputError("AR order " + std::to_string(p) + "x" + std::to_string(q) + " exceeds the "
                         + std::to_string(img.height()) + "x" + std::to_string(img.width()) + " patch");
}

Kernel assemble(int p, int q, const Eigen::VectorXd& free, int center)
{
    Kernel a(p, q);
    for (int i = 0, j = 0; i < p * q; ++i)
        a.data()[static_cast<std::size_t>(i)] = i == center ? 1.0 : free(j++);
    return a;
}

Eigen::VectorXd drop(const Eigen::VectorXd& v, int center)
{
    Eigen::VectorXd out(v.size() - 1);
    out << v.head(center), v.tail(v.size() - center - 1);
    return out;
}

// Removes row and column `center`.
Eigen::MatrixXd drop(const Eigen::MatrixXd& m, int center)
{
    const Eigen::Index n = m.rows(), t = n - center - 1;
    Eigen::MatrixXd out(n - 1, n - 1);
    out.topLeftCorner(center, center) = m.topLeftCorner(center, center);
    out.topRightCorner(center, t) = m.topRightCorner(center, t);
    out.bottomLeftCorner(t, center) = m.bottomLeftCorner(t, center);
    out.bottomRightCorner(t, t) = m.bottomRightCorner(t, t);
    return out;
}

} // namespace

ExtendedDataMatrix::ExtendedDataMatrix(ImagePlane source, int p, int q)
    : source_(std::move(source)), p_(p), q_(q)
{
    check_orders(source_, p, q);
}

std::vector<double> ExtendedDataMatrix::row(long index) const
{
    const int shifts_x = source_.width() - q_ + 1;
    const int n = static_cast<int>(index / shifts_x);
    const int m = static_cast<int>(index % shifts_x);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(cols()));
    for (int i = 0; i < p_; ++i)
        for (int k = 0; k < q_; ++k)
            out.push_back(source_(n + i, m + k));
    return out;
}

Eigen::MatrixXd ExtendedDataMatrix::materialize() const
{
    Eigen::MatrixXd x(rows(), cols());
    for (long r = 0; r < rows(); ++r) {
        const auto v = row(r);
        for (int c = 0; c < cols(); ++c)
            x(r, c) = v[static_cast<std::size_t>(c)];
    }
    return x;
}

Eigen::MatrixXd ExtendedDataMatrix::gram() const
{
    return detail::window_gram(source_, {p_, q_, 0, 0, source_.height() - p_ + 1, source_.width() - q_ + 1});
}

PatchSelection select_patch(const ImagePlane& img, int p, int q)
{
    if (img.height() < p || img.width() < q)
        throw InputError("image smaller than the AR order");
    const int side = std::max(2 * p * q, 4 * std::max(p, q));
    PatchSelection sel;
    sel.undersized = img.height() < 2 * p * q || img.width() < 2 * p * q;
    const int h = std::min(side, img.height());
    const int w = std::min(side, img.width());
    sel.patch = img.crop((img.height() - h) / 2, (img.width() - w) / 2, h, w);
    return sel;
}

ExtendedDataMatrix build_extended(const ImagePlane& img, int p, int q)
{
    return ExtendedDataMatrix(img, p, q);
}

ImagePlane ar_residual(const ImagePlane& img, const Kernel& coeffs)
{
    check_orders(img, coeffs.rows(), coeffs.cols());
    ImagePlane out(img.width() - coeffs.cols() + 1, img.height() - coeffs.rows() + 1);
    for (int n = 0; n < out.height(); ++n)
        for (int i = 0; i < coeffs.rows(); ++i)
            for (int k = 0; k < coeffs.cols(); ++k) {
                const double a = coeffs(i, k);
                const double* src = &img(n + i, k);
                double* o = &out(n, 0);
                for (int m = 0; m < out.width(); ++m)
                    o[m] += a * src[m];
            }
    return out;
}

ArFit estimate_ar(const ImagePlane& img, int p, int q, const ArRegularization& reg)
{
    const ExtendedDataMatrix x(img, p, q);
    const int n = p * q;
    if (x.rows() < n)
        throw InputError("AR system is underdetermined: " + std::to_string(x.rows()) + " windows for "
                         + std::to_string(n) + " coefficients");
    const int center = (p / 2) * q + q / 2;

    ArFit fit;
    const auto [lo, hi] = std::minmax_element(img.data().begin(), img.data().end());
    if (n == 1 || *lo == *hi) {
        fit.model.coeffs = Kernel::delta(p, q);
        fit.model.degenerate = n > 1;
        fit.residual_msq = mean_sq(ar_residual(img, fit.model.coeffs));
        return fit;
    }

    const Eigen::MatrixXd g = x.gram();
    const Eigen::MatrixXd g_oo = drop(g, center);
    const Eigen::VectorXd rhs = -drop(Eigen::VectorXd(g.col(center)), center);

    Eigen::VectorXd free;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(g_oo);
    if (ldlt.info() == Eigen::Success && ldlt.rcond() > 1e-12) {
        free = ldlt.solve(rhs);
    } else {
        free = detail::pinv_solve(g_oo, rhs, 1e-10);
        fit.model.degenerate = true;
    }
    fit.model.coeffs = assemble(p, q, free, center);

    if (reg.enabled && reg.lambda > 0.0) {
        Kernel a_prev(p, q);
        Kernel a = fit.model.coeffs;
        double d_prev = mean_sq((a.as_plane() - a_prev.as_plane()));
        bool accepted = true;
        for (int k = 0; k < reg.max_iters; ++k) {
            const Eigen::MatrixXd m = g - reg.lambda * detail::linearized_saf(a.as_plane());
            const Eigen::VectorXd r = -drop(Eigen::VectorXd(m.col(center)), center);
            const Kernel next = assemble(p, q, detail::pinv_solve(drop(m, center), r, 1e-10), center);
            const double d = mean_sq(next.as_plane() - a.as_plane());
            if (!std::isfinite(d) || (k < reg.q_steps && d * reg.theta > d_prev)) {
                accepted = false;
                break;
            }
            a = next;
            d_prev = d;
            fit.iterations = k + 1;
            if (d < reg.eps)
                break;
        }
        if (accepted) {
            fit.model.coeffs = a;
            fit.regularized = true;
        } else {
            fit.iterations = 0;
        }
    }
    fit.residual_msq = mean_sq(ar_residual(img, fit.model.coeffs));
    return fit;
}

} // namespace cnsdeblur
