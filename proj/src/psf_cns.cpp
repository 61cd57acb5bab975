#include "cnsdeblur/psf_cns.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace cnsdeblur {

namespace {

Kernel reshape(const Eigen::VectorXd& v, int l, int m)
{
    Kernel h(l, m);
    for (int i = 0; i < l * m; ++i)
        h.data()[static_cast<std::size_t>(i)] = v(i);
    return h;
}

Kernel oriented(const Eigen::VectorXd& v, int l, int m)
{
    Kernel h = reshape(v, l, m);
    if (h.sum() < 0.0)
        for (double& x : h.data())
            x = -x;
    return h;
}

} // namespace

AmbiguousNullSpace::AmbiguousNullSpace(Kernel first, Kernel second)
    : NumericalError("PSF null space is not one-dimensional"), first_(std::move(first)), second_(std::move(second))
{
}

BlockArOperator build_block_operator(const ArModel& model, int l, int m)
{
    const int p = model.p(), q = model.q();
    if (l < 1 || m < 1 || l % 2 == 0 || m % 2 == 0)
        throw InputError("PSF dimensions must be odd and positive");
    if (l >= p || m >= q)
        throw InputError("PSF size " + std::to_string(l) + "x" + std::to_string(m)
                         + " must be smaller than the AR order " + std::to_string(p) + "x" + std::to_string(q));
    const int width = q + m - 1;
    BlockArOperator op{model, l, m, Eigen::MatrixXd::Zero(l * m, (p + l - 1) * width)};
    for (int r = 0; r < l; ++r)
        for (int c = 0; c < m; ++c)
            for (int i = 0; i < p; ++i)
                for (int k = 0; k < q; ++k)
                    op.matrix(r * m + c, (r + i) * width + (c + k)) = model.coeffs(i, k);
    return op;
}

CnsResult cns_estimate(const BlockArOperator& op)
{
    if (op.l * op.m < 2)
        throw InputError("PSF must have at least two elements");
    const Eigen::MatrixXd aat = op.matrix * op.matrix.transpose();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(aat);
    if (eig.info() != Eigen::Success)
        throw NumericalError("eigen-decomposition of A A^T failed");
    const Eigen::VectorXd& ev = eig.eigenvalues();
    auto sv = [&](Eigen::Index i) { return std::sqrt(std::max(0.0, ev(i))); };

    CnsResult res;
    res.sigma_min = sv(0);
    res.sigma_second = sv(1);
    res.sigma_max = sv(ev.size() - 1);
    if (res.sigma_second - res.sigma_min <= 1e-10 * res.sigma_max)
        throw AmbiguousNullSpace(oriented(eig.eigenvectors().col(0), op.l, op.m),
                                 oriented(eig.eigenvectors().col(1), op.l, op.m));
    const Kernel h = oriented(eig.eigenvectors().col(0), op.l, op.m);
    if (std::abs(h.sum()) < 1e-12)
        throw NumericalError("PSF null vector has zero sum and cannot be normalized");
    res.psf = h.normalized();
    return res;
}

CnsResult estimate_psf(const ArModel& model, int l, int m)
{
    if (model.center_only()) {
        build_block_operator(model, l, m); // size checks only
        if (l * m < 2)
            throw InputError("PSF must have at least two elements");
        CnsResult res;
        res.psf = Kernel::delta(l, m);
        res.sigma_min = res.sigma_second = res.sigma_max = 1.0; // A A^T = I
        return res;
    }
    return cns_estimate(build_block_operator(model, l, m));
}

PsfShape psf_shape_report(const Kernel& h)
{
    PsfShape s;
    double total = 0.0, border = 0.0, mr = 0.0, mc = 0.0;
    for (int r = 0; r < h.rows(); ++r)
        for (int c = 0; c < h.cols(); ++c) {
            const double w = std::abs(h(r, c));
            total += w;
            mr += w * (r - h.center_row());
            mc += w * (c - h.center_col());
            if (r == 0 || c == 0 || r == h.rows() - 1 || c == h.cols() - 1)
                border += w;
        }
    if (total == 0.0)
        return s;
    s.com_row = mr / total;
    s.com_col = mc / total;
    s.boundary_mass = border / total;
    double srr = 0.0, scc = 0.0, src = 0.0;
    for (int r = 0; r < h.rows(); ++r)
        for (int c = 0; c < h.cols(); ++c) {
            const double w = std::abs(h(r, c)) / total;
            const double dr = r - h.center_row() - s.com_row;
            const double dc = c - h.center_col() - s.com_col;
            srr += w * dr * dr;
            scc += w * dc * dc;
            src += w * dr * dc;
        }
    const double mean = 0.5 * (srr + scc);
    const double spread = std::sqrt(0.25 * (srr - scc) * (srr - scc) + src * src);
    const double major = mean + spread, minor = std::max(0.0, mean - spread);
    if (major > 0.0)
        s.anisotropy = minor > 0.0 ? major / minor : std::numeric_limits<double>::infinity();
    return s;
}

} // namespace cnsdeblur
