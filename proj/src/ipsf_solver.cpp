#include "cnsdeblur/ipsf_solver.hpp"
#include "cnsdeblur/conv_ops.hpp"
#include "cnsdeblur/error.hpp"
#include "cnsdeblur/metrics.hpp"

#include "detail/grid_operators.hpp"
#include "detail/window_gram.hpp"

#include <cmath>

namespace cnsdeblur {

namespace {

Kernel to_kernel(const Eigen::VectorXd& v, int l, int m)
{
    Kernel g(l, m);
    for (int i = 0; i < l * m; ++i)
        g.data()[static_cast<std::size_t>(i)] = v(i);
    return g;
}

double change(const Kernel& a, const Kernel& b)
{
    return mean_sq(a.as_plane() - b.as_plane());
}

} // namespace

IpsfProblem build_problem(const ImagePlane& x, const Kernel& h)
{
    return build_problem(x, h, h.rows(), h.cols());
}

IpsfProblem build_problem(const ImagePlane& x, const Kernel& h, int l, int m)
{
    if (l < 1 || m < 1 || l % 2 == 0 || m % 2 == 0)
        throw InputError("IPSF dimensions must be odd and positive");
    const int br = h.rows() / 2 + l / 2; // border rows without full support
    const int bc = h.cols() / 2 + m / 2;
    if (x.height() <= 2 * br || x.width() <= 2 * bc)
        throw InputError("image too small for the kernel supports");
    IpsfProblem p;
    p.x = x;
    p.y = conv_same(x, h, BoundaryMode::NeumannReplicate);
    p.l = l;
    p.m = m;
    const detail::WindowRange w{l, m, h.rows() / 2, h.cols() / 2, x.height() - 2 * br, x.width() - 2 * bc};
    p.r_yy = detail::window_gram(p.y, w);
    p.r_yx = detail::window_cross(p.y, w, x, br, bc);
    return p;
}

Kernel solve_ls(const IpsfProblem& p, double cutoff)
{
    return to_kernel(detail::pinv_solve(p.r_yy, p.r_yx, cutoff), p.l, p.m);
}

Eigen::MatrixXd delta_r(const Kernel& g)
{
    return detail::linearized_saf(g.as_plane());
}

std::vector<double> IpsfConfig::log_grid(double first, double last, int count)
{
    std::vector<double> out;
    if (count == 1)
        return {first};
    for (int i = 0; i < count; ++i)
        out.push_back(first * std::pow(last / first, static_cast<double>(i) / (count - 1)));
    return out;
}

std::string to_string(IpsfStop s)
{
    switch (s) {
    case IpsfStop::Converged: return "converged";
    case IpsfStop::IterCap: return "iter_cap";
    case IpsfStop::Fallback: return "fallback";
    }
    return "unknown";
}

Kernel ipsf_step(const IpsfProblem& p, const Kernel& g, double lambda, double cutoff)
{
    const Eigen::MatrixXd a = p.r_yy - lambda * delta_r(g);
    return to_kernel(detail::pinv_solve(a, p.r_yx, cutoff), p.l, p.m);
}

IpsfSolveReport optimize_ipsf(const IpsfProblem& p, const IpsfConfig& cfg)
{
    IpsfSolveReport rep;
    rep.g_ls = solve_ls(p, cfg.svd_cutoff);
    for (double lambda : cfg.lambdas) {
        Kernel prev(p.l, p.m); // g^(-1) = 0
        Kernel g = rep.g_ls;
        std::vector<double> trace;
        bool ok = true, converged = false;
        for (int k = 0; k < cfg.max_iters; ++k) {
            const Kernel next = ipsf_step(p, g, lambda, cfg.svd_cutoff);
            const double d = change(next, g);
            if (!std::isfinite(d) || (k < cfg.q && d * cfg.theta > change(g, prev))) {
                ok = false;
                break;
            }
            trace.push_back(d);
            prev = g;
            g = next;
            if (d < cfg.eps) {
                converged = true;
                break;
            }
        }
        if (!ok)
            continue;
        rep.g = g;
        rep.lambda_used = lambda;
        rep.iterations = static_cast<int>(trace.size());
        rep.residual_trace = std::move(trace);
        rep.stop = converged ? IpsfStop::Converged : IpsfStop::IterCap;
        return rep;
    }
    rep.g = rep.g_ls;
    rep.fallback_ls = true;
    rep.stop = IpsfStop::Fallback;
    return rep;
}

} // namespace cnsdeblur
