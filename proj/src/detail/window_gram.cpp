#include "detail/window_gram.hpp"

#include <algorithm>
#include <vector>

namespace cnsdeblur::detail {

Eigen::MatrixXd window_gram(const ImagePlane& src, const WindowRange& w)
{
    const int n = w.wr * w.wc;
    Eigen::MatrixXd g(n, n);
    // Each entry only depends on the lag between the two window offsets, so one
    // product image and its prefix sums serve every entry sharing that lag.
    const int ur0 = w.r0, ur1 = w.r0 + w.wr - 1 + w.nr; // row span of window pixels
    const int uc0 = w.c0, uc1 = w.c0 + w.wc - 1 + w.nc;
    std::vector<double> prefix;
    for (int di = -(w.wr - 1); di < w.wr; ++di) {
        for (int dk = -(w.wc - 1); dk < w.wc; ++dk) {
            // u = first-factor pixel, second factor at u + (di, dk)
            const int a0 = ur0 + std::max(0, -di), a1 = ur1 - std::max(0, di);
            const int b0 = uc0 + std::max(0, -dk), b1 = uc1 - std::max(0, dk);
            const int ph = a1 - a0, pw = b1 - b0;
            prefix.assign(static_cast<std::size_t>(ph + 1) * (pw + 1), 0.0);
            auto at = [&](int r, int c) -> double& { return prefix[static_cast<std::size_t>(r) * (pw + 1) + c]; };
            for (int r = 0; r < ph; ++r) {
                double run = 0.0;
                const double* p = &src(a0 + r, b0);
                const double* q = &src(a0 + r + di, b0 + dk);
                for (int c = 0; c < pw; ++c) {
                    run += p[c] * q[c];
                    at(r + 1, c + 1) = at(r, c + 1) + run;
                }
            }
            for (int i = std::max(0, -di); i < w.wr - std::max(0, di); ++i) {
                for (int k = std::max(0, -dk); k < w.wc - std::max(0, dk); ++k) {
                    const int r = w.r0 + i - a0, c = w.c0 + k - b0;
                    const double s = at(r + w.nr, c + w.nc) - at(r, c + w.nc) - at(r + w.nr, c) + at(r, c);
                    g(i * w.wc + k, (i + di) * w.wc + (k + dk)) = s;
                }
            }
        }
    }
    return g;
}

Eigen::VectorXd window_cross(const ImagePlane& src, const WindowRange& w, const ImagePlane& tgt, int t0, int u0)
{
    Eigen::VectorXd v(w.wr * w.wc);
    for (int i = 0; i < w.wr; ++i)
        for (int k = 0; k < w.wc; ++k) {
            double s = 0.0;
            for (int n = 0; n < w.nr; ++n) {
                const double* p = &src(w.r0 + n + i, w.c0 + k);
                const double* q = &tgt(t0 + n, u0);
                for (int m = 0; m < w.nc; ++m)
                    s += p[m] * q[m];
            }
            v(i * w.wc + k) = s;
        }
    return v;
}

Eigen::VectorXd pinv_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double cutoff)
{
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(cutoff);
    return svd.solve(b);
}

} // namespace cnsdeblur::detail
