#pragma once

#include "cnsdeblur/image.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace cnsdeblur {

//! Normal equations for an inverse kernel g with x ~ conv_same(y, g), y = conv_same(x, h).
struct IpsfProblem {
    ImagePlane y;
    ImagePlane x;
    int l = 0;
    int m = 0;
    Eigen::MatrixXd r_yy; //!< sums over the valid interior only
    Eigen::VectorXd r_yx;
};

//! IPSF support defaults to the PSF support.
IpsfProblem build_problem(const ImagePlane& x, const Kernel& h);
IpsfProblem build_problem(const ImagePlane& x, const Kernel& h, int l, int m);

//! Minimum-norm least squares, singular values below cutoff * sigma_max dropped.
Kernel solve_ls(const IpsfProblem& p, double cutoff = 1e-10);

//! Linearized surface-area operator on the kernel grid, (L*M) x (L*M).
Eigen::MatrixXd delta_r(const Kernel& g);

struct IpsfConfig {
    std::vector<double> lambdas = log_grid(1e-2, 1e-4, 9); //!< tried in order
    int q = 3;
    double theta = 2.0;
    double eps = 1e-8;
    int max_iters = 10;
    double svd_cutoff = 1e-10;

    static std::vector<double> log_grid(double first, double last, int count);
};

enum class IpsfStop { Converged, IterCap, Fallback };

struct IpsfSolveReport {
    Kernel g;
    Kernel g_ls;
    double lambda_used = 0.0;
    int iterations = 0;
    std::vector<double> residual_trace; //!< mean square change of g per step
    bool fallback_ls = false;
    IpsfStop stop = IpsfStop::Fallback;
};

std::string to_string(IpsfStop s);

//! Regularized fixed-point iteration g <- (R_yy - lambda dR(g))^+ r_yx started from the LS
//! solution; the first lambda whose first q steps contract by theta is kept.
IpsfSolveReport optimize_ipsf(const IpsfProblem& p, const IpsfConfig& cfg = {});

//! One step of the iteration above.
Kernel ipsf_step(const IpsfProblem& p, const Kernel& g, double lambda, double cutoff = 1e-10);

} // namespace cnsdeblur
