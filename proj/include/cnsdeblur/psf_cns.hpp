#pragma once

#include "cnsdeblur/ar_model.hpp"
#include "cnsdeblur/error.hpp"

#include <Eigen/Dense>

#include <optional>

namespace cnsdeblur {

//! L*M x (P+L-1)(Q+M-1) operator; row (l,m) carries the stencil shifted by (l,m).
//! h^T A is then the full 2-D convolution of h with the stencil.
struct BlockArOperator {
    ArModel source;
    int l = 0;
    int m = 0;
    Eigen::MatrixXd matrix;
};

BlockArOperator build_block_operator(const ArModel& model, int l, int m);

struct CnsResult {
    Kernel psf;
    double sigma_min = 0.0;    //!< smallest singular value of A
    double sigma_second = 0.0; //!< next one up
    double sigma_max = 0.0;
};

//! Raised when the two smallest singular values coincide within 1e-10 sigma_max.
class AmbiguousNullSpace : public NumericalError {
public:
    AmbiguousNullSpace(Kernel first, Kernel second);
    const Kernel& first() const { return first_; }
    const Kernel& second() const { return second_; }

private:
    Kernel first_, second_;
};

//! Least singular vector of A, reshaped to L x M, sign fixed to a positive sum, sum-normalized.
CnsResult cns_estimate(const BlockArOperator& op);

//! CNS PSF for a fitted model; a center-only stencil carries no blur information and yields a delta.
CnsResult estimate_psf(const ArModel& model, int l, int m);

struct PsfShape {
    double com_row = 0.0; //!< center-of-mass offset from the kernel center
    double com_col = 0.0;
    std::optional<double> anisotropy; //!< major/minor second moment; empty for 0/0
    double boundary_mass = 0.0;       //!< fraction of |h| on the outer ring
};

PsfShape psf_shape_report(const Kernel& h);

} // namespace cnsdeblur
