#pragma once

#include "cnsdeblur/conv_ops.hpp"
#include "cnsdeblur/image.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cnsdeblur {

enum class Schema { LR, LRME, BVDR, CS };

enum class StopReason { EpsReached, MonotonicityViolated, IterCap, DtBoundViolated, NonFinite };

std::string to_string(Schema s);
std::string to_string(StopReason s);
Schema parse_schema(const std::string& name);

struct SchemaConfig {
    Schema schema = Schema::CS;
    double dt = 1.0;
    double lambda0 = 0.0;       //!< LRME with dynamic_lambda off
    bool dynamic_lambda = true; //!< LRME only; BVDR always uses the dynamic rule
    Regularizer regularizer = Regularizer::saf();
    int q = 1;           //!< steps exempt from the monotonicity check
    bool transition_until_lambda_peak = true; //!< BVDR/LRME: also exempt steps while lambda_k still rises
    double theta = 1.0;
    double eps = 1e-8;
    int max_iters = 10;
    double zero_guard = 1e-6;
    double lambda_cap = 1e3;
    bool enforce_dt_bounds = false; //!< stop when dt leaves [lower bound, upper metric <= dt_upper]
    double dt_upper = 0.01;

    //! Per-schema defaults: caps LR 100, LRME/BVDR/CS 10; BVDR dt 0.1 with a 5-step window.
    static SchemaConfig defaults(Schema s);
    void validate() const;
};

struct TraceRecord {
    int k = 0;
    double residual_msq = 0.0; //!< mean((S^(k+1) - S^(k))^2)
    double lambda = 0.0;       //!< lambda_k; mean of the field for CS
    double theta = 0.0;        //!< residual_k / residual_{k-1}
    double dt_lower = 0.0;     //!< mean|dS| / mean|L(S^(k))|
    double dt_upper_metric = 0.0; //!< dt * max|dS|
};

struct ConvergenceTrace {
    std::vector<TraceRecord> records;
    StopReason stop = StopReason::IterCap;
    bool lambda_degenerate = false;
};

struct StepExtras {
    bool in_transition = false; //!< exempt from the monotonicity check
    double lambda = 0.0;
    double dt_lower = 0.0;
    double dt_upper_metric = 0.0;
};

//! Appends the record for S^(k) -> S^(k+1) and returns a stop reason, if any. Precedence:
//! non-finite, eps, monotonicity (after q steps), dt bounds (when enforced), cap.
std::optional<StopReason> monitor_step(ConvergenceTrace& trace, const ImagePlane& s_next, const ImagePlane& s_cur,
                                       const ImagePlane& s_prev, const SchemaConfig& cfg,
                                       const StepExtras& extras = {});

//! Same decision from precomputed residuals.
std::optional<StopReason> decide(int k, double residual, double prev_residual, const SchemaConfig& cfg,
                                 const StepExtras& extras = {});

ImagePlane lr_step(const ImagePlane& s, const ImagePlane& x, const Kernel& h, double guard);
Kernel lr_psf_update(const ImagePlane& s, const ImagePlane& x, const Kernel& h, double guard);
ImagePlane lrme_step(const ImagePlane& s, const ImagePlane& x, const Kernel& h, double lambda,
                     const Regularizer& reg, double dt);

struct LambdaState {
    double lambda_prev = 0.0;
    ImagePlane s_prev;
    ImagePlane reg_prev; //!< L(s_prev)
};

struct LambdaUpdate {
    double lambda = 0.0;
    bool degenerate = false;
    LambdaState state;
};

//! State for k = 0: S^(-1) = X.
LambdaState initial_lambda_state(const ImagePlane& x, const Regularizer& reg);

//! Dynamic regularization weight for step k, clamped to [0, cap].
LambdaUpdate dynamic_lambda(const LambdaState& state, const ImagePlane& s_cur, const ImagePlane& x, const Kernel& h,
                            const Kernel& g, const Regularizer& reg, double dt, int k, double cap = 1e3);

//! (X - H*S)^2 / (2 (1 + Sx^2 + Sy^2)).
ImagePlane cs_lambda_field(const ImagePlane& s, const ImagePlane& x, const Kernel& h);

struct SchemaResult {
    ImagePlane s;
    Kernel h; //!< PSF after the run (changes only for LR with PSF updates)
    ConvergenceTrace trace;
};

SchemaResult lr_run(const ImagePlane& x, const Kernel& h, const SchemaConfig& cfg, bool update_psf = false);
SchemaResult lrme_run(const ImagePlane& x, const Kernel& h, const Kernel& g, const SchemaConfig& cfg);
SchemaResult bvdr_run(const ImagePlane& x, const Kernel& h, const Kernel& g, const SchemaConfig& cfg);
SchemaResult cs_run(const ImagePlane& x, const Kernel& h, const Kernel& g, const SchemaConfig& cfg);
//! Dispatch on cfg.schema.
SchemaResult run_schema(const ImagePlane& x, const Kernel& h, const Kernel& g, const SchemaConfig& cfg);

} // namespace cnsdeblur
