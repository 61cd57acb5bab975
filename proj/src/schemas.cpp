#include "cnsdeblur/schemas.hpp"
#include "cnsdeblur/error.hpp"
#include "cnsdeblur/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cnsdeblur {

namespace {

constexpr auto kNeumann = BoundaryMode::NeumannReplicate;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

StepExtras step_metrics(const ImagePlane& s_next, const ImagePlane& s, const ImagePlane& reg, double dt,
                        double lambda)
{
    const ImagePlane ds = s_next - s;
    const double denom = mean_abs(reg);
    const double num = mean_abs(ds);
    StepExtras e;
    e.lambda = lambda;
    e.dt_lower = num == 0.0 ? 0.0 : (denom > 0.0 ? num / denom : std::numeric_limits<double>::infinity());
    e.dt_upper_metric = dt * max_abs(ds);
    return e;
}

// Drives S^(k) -> S^(k+1) until the monitor stops; `step` returns S^(k+1) and fills extras.
template <class Step>
ImagePlane iterate(const ImagePlane& x, ImagePlane s, const SchemaConfig& cfg, ConvergenceTrace& trace, Step step)
{
    ImagePlane s_prev = x;
    for (int k = 0;; ++k) {
        StepExtras extras;
        ImagePlane s_next = step(k, s, extras);
        const auto stop = monitor_step(trace, s_next, s, s_prev, cfg, extras);
        if (stop) {
            trace.stop = *stop;
            if (*stop == StopReason::EpsReached || *stop == StopReason::IterCap)
                return s_next;
            return s;
        }
        s_prev = std::move(s);
        s = std::move(s_next);
    }
}

} // namespace

std::string to_string(Schema s)
{
    switch (s) {
    case Schema::LR: return "lr";
    case Schema::LRME: return "lrme";
    case Schema::BVDR: return "bvdr";
    case Schema::CS: return "cs";
    }
    return "unknown";
}

std::string to_string(StopReason s)
{
    switch (s) {
    case StopReason::EpsReached: return "eps_reached";
    case StopReason::MonotonicityViolated: return "monotonicity_violated";
    case StopReason::IterCap: return "iter_cap";
    case StopReason::DtBoundViolated: return "dt_bound_violated";
    case StopReason::NonFinite: return "non_finite";
    }
    return "unknown";
}

Schema parse_schema(const std::string& name)
{
    for (Schema s : {Schema::LR, Schema::LRME, Schema::BVDR, Schema::CS})
        if (to_string(s) == name)
            return s;
    throw InputError("unknown schema '" + name + "' (expected lr, lrme, bvdr or cs)");
}

SchemaConfig SchemaConfig::defaults(Schema s)
{
    SchemaConfig c;
    c.schema = s;
    switch (s) {
    case Schema::LR:
        c.max_iters = 100;
        break;
    case Schema::LRME:
        c.dt = 0.1;
        break;
    case Schema::BVDR:
        c.dt = 0.1;
        c.q = 5;
        break;
    case Schema::CS:
        c.dt = 1.0;
        break;
    }
    return c;
}

void SchemaConfig::validate() const
{
    if (!(dt > 0.0))
        throw InputError("dt must be positive");
    if (!(eps > 0.0))
        throw InputError("eps must be positive");
    if (!(theta >= 1.0))
        throw InputError("theta must be at least 1");
    if (max_iters < 1)
        throw InputError("max_iters must be at least 1");
    if (q < 0)
        throw InputError("q must be non-negative");
    if (!(zero_guard > 0.0))
        throw InputError("zero_guard must be positive");
    if (regularizer.kind == Regularizer::Kind::TV && regularizer.beta < 0.0)
        throw InputError("TV beta must be non-negative");
}

std::optional<StopReason> decide(int k, double residual, double prev_residual, const SchemaConfig& cfg,
                                 const StepExtras& extras)
{
    if (!std::isfinite(residual))
        return StopReason::NonFinite;
    if (residual < cfg.eps)
        return StopReason::EpsReached;
    if (k >= cfg.q && !extras.in_transition && residual * cfg.theta > prev_residual)
        return StopReason::MonotonicityViolated;
    if (cfg.enforce_dt_bounds && (cfg.dt < extras.dt_lower || extras.dt_upper_metric > cfg.dt_upper))
        return StopReason::DtBoundViolated;
    if (k + 1 >= cfg.max_iters)
        return StopReason::IterCap;
    return std::nullopt;
}

std::optional<StopReason> monitor_step(ConvergenceTrace& trace, const ImagePlane& s_next, const ImagePlane& s_cur,
                                       const ImagePlane& s_prev, const SchemaConfig& cfg, const StepExtras& extras)
{
    const int k = static_cast<int>(trace.records.size());
    TraceRecord rec;
    rec.k = k;
    rec.residual_msq = s_next.all_finite() ? mean_sq(s_next - s_cur) : std::numeric_limits<double>::infinity();
    const double prev = trace.records.empty() ? mean_sq(s_cur - s_prev) : trace.records.back().residual_msq;
    if (prev > 0.0)
        rec.theta = rec.residual_msq / prev;
    else
        rec.theta = rec.residual_msq == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    rec.lambda = extras.lambda;
    rec.dt_lower = extras.dt_lower;
    rec.dt_upper_metric = extras.dt_upper_metric;
    trace.records.push_back(rec);
    return decide(k, rec.residual_msq, prev, cfg, extras);
}

ImagePlane lr_step(const ImagePlane& s, const ImagePlane& x, const Kernel& h, double guard)
{
    ImagePlane ratio = conv_same(s, h, kNeumann);
    auto rd = ratio.data();
    auto xd = x.data();
    for (std::size_t i = 0; i < rd.size(); ++i)
        rd[i] = xd[i] / std::max(rd[i], guard);
    ImagePlane out = hadamard(s, correlate_adjoint(ratio, h, kNeumann));
    for (double& v : out.data())
        v = std::max(v, 0.0);
    return out;
}

Kernel lr_psf_update(const ImagePlane& s, const ImagePlane& x, const Kernel& h, double guard)
{
    ImagePlane ratio = conv_same(s, h, kNeumann);
    for (std::size_t i = 0; i < ratio.size(); ++i)
        ratio.data()[i] = x.data()[i] / std::max(ratio.data()[i], guard);
    Kernel out = h;
    for (int i = 0; i < h.rows(); ++i)
        for (int j = 0; j < h.cols(); ++j) {
            const int di = i - h.center_row(), dj = j - h.center_col();
            double num = 0.0, den = 0.0;
            for (int r = 0; r < s.height(); ++r)
                for (int c = 0; c < s.width(); ++c) {
                    const double v = s.clamped(r + di, c + dj);
                    num += v * ratio(r, c);
                    den += v;
                }
            if (den > 0.0)
                out(i, j) *= num / den;
        }
    return out.normalized();
}

ImagePlane lrme_step(const ImagePlane& s, const ImagePlane& x, const Kernel& h, double lambda,
                     const Regularizer& reg, double dt)
{
    ImagePlane update = conv_same(x, h, kNeumann);
    update -= conv_same(s, compose_kernels(h, h), kNeumann);
    if (lambda != 0.0)
        update += lambda * apply_regularizer(s, reg);
    return s + dt * update;
}

LambdaState initial_lambda_state(const ImagePlane& x, const Regularizer& reg)
{
    return {0.0, x, apply_regularizer(x, reg)};
}

LambdaUpdate dynamic_lambda(const LambdaState& state, const ImagePlane& s_cur, const ImagePlane& x, const Kernel& h,
                            const Kernel& g, const Regularizer& reg, double dt, int k, double cap)
{
    LambdaUpdate out;
    ImagePlane reg_cur = apply_regularizer(s_cur, reg);
    const double den = dt * mean_abs(conv_same(reg_cur, g, kNeumann));
    double lambda = 0.0;
    if (den < 1e-14) {
        out.degenerate = true;
    } else if (k == 0) {
        const double num = mean_abs(conv_same(s_cur - x, h, kNeumann)) / den;
        const double arg = mean_abs(conv_same(reg_cur - apply_regularizer(x, reg), g, kNeumann)) / den;
        const double e = std::expm1(arg);
        if (e > 0.0)
            lambda = num / e;
        else
            out.degenerate = true;
    } else {
        const double inc = mean_abs(conv_same(s_cur - state.s_prev, h, kNeumann)) / den;
        const double arg = mean_abs(conv_same(reg_cur - state.reg_prev, g, kNeumann)) / den;
        lambda = (state.lambda_prev + inc) * std::exp(-arg);
    }
    if (!std::isfinite(lambda) || lambda > cap) {
        out.degenerate = out.degenerate || !std::isfinite(lambda);
        lambda = std::isnan(lambda) ? 0.0 : cap;
    }
    out.lambda = std::max(lambda, 0.0);
    out.state = {out.lambda, s_cur, std::move(reg_cur)};
    return out;
}

ImagePlane cs_lambda_field(const ImagePlane& s, const ImagePlane& x, const Kernel& h)
{
    const ImagePlane r = x - conv_same(s, h, kNeumann);
    const ImagePlane sigma = metric_det(s);
    ImagePlane out(s.width(), s.height());
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] = r.data()[i] * r.data()[i] / (2.0 * sigma.data()[i]);
    return out;
}

SchemaResult lr_run(const ImagePlane& x, const Kernel& h, const SchemaConfig& cfg, bool update_psf)
{
    cfg.validate();
    SchemaResult res;
    res.h = h;
    res.s = iterate(x, x, cfg, res.trace, [&](int, const ImagePlane& s, StepExtras& e) {
        ImagePlane next = lr_step(s, x, res.h, cfg.zero_guard);
        if (update_psf)
            res.h = lr_psf_update(next, x, res.h, cfg.zero_guard);
        e.lambda = e.dt_lower = kNaN;
        e.dt_upper_metric = max_abs(next - s);
        return next;
    });
    return res;
}

SchemaResult lrme_run(const ImagePlane& x, const Kernel& h, const Kernel& g, const SchemaConfig& cfg)
{
    cfg.validate();
    SchemaResult res;
    res.h = h;
    LambdaState state = initial_lambda_state(x, cfg.regularizer);
    res.s = iterate(x, conv_same(x, g, kNeumann), cfg, res.trace, [&](int k, const ImagePlane& s, StepExtras& e) {
        double lambda = cfg.lambda0;
        const double lambda_prev = state.lambda_prev;
        if (cfg.dynamic_lambda) {
            LambdaUpdate u = dynamic_lambda(state, s, x, h, g, cfg.regularizer, cfg.dt, k, cfg.lambda_cap);
            lambda = u.lambda;
            res.trace.lambda_degenerate = res.trace.lambda_degenerate || u.degenerate;
            state = std::move(u.state);
        } else {
            state = {lambda, s, apply_regularizer(s, cfg.regularizer)};
        }
        ImagePlane next = lrme_step(s, x, h, lambda, cfg.regularizer, cfg.dt);
        e = step_metrics(next, s, state.reg_prev, cfg.dt, lambda);
        e.in_transition = cfg.dynamic_lambda && cfg.transition_until_lambda_peak && (k == 0 || lambda > lambda_prev);
        return next;
    });
    return res;
}

SchemaResult bvdr_run(const ImagePlane& x, const Kernel& h, const Kernel& g, const SchemaConfig& cfg)
{
    cfg.validate();
    SchemaResult res;
    res.h = h;
    LambdaState state = initial_lambda_state(x, cfg.regularizer);
    res.s = iterate(x, conv_same(x, g, kNeumann), cfg, res.trace, [&](int k, const ImagePlane& s, StepExtras& e) {
        const double lambda_prev = state.lambda_prev;
        LambdaUpdate u = dynamic_lambda(state, s, x, h, g, cfg.regularizer, cfg.dt, k, cfg.lambda_cap);
        res.trace.lambda_degenerate = res.trace.lambda_degenerate || u.degenerate;
        state = std::move(u.state);
        ImagePlane update = x - conv_same(s, h, kNeumann);
        if (u.lambda != 0.0)
            update += u.lambda * conv_same(state.reg_prev, g, kNeumann);
        ImagePlane next = s + cfg.dt * update;
        e = step_metrics(next, s, state.reg_prev, cfg.dt, u.lambda);
        e.in_transition = cfg.transition_until_lambda_peak && (k == 0 || u.lambda > lambda_prev);
        return next;
    });
    return res;
}

SchemaResult cs_run(const ImagePlane& x, const Kernel& h, const Kernel& g, const SchemaConfig& cfg)
{
    cfg.validate();
    SchemaResult res;
    res.h = h;
    res.s = iterate(x, conv_same(x, g, kNeumann), cfg, res.trace, [&](int, const ImagePlane& s, StepExtras& e) {
        const ImagePlane field = cs_lambda_field(s, x, h);
        const ImagePlane reg = saf_pointwise(s);
        ImagePlane update = x - conv_same(s, h, kNeumann);
        update += conv_same(hadamard(field, reg), g, kNeumann);
        ImagePlane next = s + cfg.dt * update;
        e = step_metrics(next, s, reg, cfg.dt, mean_abs(field));
        return next;
    });
    return res;
}

SchemaResult run_schema(const ImagePlane& x, const Kernel& h, const Kernel& g, const SchemaConfig& cfg)
{
    switch (cfg.schema) {
    case Schema::LR: return lr_run(x, h, cfg);
    case Schema::LRME: return lrme_run(x, h, g, cfg);
    case Schema::BVDR: return bvdr_run(x, h, g, cfg);
    case Schema::CS: return cs_run(x, h, g, cfg);
    }
    throw InputError("unknown schema");
}

} // namespace cnsdeblur
