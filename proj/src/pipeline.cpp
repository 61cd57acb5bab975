#include "cnsdeblur/pipeline.hpp"
#include "cnsdeblur/conv_ops.hpp"
#include "cnsdeblur/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace cnsdeblur {

using ojson = nlohmann::ordered_json;

namespace {

template <class F>
void visit_fields(PipelineConfig& c, F&& f)
{
    f("ar_p", c.ar_p);
    f("ar_q", c.ar_q);
    f("psf_l", c.psf_l);
    f("psf_m", c.psf_m);
    f("ar_regularize", c.ar_regularize);
    f("ar_lambda", c.ar_lambda);
    f("ar_q_steps", c.ar_q_steps);
    f("ar_theta", c.ar_theta);
    f("ar_eps", c.ar_eps);
    f("ipsf_lambda_max", c.ipsf_lambda_max);
    f("ipsf_lambda_min", c.ipsf_lambda_min);
    f("ipsf_lambda_steps", c.ipsf_lambda_steps);
    f("ipsf_q", c.ipsf_q);
    f("ipsf_theta", c.ipsf_theta);
    f("ipsf_eps", c.ipsf_eps);
    f("ipsf_max_iters", c.ipsf_max_iters);
    f("ipsf_svd_cutoff", c.ipsf_svd_cutoff);
    f("schema", c.schema);
    f("dt", c.dt);
    f("lambda0", c.lambda0);
    f("dynamic_lambda", c.dynamic_lambda);
    f("regularizer", c.regularizer);
    f("tv_beta", c.tv_beta);
    f("q", c.q);
    f("transition_until_lambda_peak", c.transition_until_lambda_peak);
    f("theta", c.theta);
    f("eps", c.eps);
    f("max_iters", c.max_iters);
    f("zero_guard", c.zero_guard);
    f("lambda_cap", c.lambda_cap);
    f("enforce_dt_bounds", c.enforce_dt_bounds);
    f("dt_upper", c.dt_upper);
    f("denoise_stages", c.denoise_stages);
    f("denoise_svd_cutoff", c.denoise_svd_cutoff);
    f("rgb_policy", c.rgb_policy);
    f("out_image", c.out_image);
    f("out_psf", c.out_psf);
    f("out_ipsf", c.out_ipsf);
    f("out_trace_json", c.out_trace_json);
    f("out_trace_csv", c.out_trace_csv);
}

void require(bool ok, const std::string& msg)
{
    if (!ok)
        throw InputError(msg);
}

template <class F>
auto labelled(const char* stage, F&& fn)
{
    try {
        return fn();
    } catch (const InputError& e) {
        throw InputError(std::string(stage) + ": " + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(std::string(stage) + ": " + e.what());
    }
}

double from_json_number(const ojson& v)
{
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

ojson number_or_text(double v)
{
    if (std::isfinite(v))
        return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

} // namespace

void PipelineConfig::validate() const
{
    for (int v : {ar_p, ar_q, psf_l, psf_m})
        require(v >= 1 && v % 2 == 1, "AR orders and PSF dimensions must be odd and positive");
    require(psf_l < ar_p && psf_m < ar_q, "PSF dimensions must be smaller than the AR orders");
    require(ipsf_lambda_max > 0.0 && ipsf_lambda_min > 0.0 && ipsf_lambda_steps >= 1,
            "IPSF lambda grid must be positive with at least one point");
    require(ipsf_q >= 0 && ipsf_theta >= 1.0 && ipsf_eps > 0.0 && ipsf_max_iters >= 1, "bad IPSF iteration settings");
    require(ipsf_svd_cutoff >= 0.0 && denoise_svd_cutoff >= 0.0, "SVD cutoffs must be non-negative");
    require(ar_q_steps >= 0 && ar_theta >= 1.0 && ar_eps > 0.0 && ar_lambda >= 0.0, "bad AR regularization settings");
    require(denoise_stages >= 0, "denoise_stages must be non-negative");
    require(rgb_policy == "luminance", "rgb_policy must be 'luminance'");
    require(regularizer == "saf" || regularizer == "tv", "regularizer must be 'saf' or 'tv'");
    if (has_schema())
        schema_config().validate();
}

IpsfConfig PipelineConfig::ipsf_config() const
{
    IpsfConfig c;
    c.lambdas = IpsfConfig::log_grid(ipsf_lambda_max, ipsf_lambda_min, ipsf_lambda_steps);
    c.q = ipsf_q;
    c.theta = ipsf_theta;
    c.eps = ipsf_eps;
    c.max_iters = ipsf_max_iters;
    c.svd_cutoff = ipsf_svd_cutoff;
    return c;
}

ArRegularization PipelineConfig::ar_regularization() const
{
    return {ar_regularize, ar_lambda, ar_q_steps, ar_theta, ar_eps, 50};
}

SchemaConfig PipelineConfig::schema_config() const
{
    SchemaConfig c;
    c.schema = parse_schema(schema);
    c.dt = dt;
    c.lambda0 = lambda0;
    c.dynamic_lambda = dynamic_lambda;
    c.regularizer = regularizer == "tv" ? Regularizer::tv(tv_beta) : Regularizer::saf();
    c.q = q;
    c.transition_until_lambda_peak = transition_until_lambda_peak;
    c.theta = theta;
    c.eps = eps;
    c.max_iters = max_iters;
    c.zero_guard = zero_guard;
    c.lambda_cap = lambda_cap;
    c.enforce_dt_bounds = enforce_dt_bounds;
    c.dt_upper = dt_upper;
    return c;
}

void PipelineConfig::use_schema_defaults(const std::string& name)
{
    schema = name;
    if (!has_schema())
        return;
    const SchemaConfig d = SchemaConfig::defaults(parse_schema(name));
    dt = d.dt;
    q = d.q;
    max_iters = d.max_iters;
}

std::string PipelineConfig::to_json() const
{
    ojson j = ojson::object();
    PipelineConfig copy = *this;
    visit_fields(copy, [&](const char* name, const auto& v) { j[name] = v; });
    return j.dump(2) + "\n";
}

PipelineConfig PipelineConfig::from_json(const std::string& text)
{
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("config is not valid JSON: ") + e.what());
    }
    require(j.is_object(), "config must be a JSON object");
    PipelineConfig c;
    std::size_t known = 0;
    visit_fields(c, [&](const char* name, auto& v) {
        if (!j.contains(name))
            return;
        ++known;
        try {
            j.at(name).get_to(v);
        } catch (const nlohmann::json::exception&) {
            throw InputError(std::string("config key '") + name + "' has the wrong type");
        }
    });
    if (known != j.size()) {
        PipelineConfig probe;
        for (const auto& item : j.items()) {
            bool found = false;
            visit_fields(probe, [&](const char* name, auto&) { found = found || item.key() == name; });
            require(found, "unknown config key '" + item.key() + "'");
        }
    }
    return c;
}

PipelineConfig PipelineConfig::load(const std::string& path)
{
    std::ifstream is(path);
    require(static_cast<bool>(is), "cannot open config " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return from_json(ss.str());
}

DeblurResult blind_deblur(const MultiChannelImage& x, const PipelineConfig& cfg)
{
    labelled("config", [&] {
        cfg.validate();
        return 0;
    });
    DeblurResult res;
    res.observed = x;
    constexpr auto mode = BoundaryMode::NeumannReplicate;

    if (cfg.denoise_stages > 0) {
        const CascadeOrders orders{cfg.ar_p, cfg.ar_q, cfg.psf_l, cfg.psf_m, cfg.denoise_svd_cutoff};
        for (int i = 0; i < cfg.denoise_stages; ++i) {
            CascadeStage st = labelled("denoise", [&] { return prior_filter(luminance(res.observed), orders); });
            std::vector<ImagePlane> planes;
            for (const ImagePlane& c : res.observed.channels())
                planes.push_back(conv_same(c, st.ipsf_prior, mode));
            res.observed = MultiChannelImage(std::move(planes));
            res.denoise.push_back(std::move(st));
        }
    }

    const ImagePlane lum = luminance(res.observed);
    res.ar = labelled("ar_model", [&] {
        const PatchSelection sel = select_patch(lum, cfg.ar_p, cfg.ar_q);
        res.patch_undersized = sel.undersized;
        return estimate_ar(sel.patch, cfg.ar_p, cfg.ar_q, cfg.ar_regularization());
    });
    res.cns = labelled("psf_cns", [&] { return estimate_psf(res.ar.model, cfg.psf_l, cfg.psf_m); });
    res.psf = res.cns.psf;
    res.psf_shape = psf_shape_report(res.psf);
    res.ipsf_report = labelled("ipsf_solver", [&] { return optimize_ipsf(build_problem(lum, res.psf), cfg.ipsf_config()); });
    res.ipsf = res.ipsf_report.g;

    std::vector<ImagePlane> primary;
    for (const ImagePlane& c : res.observed.channels())
        primary.push_back(conv_same(c, res.ipsf, mode));
    res.primary = MultiChannelImage(std::move(primary));
    res.s_hat = res.primary;
    if (!cfg.has_schema())
        return res;

    try {
        const SchemaConfig scfg = cfg.schema_config();
        std::vector<ImagePlane> refined;
        for (const ImagePlane& c : res.observed.channels()) {
            SchemaResult r = run_schema(c, res.psf, res.ipsf, scfg);
            if (r.trace.stop == StopReason::NonFinite && !res.schema_error)
                res.schema_error = "schema " + cfg.schema + ": non-finite iterate";
            res.traces.push_back(std::move(r.trace));
            refined.push_back(std::move(r.s));
        }
        res.s_hat = MultiChannelImage(std::move(refined));
    } catch (const std::exception& e) {
        res.schema_error = "schema " + cfg.schema + ": " + e.what();
        res.s_hat = res.primary;
    }
    return res;
}

QualityReport evaluate(const MultiChannelImage& clean, const MultiChannelImage& observed,
                       const MultiChannelImage& result, const std::optional<Kernel>& true_psf,
                       const std::optional<Kernel>& psf)
{
    if (clean.channel_count() != result.channel_count() || clean.width() != result.width()
        || clean.height() != result.height())
        throw InputError("evaluate: result and reference differ in shape");
    QualityReport r;
    r.psnr = cnsdeblur::psnr(clean, result);
    r.psnr_input = cnsdeblur::psnr(clean, observed);
    r.improvement_db = r.psnr - r.psnr_input;
    if (std::isnan(r.improvement_db))
        r.improvement_db = 0.0; // both infinite
    double sum = 0.0;
    for (int c = 0; c < clean.channel_count(); ++c) {
        const ImagePlane d = result.channel(c) - clean.channel(c);
        sum += mean_abs(d);
        r.max_abs_diff = std::max(r.max_abs_diff, max_abs(d));
    }
    r.mean_abs_diff = sum / clean.channel_count();
    if (true_psf && psf)
        r.kernel_ncc = ncc(*psf, *true_psf);
    return r;
}

QualityReport evaluate(const SyntheticFixture& fixture, const MultiChannelImage& result,
                       const std::optional<Kernel>& psf)
{
    return evaluate(fixture.clean, fixture.blurred, result, fixture.true_psf, psf);
}

std::string report_to_json(const QualityReport& r)
{
    ojson j;
    j["psnr"] = number_or_text(r.psnr);
    j["mean_abs_diff"] = r.mean_abs_diff;
    j["max_abs_diff"] = r.max_abs_diff;
    j["kernel_ncc"] = r.kernel_ncc ? ojson(*r.kernel_ncc) : ojson(nullptr);
    j["psnr_input"] = number_or_text(r.psnr_input);
    j["improvement_db"] = number_or_text(r.improvement_db);
    return j.dump(2) + "\n";
}

std::string trace_to_json(const PipelineConfig& cfg, const std::vector<ConvergenceTrace>& traces)
{
    ojson j;
    j["schema"] = cfg.schema;
    j["config_echo"] = ojson::parse(cfg.to_json());
    ojson channels = ojson::array();
    ojson reasons = ojson::array();
    for (const ConvergenceTrace& t : traces) {
        ojson recs = ojson::array();
        for (const TraceRecord& r : t.records)
            recs.push_back({{"k", r.k},
                            {"residual_msq", r.residual_msq},
                            {"lambda", r.lambda},
                            {"theta", r.theta},
                            {"dt_lower", r.dt_lower},
                            {"dt_upper_metric", r.dt_upper_metric}});
        channels.push_back(std::move(recs));
        reasons.push_back(to_string(t.stop));
    }
    j["channels"] = std::move(channels);
    j["stop_reasons"] = std::move(reasons);
    return j.dump(2) + "\n";
}

std::vector<ConvergenceTrace> traces_from_json(const std::string& text)
{
    std::vector<ConvergenceTrace> out;
    try {
        const ojson j = ojson::parse(text);
        const ojson& channels = j.at("channels");
        for (std::size_t c = 0; c < channels.size(); ++c) {
            ConvergenceTrace t;
            for (const auto& rec : channels[c]) {
                TraceRecord r;
                r.k = rec.at("k").get<int>();
                r.residual_msq = from_json_number(rec.at("residual_msq"));
                r.lambda = from_json_number(rec.at("lambda"));
                r.theta = from_json_number(rec.at("theta"));
                r.dt_lower = from_json_number(rec.at("dt_lower"));
                r.dt_upper_metric = from_json_number(rec.at("dt_upper_metric"));
                t.records.push_back(r);
            }
            if (j.contains("stop_reasons") && c < j["stop_reasons"].size()) {
                const std::string name = j["stop_reasons"][c].get<std::string>();
                for (StopReason s : {StopReason::EpsReached, StopReason::MonotonicityViolated, StopReason::IterCap,
                                     StopReason::DtBoundViolated, StopReason::NonFinite})
                    if (to_string(s) == name)
                        t.stop = s;
            }
            out.push_back(std::move(t));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed trace JSON: ") + e.what());
    }
    return out;
}

std::string trace_to_csv(const ConvergenceTrace& trace)
{
    std::ostringstream os;
    os << std::setprecision(17);
    os << "k,residual_msq,lambda,theta,dt_lower,dt_upper_metric\n";
    for (const TraceRecord& r : trace.records)
        os << r.k << ',' << r.residual_msq << ',' << r.lambda << ',' << r.theta << ',' << r.dt_lower << ','
           << r.dt_upper_metric << '\n';
    return os.str();
}

} // namespace cnsdeblur
