#pragma once

#include "cnsdeblur/ar_model.hpp"
#include "cnsdeblur/denoise.hpp"
#include "cnsdeblur/fixtures.hpp"
#include "cnsdeblur/ipsf_solver.hpp"
#include "cnsdeblur/metrics.hpp"
#include "cnsdeblur/psf_cns.hpp"
#include "cnsdeblur/schemas.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cnsdeblur {

struct PipelineConfig {
    int ar_p = 17, ar_q = 17;
    int psf_l = 7, psf_m = 7;

    bool ar_regularize = false;
    double ar_lambda = 1e-3;
    int ar_q_steps = 3;
    double ar_theta = 1.0;
    double ar_eps = 1e-8;

    double ipsf_lambda_max = 1e-2;
    double ipsf_lambda_min = 1e-4;
    int ipsf_lambda_steps = 9;
    int ipsf_q = 3;
    double ipsf_theta = 2.0;
    double ipsf_eps = 1e-8;
    int ipsf_max_iters = 10;
    double ipsf_svd_cutoff = 1e-10;

    std::string schema = "cs"; //!< lr, lrme, bvdr, cs or none
    double dt = 1.0;
    double lambda0 = 0.0;
    bool dynamic_lambda = true;
    std::string regularizer = "saf"; //!< saf or tv
    double tv_beta = 1e-4;
    int q = 1;
    bool transition_until_lambda_peak = true;
    double theta = 1.0;
    double eps = 1e-8;
    int max_iters = 10;
    double zero_guard = 1e-6;
    double lambda_cap = 1e3;
    bool enforce_dt_bounds = false;
    double dt_upper = 0.01;

    int denoise_stages = 0;
    double denoise_svd_cutoff = 1e-4;

    std::string rgb_policy = "luminance";

    std::string out_image;
    std::string out_psf;
    std::string out_ipsf;
    std::string out_trace_json;
    std::string out_trace_csv;

    //! Throws InputError on inconsistent orders or values.
    void validate() const;
    IpsfConfig ipsf_config() const;
    ArRegularization ar_regularization() const;
    bool has_schema() const { return schema != "none"; }
    SchemaConfig schema_config() const;
    //! Switches schema and loads that schema's default dt, q and iteration cap.
    void use_schema_defaults(const std::string& name);

    std::string to_json() const;
    //! Missing keys keep their defaults; unknown keys are rejected.
    static PipelineConfig from_json(const std::string& text);
    static PipelineConfig load(const std::string& path);

    friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

struct DeblurResult {
    MultiChannelImage s_hat;
    MultiChannelImage primary;  //!< G * X per channel
    MultiChannelImage observed; //!< input after the optional denoise cascade
    Kernel psf;
    Kernel ipsf;
    ArFit ar;
    bool patch_undersized = false;
    CnsResult cns;
    PsfShape psf_shape;
    IpsfSolveReport ipsf_report;
    std::vector<CascadeStage> denoise;
    std::vector<ConvergenceTrace> traces;
    std::optional<std::string> schema_error; //!< refinement failed; s_hat holds the best finite estimate
};

//! Stage-labelled failures from the estimation stages keep their exception type.
DeblurResult blind_deblur(const MultiChannelImage& x, const PipelineConfig& cfg);

QualityReport evaluate(const SyntheticFixture& fixture, const MultiChannelImage& result,
                       const std::optional<Kernel>& psf = std::nullopt);
QualityReport evaluate(const MultiChannelImage& clean, const MultiChannelImage& observed,
                       const MultiChannelImage& result, const std::optional<Kernel>& true_psf = std::nullopt,
                       const std::optional<Kernel>& psf = std::nullopt);
std::string report_to_json(const QualityReport& r);

//! {schema, config_echo, channels: [[records...]], stop_reasons}.
std::string trace_to_json(const PipelineConfig& cfg, const std::vector<ConvergenceTrace>& traces);
//! Columns k, residual_msq, lambda, theta, dt_lower, dt_upper_metric.
std::string trace_to_csv(const ConvergenceTrace& trace);
//! Channel traces back from trace_to_json output.
std::vector<ConvergenceTrace> traces_from_json(const std::string& text);

} // namespace cnsdeblur
