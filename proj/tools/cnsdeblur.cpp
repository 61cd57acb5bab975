#include "cnsdeblur/error.hpp"
#include "cnsdeblur/image_io.hpp"
#include "cnsdeblur/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

using namespace cnsdeblur;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int kBadInput = 2;
constexpr int kNumerical = 3;

// Every config key becomes a flag; values are kept as text and merged through the JSON form.
class ConfigFlags {
public:
    void attach(CLI::App& app)
    {
        app.add_option("--config", config_path_, "JSON config file");
        const ojson defaults = ojson::parse(PipelineConfig{}.to_json());
        for (const auto& item : defaults.items()) {
            std::string dashed = item.key();
            std::replace(dashed.begin(), dashed.end(), '_', '-');
            std::string names = "--" + dashed;
            if (dashed != item.key())
                names += ",--" + item.key();
            app.add_option(names, values_[item.key()], "config key " + item.key())->type_name(type_of(item.value()));
        }
    }

    PipelineConfig resolve() const
    {
        PipelineConfig cfg = config_path_.empty() ? PipelineConfig{} : PipelineConfig::load(config_path_);
        if (given("schema"))
            cfg.use_schema_defaults(values_.at("schema"));
        ojson j = ojson::parse(cfg.to_json());
        for (const auto& [key, text] : values_) {
            if (text.empty())
                continue;
            if (j[key].is_string()) {
                j[key] = text;
                continue;
            }
            try {
                j[key] = ojson::parse(text);
            } catch (const nlohmann::json::exception&) {
                throw InputError("bad value '" + text + "' for --" + key);
            }
        }
        cfg = PipelineConfig::from_json(j.dump());
        cfg.validate();
        return cfg;
    }

private:
    bool given(const std::string& key) const
    {
        const auto it = values_.find(key);
        return it != values_.end() && !it->second.empty();
    }

    static std::string type_of(const ojson& v)
    {
        if (v.is_boolean())
            return "BOOL";
        if (v.is_number_integer())
            return "INT";
        if (v.is_number())
            return "FLOAT";
        return "TEXT";
    }

    std::string config_path_;
    std::map<std::string, std::string> values_;
};

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream os(path);
    if (!os)
        throw InputError("cannot write " + path);
    os << text;
}

std::string read_text(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw InputError("cannot open " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_artifacts(const PipelineConfig& cfg, const DeblurResult& r)
{
    if (!cfg.out_psf.empty())
        save_kernel(r.psf, cfg.out_psf);
    if (!cfg.out_ipsf.empty())
        save_kernel(r.ipsf, cfg.out_ipsf);
    if (!cfg.out_image.empty())
        save_image(r.s_hat, cfg.out_image);
    if (!cfg.out_trace_json.empty())
        write_text(cfg.out_trace_json, trace_to_json(cfg, r.traces));
    if (!cfg.out_trace_csv.empty() && !r.traces.empty())
        write_text(cfg.out_trace_csv, trace_to_csv(r.traces.front()));
}

void summarize(const DeblurResult& r)
{
    std::cerr << "psf off-center mass " << r.psf.off_center_mass() << ", sigma_min " << r.cns.sigma_min
              << ", sigma_2 " << r.cns.sigma_second << "\n";
    std::cerr << "ipsf lambda " << r.ipsf_report.lambda_used << ", iterations " << r.ipsf_report.iterations << ", "
              << to_string(r.ipsf_report.stop) << "\n";
    if (r.patch_undersized)
        std::cerr << "warning: image smaller than 2PQ, AR fitted on the whole image\n";
    if (r.ar.model.degenerate)
        std::cerr << "warning: degenerate AR fit\n";
    for (std::size_t c = 0; c < r.traces.size(); ++c)
        std::cerr << "channel " << c << ": " << r.traces[c].records.size() << " steps, "
                  << to_string(r.traces[c].stop) << "\n";
}

int run_deblur(const std::string& input, const ConfigFlags& flags, bool psf_only)
{
    PipelineConfig cfg = flags.resolve();
    if (psf_only)
        cfg.schema = "none";
    const DeblurResult r = blind_deblur(load_image(input), cfg);
    summarize(r);
    if (psf_only) {
        if (cfg.out_psf.empty())
            write_kernel(std::cout, r.psf);
        if (!cfg.out_psf.empty())
            save_kernel(r.psf, cfg.out_psf);
        if (!cfg.out_ipsf.empty())
            save_kernel(r.ipsf, cfg.out_ipsf);
        return 0;
    }
    write_artifacts(cfg, r);
    if (r.schema_error) {
        std::cerr << "error: " << *r.schema_error << "\n";
        return kNumerical;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Blind deblurring from a single image"};
    app.require_subcommand(1);

    std::string input;
    ConfigFlags est_flags, deb_flags;
    auto* est = app.add_subcommand("estimate-psf", "Estimate PSF and inverse PSF");
    est->add_option("image", input, "input image (PNG, PGM, PPM)")->required();
    est_flags.attach(*est);
    auto* deb = app.add_subcommand("deblur", "Full pipeline");
    deb->add_option("image", input, "input image (PNG, PGM, PPM)")->required();
    deb_flags.attach(*deb);

    std::string texture = "mosaic", clean_in, psf_spec = "gaussian:1.5", noise_spec = "none";
    std::string out_clean, out_blurred, out_true_psf;
    int size = 256, l = 7, m = 7;
    std::uint64_t seed = 0;
    auto* syn = app.add_subcommand("synth", "Generate a synthetic blur fixture");
    syn->add_option("--texture", texture, "mosaic, disks or shards")->capture_default_str();
    syn->add_option("--clean", clean_in, "use this image instead of a generated texture");
    syn->add_option("--size", size, "texture side")->capture_default_str();
    syn->add_option("--seed", seed, "texture and noise seed")->capture_default_str();
    syn->add_option("--psf", psf_spec, "gaussian:S, motion_h:LEN or motion_diag:LEN:ANGLE")->capture_default_str();
    syn->add_option("--psf-l", l, "kernel rows")->capture_default_str();
    syn->add_option("--psf-m", m, "kernel cols")->capture_default_str();
    syn->add_option("--noise", noise_spec, "none, gaussian:SIGMA or impulsive:FRACTION")->capture_default_str();
    syn->add_option("--out-clean", out_clean);
    syn->add_option("--out-blurred", out_blurred)->required();
    syn->add_option("--out-psf", out_true_psf);

    std::string eval_clean, eval_observed, eval_result, eval_true_psf, eval_psf, eval_out;
    auto* ev = app.add_subcommand("eval", "Score a result against a clean reference");
    ev->add_option("--clean", eval_clean)->required();
    ev->add_option("--result", eval_result)->required();
    ev->add_option("--observed", eval_observed, "blurred input, for the improvement figure");
    ev->add_option("--true-psf", eval_true_psf);
    ev->add_option("--psf", eval_psf);
    ev->add_option("--out", eval_out, "report JSON (default stdout)");

    std::string trace_in, trace_out;
    std::size_t channel = 0;
    auto* tp = app.add_subcommand("trace-plot", "Convert a trace JSON to CSV");
    tp->add_option("trace", trace_in, "trace JSON")->required();
    tp->add_option("--channel", channel)->capture_default_str();
    tp->add_option("--out", trace_out, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kBadInput;
    }

    try {
        if (*est)
            return run_deblur(input, est_flags, true);
        if (*deb)
            return run_deblur(input, deb_flags, false);
        if (*syn) {
            const MultiChannelImage clean = clean_in.empty() ? MultiChannelImage(make_texture(texture, size, seed))
                                                             : load_image(clean_in);
            const SyntheticFixture fx = make_fixture(clean, PsfSpec::parse(psf_spec), l, m,
                                                     NoiseSpec::parse(noise_spec), seed);
            save_image(fx.blurred, out_blurred);
            if (!out_clean.empty())
                save_image(fx.clean, out_clean);
            if (!out_true_psf.empty())
                save_kernel(fx.true_psf, out_true_psf);
            return 0;
        }
        if (*ev) {
            const MultiChannelImage clean = load_image(eval_clean), result = load_image(eval_result);
            const MultiChannelImage observed = eval_observed.empty() ? result : load_image(eval_observed);
            std::optional<Kernel> truth, psf;
            if (!eval_true_psf.empty())
                truth = load_kernel(eval_true_psf);
            if (!eval_psf.empty())
                psf = load_kernel(eval_psf);
            write_text(eval_out, report_to_json(evaluate(clean, observed, result, truth, psf)));
            return 0;
        }
        if (*tp) {
            const std::vector<ConvergenceTrace> traces = traces_from_json(read_text(trace_in));
            if (channel >= traces.size())
                throw InputError("trace has " + std::to_string(traces.size()) + " channels");
            write_text(trace_out, trace_to_csv(traces[channel]));
            return 0;
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadInput;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    }
    return 0;
}
