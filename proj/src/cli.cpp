#include "morsp/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "morsp/metrics.hpp"
#include "morsp/morphology.hpp"
#include "morsp/numcheck.hpp"
#include "morsp/pgm_io.hpp"
#include "morsp/solver.hpp"

namespace morsp {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

GrayImage threshold_image(const GrayImage& u, double threshold) {
    GrayImage out = u;
    for (double& v : out.data()) v = v > threshold ? 1.0 : 0.0;
    return out;
}

void write_trace(const std::string& path, const SolverState& state) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "iter,energy,residual\n";
    for (int i = 0; i < state.iter; ++i)
        out << (i + 1) << ',' << format_double(state.energy_trace[i]) << ','
            << format_double(state.residual_trace[i]) << '\n';
}

// key=value solver configuration; CLI flags override file entries and
// unknown keys are rejected.
void apply_config_line(SolverConfig& cfg, const std::string& key,
                       const std::string& value) {
    auto as_double = [&](const char* name) {
        try {
            std::size_t used = 0;
            double v = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string("config: bad value for ") +
                                        name + ": '" + value + "'");
        }
    };
    auto as_int = [&](const char* name) {
        try {
            std::size_t used = 0;
            int v = std::stoi(value, &used);
            if (used != value.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string("config: bad value for ") +
                                        name + ": '" + value + "'");
        }
    };
    if (key == "gamma") cfg.gamma = as_double("gamma");
    else if (key == "lambda") cfg.lambda = as_double("lambda");
    else if (key == "alpha") cfg.alpha = as_double("alpha");
    else if (key == "eta") cfg.eta = as_double("eta");
    else if (key == "iota") cfg.iota = as_double("iota");
    else if (key == "kernel_size") cfg.kernel_size = as_int("kernel_size");
    else if (key == "sigma") cfg.sigma = as_double("sigma");
    else if (key == "levels") cfg.levels = as_int("levels");
    else if (key == "max_iter") cfg.max_iter = as_int("max_iter");
    else if (key == "tol") cfg.tol = as_double("tol");
    else if (key == "element") cfg.element = parse_element(value);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

void load_config_file(SolverConfig& cfg, const std::string& path) {
    if (!std::filesystem::exists(path))
        throw FileNotFoundError(path + ": no such file");
    std::ifstream in(path);
    if (!in) throw FileNotFoundError(path + ": cannot open");
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ": expected key=value, got '" +
                                        line + "'");
        apply_config_line(cfg, line.substr(0, eq), line.substr(eq + 1));
    }
}

void manifest_config(RunManifest& manifest, const SolverConfig& cfg) {
    manifest.set("kernel_size", static_cast<long long>(cfg.kernel_size));
    manifest.set("max_iter", static_cast<long long>(cfg.max_iter));
    manifest.set("gamma", cfg.gamma);
    manifest.set("lambda", cfg.lambda);
    manifest.set("alpha", cfg.alpha);
    manifest.set("eta", cfg.eta);
    manifest.set("iota", cfg.iota);
    manifest.set("sigma", cfg.sigma);
    manifest.set("levels", static_cast<long long>(cfg.levels));
    manifest.set("tol", cfg.tol);
    manifest.set("element", element_to_string(cfg.element));
}

void emit_manifest(const RunManifest& manifest, const std::string& path) {
    if (path.empty()) {
        std::cout << manifest.to_text();
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << manifest.to_text();
}

struct SkeletonizeArgs {
    std::string input, output, manifest_path;
    std::string mode = "classic";
    double alpha = 0.05;
    int levels = -1;  // -1: auto for classic, 5 for smooth
    std::string element = "square:1";
};

int cmd_skeletonize(const SkeletonizeArgs& args) {
    auto start = Clock::now();
    StructuringElement element = parse_element(args.element);
    if (args.mode == "smooth" && !(args.alpha > 0.0))
        throw std::invalid_argument("skeletonize: alpha must be > 0");
    if (args.levels < -1)
        throw std::invalid_argument("skeletonize: levels must be >= 0");

    GrayImage input = read_pgm(args.input);
    int levels = args.levels;
    GrayImage skeleton(1, 1);
    if (args.mode == "classic") {
        if (levels < 0) levels = auto_skeleton_levels(input, element);
        skeleton = classic_skeleton(input, element, levels);
    } else {
        if (levels < 0) levels = 5;
        SmoothParams params{args.alpha, levels, element};
        skeleton = smooth_skeleton(input, params).skeleton;
    }
    write_pgm(args.output, skeleton);

    RunManifest manifest;
    manifest.command = "skeletonize";
    manifest.set("input", args.input);
    manifest.set("output", args.output);
    manifest.set("mode", args.mode);
    if (args.mode == "smooth") manifest.set("alpha", args.alpha);
    manifest.set("levels", static_cast<long long>(levels));
    manifest.set("element", element_to_string(element));
    manifest.set("duration_ms", elapsed_ms(start));
    emit_manifest(manifest,
                  args.manifest_path.empty() ? args.output + ".manifest"
                                             : args.manifest_path);
    return exit_ok;
}

struct RefineArgs {
    std::string input, skeleton_prior, prior_mask, config_path;
    std::string output, binary_output, trace_path, manifest_path;
    double threshold = 0.5;
    SolverConfig cfg;
};

int cmd_refine(const RefineArgs& args) {
    auto start = Clock::now();
    args.cfg.validate();
    if (!(args.threshold >= 0.0 && args.threshold <= 1.0))
        throw std::invalid_argument("refine: threshold must be in [0,1]");

    GrayImage mask = read_pgm(args.input);
    const std::string& prior_path =
        args.skeleton_prior.empty() ? args.prior_mask : args.skeleton_prior;
    GrayImage prior = read_pgm(prior_path);
    require_same_shape(mask, prior, "refine");

    // Logit features so that u0 = sigmoid(o) recovers the mask.
    constexpr double eps = 1e-4;
    GrayImage features(mask.height(), mask.width());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        double m = std::clamp(mask.data()[i], eps, 1.0 - eps);
        features.data()[i] = std::log(m / (1.0 - m));
    }

    RefineResult result = refine(features, prior, args.cfg);
    write_pgm(args.output, result.u);
    if (!args.binary_output.empty())
        write_pgm(args.binary_output, threshold_image(result.u, args.threshold));
    if (!args.trace_path.empty()) write_trace(args.trace_path, result.state);

    RunManifest manifest;
    manifest.command = "refine";
    manifest.set("input", args.input);
    if (!args.skeleton_prior.empty())
        manifest.set("skeleton_prior", args.skeleton_prior);
    else
        manifest.set("prior_mask", args.prior_mask);
    manifest.set("output", args.output);
    if (!args.binary_output.empty())
        manifest.set("binary_output", args.binary_output);
    if (!args.trace_path.empty()) manifest.set("trace", args.trace_path);
    manifest.set("threshold", args.threshold);
    manifest_config(manifest, args.cfg);
    manifest.set("iterations", static_cast<long long>(result.state.iter));
    manifest.set("final_residual", result.state.residual_trace.empty()
                                       ? 0.0
                                       : result.state.residual_trace.back());
    manifest.set("duration_ms", elapsed_ms(start));
    emit_manifest(manifest,
                  args.manifest_path.empty() ? args.output + ".manifest"
                                             : args.manifest_path);
    return exit_ok;
}

struct MetricsArgs {
    std::string pred, gt, manifest_path;
    double threshold = 0.5;
    std::string element = "square:1";
};

int cmd_metrics(const MetricsArgs& args) {
    auto start = Clock::now();
    StructuringElement element = parse_element(args.element);
    GrayImage pred = read_pgm(args.pred);
    GrayImage gt = read_pgm(args.gt);
    MetricsReport report = evaluate(pred, gt, args.threshold, element);

    std::cout << "f1=" << fixed4(report.f1) << '\n'
              << "iou=" << fixed4(report.iou) << '\n'
              << "precision=" << fixed4(report.precision) << '\n'
              << "recall=" << fixed4(report.recall) << '\n'
              << "cl_dice=" << fixed4(report.cl_dice.value()) << '\n'
              << "tp=" << report.tp << '\n'
              << "fp=" << report.fp << '\n'
              << "fn=" << report.fn << '\n'
              << "tn=" << report.tn << '\n';

    RunManifest manifest;
    manifest.command = "metrics";
    manifest.set("pred", args.pred);
    manifest.set("gt", args.gt);
    manifest.set("threshold", args.threshold);
    manifest.set("element", element_to_string(element));
    manifest.set("duration_ms", elapsed_ms(start));
    emit_manifest(manifest, args.manifest_path);
    return exit_ok;
}

struct GradcheckArgs {
    std::string manifest_path;
    std::uint64_t seed = 42;
    double alpha = 0.05;
    bool corrupt = false;
};

int cmd_gradcheck(const GradcheckArgs& args) {
    auto start = Clock::now();
    if (!(args.alpha > 0.0))
        throw std::invalid_argument("gradcheck: alpha must be > 0");
    GradCheckSuiteResult result =
        run_gradcheck_suite(args.seed, args.alpha, args.corrupt);

    for (const SuiteCheck& check : result.checks)
        std::cout << check.name << '=' << (check.passed ? "pass" : "FAIL")
                  << " worst=" << format_double(check.worst)
                  << " tol=" << format_double(check.tolerance)
                  << (check.detail.empty() ? "" : " " + check.detail) << '\n';
    const GradCheckReport& rep = result.report;
    std::cout << "max_rel_error=" << format_double(rep.max_rel_error) << '\n'
              << "max_abs_error=" << format_double(rep.max_abs_error) << '\n'
              << "worst_pixel=(" << rep.worst_pixel.first << ','
              << rep.worst_pixel.second << ")\n"
              << "step=" << format_double(rep.step) << '\n'
              << "samples=" << rep.samples << '\n';

    RunManifest manifest;
    manifest.command = "gradcheck";
    manifest.set("seed", static_cast<long long>(args.seed));
    manifest.set("alpha", args.alpha);
    manifest.set("duration_ms", elapsed_ms(start));
    emit_manifest(manifest, args.manifest_path);

    if (!result.all_passed) {
        std::cerr << "gradcheck: tolerance failure, worst pixel ("
                  << rep.worst_pixel.first << ',' << rep.worst_pixel.second
                  << "), max_rel_error=" << format_double(rep.max_rel_error)
                  << '\n';
        return exit_tolerance;
    }
    return exit_ok;
}

}  // namespace

void RunManifest::set(const std::string& key, const std::string& value) {
    entries.emplace_back(key, value);
}

void RunManifest::set(const std::string& key, double value) {
    entries.emplace_back(key, format_double(value));
}

void RunManifest::set(const std::string& key, long long value) {
    entries.emplace_back(key, std::to_string(value));
}

const std::string* RunManifest::find(const std::string& key) const {
    for (const auto& [k, v] : entries)
        if (k == key) return &v;
    return nullptr;
}

std::string RunManifest::to_text() const {
    std::ostringstream out;
    out << "command=" << command << '\n';
    for (const auto& [k, v] : entries) out << k << '=' << v << '\n';
    return out.str();
}

RunManifest RunManifest::from_text(const std::string& text) {
    RunManifest manifest;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("manifest: expected key=value, got '" +
                                        line + "'");
        std::string key = line.substr(0, eq), value = line.substr(eq + 1);
        if (first && key == "command") {
            manifest.command = value;
            first = false;
            continue;
        }
        first = false;
        manifest.entries.emplace_back(std::move(key), std::move(value));
    }
    return manifest;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Smooth-morphology skeletons and skeleton-preserving mask refinement"};
    app.require_subcommand(1);

    SkeletonizeArgs skel;
    CLI::App* sk = app.add_subcommand(
        "skeletonize", "Morphological skeleton of a grayscale image");
    sk->add_option("--input", skel.input, "Input PGM image")->required();
    sk->add_option("--output", skel.output, "Output PGM path")->required();
    sk->add_option("--mode", skel.mode, "classic or smooth")
        ->check(CLI::IsMember({"classic", "smooth"}))
        ->capture_default_str();
    sk->add_option("--alpha", skel.alpha, "Smoothing temperature (smooth mode)")
        ->capture_default_str();
    sk->add_option("--levels", skel.levels,
                   "Skeleton depth J (default: auto for classic, 5 for smooth)");
    sk->add_option("--element", skel.element, "Structuring element shape:radius")
        ->capture_default_str();
    sk->add_option("--manifest", skel.manifest_path,
                   "Manifest path (default <output>.manifest)");

    RefineArgs ref;
    CLI::App* rf = app.add_subcommand(
        "refine", "Refine a rough mask against a skeleton prior");
    rf->add_option("--input", ref.input, "Rough mask (PGM)")->required();
    auto* opt_sp = rf->add_option("--skeleton-prior", ref.skeleton_prior,
                                  "Ready skeleton image (PGM)");
    auto* opt_pm = rf->add_option("--prior-mask", ref.prior_mask,
                                  "Prior mask, skeletonized internally (PGM)");
    opt_sp->excludes(opt_pm);
    rf->add_option("--output", ref.output, "Soft output u (PGM)")->required();
    rf->add_option("--binary-output", ref.binary_output,
                   "Optional binarized mask path");
    rf->add_option("--threshold", ref.threshold, "Binarization threshold")
        ->capture_default_str();
    rf->add_option("--trace", ref.trace_path, "Energy/residual trace (CSV)");
    rf->add_option("--manifest", ref.manifest_path,
                   "Manifest path (default <output>.manifest)");
    rf->add_option("--config", ref.config_path, "key=value config file");
    auto* f_gamma = rf->add_option("--gamma", ref.cfg.gamma, "Entropy weight");
    auto* f_lambda = rf->add_option("--lambda", ref.cfg.lambda, "TD weight");
    auto* f_alpha = rf->add_option("--alpha", ref.cfg.alpha, "Morphology temperature");
    auto* f_eta = rf->add_option("--eta", ref.cfg.eta, "Penalty weight");
    auto* f_iota = rf->add_option("--iota", ref.cfg.iota, "w-step size");
    auto* f_k = rf->add_option("--kernel-size", ref.cfg.kernel_size, "TD kernel size");
    auto* f_sigma = rf->add_option("--sigma", ref.cfg.sigma, "TD kernel width");
    auto* f_levels = rf->add_option("--levels", ref.cfg.levels, "Skeleton depth J");
    auto* f_iter = rf->add_option("--max-iter", ref.cfg.max_iter, "Iteration cap T");
    auto* f_tol = rf->add_option("--tol", ref.cfg.tol, "Residual tolerance");
    std::string element_flag;
    auto* f_element = rf->add_option("--element", element_flag,
                                     "Structuring element shape:radius");

    MetricsArgs met;
    CLI::App* mt = app.add_subcommand(
        "metrics", "Segmentation metrics for a prediction/ground-truth pair");
    mt->add_option("--pred", met.pred, "Prediction (PGM)")->required();
    mt->add_option("--gt", met.gt, "Ground truth (PGM)")->required();
    mt->add_option("--threshold", met.threshold, "Prediction threshold")
        ->capture_default_str();
    mt->add_option("--element", met.element, "Structuring element for cl-Dice")
        ->capture_default_str();
    mt->add_option("--manifest", met.manifest_path,
                   "Manifest path (default: stdout)");

    GradcheckArgs gc;
    CLI::App* gck = app.add_subcommand(
        "gradcheck", "Run the numerical oracle suite");
    gck->add_option("--seed", gc.seed, "Random seed")->capture_default_str();
    gck->add_option("--alpha", gc.alpha, "Morphology temperature")
        ->capture_default_str();
    gck->add_flag("--corrupt-gradient", gc.corrupt,
                  "Test hook: perturb the analytic gradient");
    gck->add_option("--manifest", gc.manifest_path,
                    "Manifest path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }

    try {
        if (sk->parsed()) return cmd_skeletonize(skel);
        if (rf->parsed()) {
            if (ref.skeleton_prior.empty() && ref.prior_mask.empty())
                throw std::invalid_argument(
                    "refine: one of --skeleton-prior or --prior-mask is required");
            // File entries first, then explicit flags on top.
            SolverConfig flags = ref.cfg;
            if (!ref.config_path.empty()) {
                ref.cfg = SolverConfig{};
                load_config_file(ref.cfg, ref.config_path);
                if (f_gamma->count()) ref.cfg.gamma = flags.gamma;
                if (f_lambda->count()) ref.cfg.lambda = flags.lambda;
                if (f_alpha->count()) ref.cfg.alpha = flags.alpha;
                if (f_eta->count()) ref.cfg.eta = flags.eta;
                if (f_iota->count()) ref.cfg.iota = flags.iota;
                if (f_k->count()) ref.cfg.kernel_size = flags.kernel_size;
                if (f_sigma->count()) ref.cfg.sigma = flags.sigma;
                if (f_levels->count()) ref.cfg.levels = flags.levels;
                if (f_iter->count()) ref.cfg.max_iter = flags.max_iter;
                if (f_tol->count()) ref.cfg.tol = flags.tol;
            }
            if (f_element->count()) ref.cfg.element = parse_element(element_flag);
            return cmd_refine(ref);
        }
        if (mt->parsed()) return cmd_metrics(met);
        if (gck->parsed()) return cmd_gradcheck(gc);
    } catch (const FileNotFoundError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_missing_file;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_bad_format;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return std::string(e.what()).find("size mismatch") != std::string::npos
                   ? exit_mismatch
                   : exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_numeric;
    }
    return exit_usage;
}

}  // namespace morsp
