// Acceptance suite: runs every exit criterion at its stated tolerance and
// prints one pass/fail line per criterion.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "morsp/cli.hpp"
#include "morsp/metrics.hpp"
#include "morsp/morphology.hpp"
#include "morsp/numcheck.hpp"
#include "morsp/pgm_io.hpp"
#include "morsp/smooth_morphology.hpp"
#include "morsp/solver.hpp"
#include "morsp/std_energy.hpp"
#include "scenes.hpp"
#include "test_support.hpp"

using namespace morsp;
using namespace morsp::test;
namespace fs = std::filesystem;

namespace {

int failures = 0;
std::vector<std::pair<int, std::string>> lines;

void report(int criterion, bool passed, const std::string& what,
            const std::string& detail) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), "criterion %2d [%s] %s (%s)", criterion,
                  passed ? "PASS" : "FAIL", what.c_str(), detail.c_str());
    lines.emplace_back(criterion, buf);
    if (!passed) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

int run_cli_args(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("morsp");
    for (const std::string& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// 1. Sandwich bound on 100 random 16x16 images at three temperatures,
//    plus the exact constant-image gap.
void criterion_1() {
    auto start = std::chrono::steady_clock::now();
    StructuringElement b = make_element(ElementShape::square, 1);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        GrayImage u = random_image(16, 16, 1000 + i, 0.0, 1.0);
        for (double alpha : {0.5, 0.1, 0.05})
            worst = std::max(worst, sandwich_audit(u, {alpha, 0, b}));
    }

    double worst_const = 0.0;
    GrayImage constant(16, 16, 0.42);
    for (double alpha : {0.5, 0.1, 0.05}) {
        GrayImage smooth = smooth_dilate(constant, {alpha, 0, b});
        for (int r = 0; r < 16; ++r)
            for (int c = 0; c < 16; ++c) {
                int n = 0;
                for (const Offset& z : b.offsets)
                    if (constant.in_bounds(r + z.dy, c + z.dx)) ++n;
                double gap = smooth(r, c) - constant(r, c);
                worst_const =
                    std::max(worst_const, std::abs(gap - alpha * std::log(n)));
            }
    }
    double elapsed = seconds_since(start);

    std::ostringstream detail;
    detail << "max violation " << worst << ", const-gap error " << worst_const
           << ", " << elapsed << " s";
    report(1, worst <= 1e-10 && worst_const <= 1e-10 && elapsed < 5.0,
           "sandwich bound on 100 random 16x16 images", detail.str());
}

// 2. Kernel reconstruction identity and row normalization.
void criterion_2() {
    SmoothParams p{0.05, 0, make_element(ElementShape::square, 1)};
    double worst_identity = 0.0, worst_norm = 0.0;
    for (int i = 0; i < 20; ++i) {
        GrayImage u = random_image(12, 12, 2000 + i, 0.0, 1.0);
        GrayImage dil = smooth_dilate(u, p);
        for (int r = 0; r < 12; ++r)
            for (int c = 0; c < 12; ++c) {
                KernelWeights kw = dilation_kernel(u, p, r, c);
                double value = 0.0, entropy = 0.0, total = 0.0;
                for (std::size_t k = 0; k < kw.offsets.size(); ++k) {
                    double w = kw.weights[k];
                    value += w * u(r + kw.offsets[k].dy, c + kw.offsets[k].dx);
                    if (w > 0.0) entropy += w * std::log(w);
                    total += w;
                }
                worst_identity = std::max(
                    worst_identity, std::abs(value - p.alpha * entropy - dil(r, c)));
                worst_norm = std::max(worst_norm, std::abs(total - 1.0));
            }
    }
    std::ostringstream detail;
    detail << "identity " << worst_identity << ", normalization " << worst_norm;
    report(2, worst_identity <= 1e-8 && worst_norm <= 1e-9,
           "dilation kernel reconstructs the smooth dilation", detail.str());
}

// 3. Skeleton VJP and skeleton-cost gradient vs finite differences.
void criterion_3() {
    auto start = std::chrono::steady_clock::now();
    GradCheckSuiteResult res = run_gradcheck_suite(42, 0.05);
    double elapsed = seconds_since(start);
    bool gradients_ok = false;
    for (const SuiteCheck& c : res.checks)
        if (c.name == "skeleton_gradients") gradients_ok = c.passed;
    std::ostringstream detail;
    detail << res.gradient_images << " images, " << res.report.samples
           << " samples, max rel err " << res.report.max_rel_error << ", "
           << elapsed << " s";
    report(3, gradients_ok && res.gradient_images >= 50 && elapsed < 60.0,
           "gradients match central finite differences", detail.str());
}

// 4. L1 duality: exact sign identity, feasible inner products below the norm.
void criterion_4() {
    double worst_eq = 0.0, worst_gap = -1.0;
    for (int i = 0; i < 20; ++i) {
        GrayImage y = random_image(16, 16, 4000 + i, -2.0, 2.0);
        DualL1Report rep = dual_l1_check(y, 4100 + i, 100);
        worst_eq = std::max(worst_eq, std::abs(rep.l1_norm - rep.signed_inner));
        worst_gap = std::max(worst_gap, rep.max_feasible_gap);
    }
    std::ostringstream detail;
    detail << "max |l1 - signed inner| " << worst_eq << ", max feasible gap "
           << worst_gap;
    report(4, worst_eq == 0.0 && worst_gap <= 0.0,
           "L1 duality identity and feasibility", detail.str());
}

// 5. Closed-form u-update beats a 1e4-point grid search on 1000 instances.
void criterion_5() {
    SolverConfig cfg;
    std::uint64_t state = 5u;
    auto uniform = [&](double lo, double hi) {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return lo + (hi - lo) * (static_cast<double>(state >> 11) * 0x1.0p-53);
    };
    double worst = -1.0;
    for (int k = 0; k < 1000; ++k) {
        double o = uniform(-5.0, 5.0), p = uniform(-1.0, 1.0), q = uniform(-1.0, 1.0);
        double closed = 1.0 / (1.0 + std::exp(-(o - p + cfg.eta * q) / cfg.gamma));
        double grid = pixel_subproblem_oracle(o, p, q, cfg);
        worst = std::max(worst, pixel_subproblem_value(closed, o, p, q, cfg) -
                                    pixel_subproblem_value(grid, o, p, q, cfg));
    }
    std::ostringstream detail;
    detail << "max phi(closed) - phi(grid) = " << worst;
    report(5, worst <= 1e-8, "closed-form u-update is optimal", detail.str());
}

struct SceneRun {
    double iou_in = 0.0;
    double iou_out = 0.0;
    std::string output_bytes;
    std::string trace_bytes;
};

// 6 & 8 & 9 share the desk-scale refinement runs through the CLI.
void criteria_6_8_9(const fs::path& tmp) {
    auto start = std::chrono::steady_clock::now();
    std::vector<Scene> scenes = desk_scenes();
    std::vector<SceneRun> runs;
    bool cli_ok = true;

    for (std::size_t i = 0; i < scenes.size(); ++i) {
        const Scene& scene = scenes[i];
        std::string stem = (tmp / scene.name).string();
        write_pgm(stem + "_rough.pgm", scene.rough);
        write_pgm(stem + "_prior.pgm", scene.prior);

        std::vector<std::string> args{
            "refine", "--input", stem + "_rough.pgm",
            scene.prior_is_mask ? "--prior-mask" : "--skeleton-prior",
            stem + "_prior.pgm", "--output", stem + "_u.pgm", "--trace",
            stem + "_trace.csv"};
        if (run_cli_args(args) != exit_ok) cli_ok = false;

        SceneRun run;
        GrayImage u = read_pgm(stem + "_u.pgm");
        run.iou_in = iou_against(scene.rough, scene.gt);
        run.iou_out = iou_against(u, scene.gt);
        run.output_bytes = slurp(stem + "_u.pgm");
        run.trace_bytes = slurp(stem + "_trace.csv");
        runs.push_back(run);
    }
    double elapsed = seconds_since(start);

    int improved = 0;
    double gain_sum = 0.0;
    for (const SceneRun& run : runs) {
        if (run.iou_out > run.iou_in) ++improved;
        gain_sum += run.iou_out - run.iou_in;
    }
    double mean_gain = gain_sum / static_cast<double>(runs.size());
    {
        std::ostringstream detail;
        detail << improved << "/10 improved, mean IoU gain " << mean_gain
               << ", " << elapsed << " s";
        report(6,
               cli_ok && improved >= 9 && mean_gain >= 0.05 && elapsed < 30.0,
               "desk-scale mask refinement improves IoU", detail.str());
    }

    // 8. Invariants across the same runs, via the public update steps,
    //    which must reproduce the solver bitwise; plus bit-identical reruns.
    bool invariants_ok = true;
    std::string invariant_detail = "q bounded, u interior, T respected";
    SolverConfig cfg;
    GaussianKernel kernel = make_gaussian(cfg.kernel_size, cfg.sigma);
    for (const Scene& scene : scenes) {
        GrayImage o(scene.rough.height(), scene.rough.width());
        for (std::size_t i = 0; i < o.size(); ++i) {
            double m = std::clamp(scene.rough.data()[i], 1e-4, 1.0 - 1e-4);
            o.data()[i] = std::log(m / (1.0 - m));
        }
        RefineResult res = refine(o, scene.prior, cfg);
        if (res.state.iter > cfg.max_iter) invariants_ok = false;

        GrayImage skel_g =
            smooth_skeleton(scene.prior, cfg.smooth_params()).skeleton;
        SolverState manual = init_state(o, skel_g);
        for (int t = 0; t < cfg.max_iter; ++t) {
            manual.q = update_q(manual.q, manual.w, manual.u);
            manual.w = update_w(manual.w, manual.q, skel_g, cfg);
            manual.p = td_subgradient(manual.u, kernel, cfg.lambda);
            GrayImage u_next = update_u(o, manual.p, manual.q, cfg);
            double residual = 0.0;
            for (std::size_t i = 0; i < u_next.size(); ++i)
                residual = std::max(
                    residual, std::abs(u_next.data()[i] - manual.u.data()[i]));
            manual.u = u_next;
            if (manual.q.max_value() > 1.0 || manual.q.min_value() < -1.0) {
                invariants_ok = false;
                invariant_detail = "q escaped the unit ball";
            }
            if (manual.u.min_value() <= 0.0 || manual.u.max_value() >= 1.0) {
                invariants_ok = false;
                invariant_detail = "u left the open interval";
            }
            if (residual < cfg.tol) break;
        }
        if (!(manual.u == res.u)) {
            invariants_ok = false;
            invariant_detail = "public update steps diverged from refine";
        }
    }

    // Rerun one scene through the CLI and compare bytes.
    {
        const Scene& scene = scenes[0];
        std::string stem = (tmp / (scene.name + "_rerun")).string();
        write_pgm(stem + "_rough.pgm", scene.rough);
        write_pgm(stem + "_prior.pgm", scene.prior);
        if (run_cli_args({"refine", "--input", stem + "_rough.pgm",
                          "--skeleton-prior", stem + "_prior.pgm", "--output",
                          stem + "_u.pgm", "--trace", stem + "_trace.csv"}) !=
            exit_ok)
            invariants_ok = false;
        if (slurp(stem + "_u.pgm") != runs[0].output_bytes ||
            slurp(stem + "_trace.csv") != runs[0].trace_bytes) {
            invariants_ok = false;
            invariant_detail = "rerun was not bit-identical";
        }
    }
    report(8, invariants_ok, "solver invariants hold across refinement runs",
           invariant_detail);

    // 9. Flagless manifest reports the published defaults exactly.
    {
        const Scene& scene = scenes[0];
        std::string stem = (tmp / "defaults").string();
        write_pgm(stem + "_rough.pgm", scene.rough);
        write_pgm(stem + "_prior.pgm", scene.prior);
        bool ok = run_cli_args({"refine", "--input", stem + "_rough.pgm",
                                "--skeleton-prior", stem + "_prior.pgm",
                                "--output", stem + "_u.pgm"}) == exit_ok;
        std::ostringstream detail;
        if (ok) {
            RunManifest manifest =
                RunManifest::from_text(slurp(stem + "_u.pgm.manifest"));
            auto expect = [&](const char* key, const char* value) {
                const std::string* got = manifest.find(key);
                bool match = got && *got == value;
                if (!match) {
                    detail << key << "=" << (got ? *got : "<missing>")
                           << " wanted " << value << "; ";
                    ok = false;
                }
            };
            expect("kernel_size", "5");
            expect("max_iter", "20");
            expect("gamma", "1");
            expect("lambda", "1");
            expect("alpha", "0.05");
            expect("eta", "1");
            expect("iota", "0.01");
        }
        if (ok) detail << "k=5 T=20 gamma=1 lambda=1 alpha=0.05 eta=1 iota=0.01";
        report(9, ok, "flagless refine manifest matches the defaults",
               detail.str());
    }
}

// 7. Smooth operators agree with the classical oracle as alpha shrinks.
void criterion_7() {
    StructuringElement b = make_element(ElementShape::square, 1);
    double worst_skel = 0.0;

    // Binary test shapes: thin line, ring, solid square.
    std::vector<std::pair<GrayImage, int>> shapes;
    {
        GrayImage line(12, 16, 0.0);
        for (int c = 2; c < 14; ++c) line(5, c) = 1.0;
        shapes.emplace_back(line, 1);

        GrayImage ring(16, 16, 0.0);
        for (int i = 4; i <= 11; ++i) {
            ring(4, i) = ring(11, i) = 1.0;
            ring(i, 4) = ring(i, 11) = 1.0;
        }
        shapes.emplace_back(ring, 1);

        GrayImage solid(11, 11, 0.0);
        for (int r = 2; r <= 8; ++r)
            for (int c = 2; c <= 8; ++c) solid(r, c) = 1.0;
        shapes.emplace_back(solid, 3);
    }
    for (const auto& [shape, levels] : shapes) {
        GrayImage classic = classic_skeleton(shape, b, levels);
        GrayImage smooth = smooth_skeleton(shape, {0.01, levels, b}).skeleton;
        worst_skel = std::max(worst_skel, max_abs_diff(smooth, classic));
    }

    // Monotone convergence of the operators across the alpha grid.
    bool monotone = true;
    for (int i = 0; i < 5; ++i) {
        GrayImage u = random_image(12, 12, 7000 + i, 0.0, 1.0);
        GrayImage hard_d = dilate(u, b);
        GrayImage hard_e = erode(u, b);
        double prev_d = 1e300, prev_e = 1e300;
        for (double alpha : {0.5, 0.2, 0.1, 0.05, 0.01}) {
            GrayImage sd = smooth_dilate(u, {alpha, 0, b});
            GrayImage se = smooth_erode(u, {alpha, 0, b});
            double gap_d = max_abs_diff(sd, hard_d);
            double gap_e = max_abs_diff(se, hard_e);
            if (gap_d > prev_d + 1e-15 || gap_e > prev_e + 1e-15) monotone = false;
            prev_d = gap_d;
            prev_e = gap_e;
        }
    }

    std::ostringstream detail;
    detail << "max skeleton deviation " << worst_skel
           << (monotone ? ", gaps monotone in alpha" : ", NON-MONOTONE gaps");
    report(7, worst_skel <= 0.1 && monotone,
           "smooth skeleton tracks the classical oracle", detail.str());
}

// 10. Metric formulas on the constructed confusion case.
void criterion_10() {
    GrayImage pred(4, 4, 0.0), gt(4, 4, 0.0);
    pred(0, 0) = gt(0, 0) = 1.0;
    pred(0, 1) = gt(0, 1) = 1.0;
    pred(1, 0) = gt(1, 0) = 1.0;
    pred(2, 2) = pred(2, 3) = 1.0;
    gt(1, 1) = gt(3, 0) = gt(3, 3) = 1.0;

    MetricsReport r = scores(confusion(pred, gt));
    bool exact = r.precision == 0.6 && r.recall == 0.5 &&
                 r.f1 == 6.0 / 11.0 && r.iou == 3.0 / 8.0;

    MetricsReport same = scores(confusion(gt, gt));
    bool ones = same.f1 == 1.0 && same.iou == 1.0 && same.precision == 1.0 &&
                same.recall == 1.0;

    StructuringElement b = make_element(ElementShape::square, 1);
    bool cl_ok = true;
    {
        GrayImage line(10, 14, 0.0);
        for (int c = 2; c < 12; ++c) line(5, c) = 1.0;
        GrayImage blob(10, 14, 0.0);
        for (int r = 3; r <= 7; ++r)
            for (int c = 3; c <= 10; ++c) blob(r, c) = 1.0;
        for (const GrayImage& g : {line, blob}) {
            int levels = auto_skeleton_levels(g, b);
            if (std::abs(cl_dice(g, g, b, levels) - 1.0) > 1e-12) cl_ok = false;
        }
    }

    std::ostringstream detail;
    detail << "Pre " << r.precision << ", Rec " << r.recall << ", F1 " << r.f1
           << ", IoU " << r.iou << ", cl_dice(gt,gt) " << (cl_ok ? "1" : "off");
    report(10, exact && ones && cl_ok, "metric formulas are exact",
           detail.str());
}

}  // namespace

int main() {
    fs::path tmp = fs::temp_directory_path() /
                   ("morsp_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(tmp);

    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criteria_6_8_9(tmp);
    criterion_7();
    criterion_10();

    fs::remove_all(tmp);
    std::sort(lines.begin(), lines.end());
    for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
