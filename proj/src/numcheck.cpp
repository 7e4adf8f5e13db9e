#include "morsp/numcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "morsp/morphology.hpp"

namespace morsp {

namespace {

// splitmix64; bit-stable across platforms, unlike <random> distributions.
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

}  // namespace

GrayImage random_image(int height, int width, std::uint64_t seed, double lo,
                       double hi) {
    Rng rng(seed);
    GrayImage out(height, width);
    for (double& v : out.data()) v = rng.uniform(lo, hi);
    return out;
}

GrayImage finite_diff(const std::function<double(const GrayImage&)>& fn,
                      const GrayImage& u, double step) {
    if (!(step > 0.0))
        throw std::invalid_argument("finite_diff: step must be > 0");
    GrayImage grad(u.height(), u.width());
    GrayImage probe = u;
    for (int r = 0; r < u.height(); ++r) {
        for (int c = 0; c < u.width(); ++c) {
            double saved = probe(r, c);
            probe(r, c) = saved + step;
            double fp = fn(probe);
            probe(r, c) = saved - step;
            double fm = fn(probe);
            probe(r, c) = saved;
            if (!std::isfinite(fp) || !std::isfinite(fm))
                throw std::runtime_error("finite_diff: non-finite functional value");
            grad(r, c) = (fp - fm) / (2.0 * step);
        }
    }
    return grad;
}

DualL1Report dual_l1_check(const GrayImage& y, std::uint64_t seed,
                           int feasible_samples) {
    DualL1Report report;
    report.feasible_samples = feasible_samples;
    for (double v : y.data()) {
        report.l1_norm += std::abs(v);
        double s = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
        report.signed_inner += s * v;
    }
    Rng rng(seed);
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < feasible_samples; ++k) {
        double inner = 0.0;
        for (double v : y.data()) inner += rng.uniform(-1.0, 1.0) * v;
        worst = std::max(worst, inner - report.l1_norm);
    }
    report.max_feasible_gap = feasible_samples > 0 ? worst : 0.0;
    return report;
}

double sandwich_audit(const GrayImage& u, const SmoothParams& params) {
    GrayImage hard = dilate(u, params.element);
    GrayImage smooth = smooth_dilate(u, params);
    double violation = 0.0;
    for (int r = 0; r < u.height(); ++r) {
        for (int c = 0; c < u.width(); ++c) {
            int in_domain = 0;
            for (const Offset& z : params.element.offsets)
                if (u.in_bounds(r + z.dy, c + z.dx)) ++in_domain;
            double lower_gap = hard(r, c) - smooth(r, c);
            double upper_gap =
                smooth(r, c) - hard(r, c) - params.alpha * std::log(in_domain);
            violation = std::max({violation, lower_gap, upper_gap});
        }
    }
    return violation;
}

double pixel_subproblem_value(double u, double o, double p, double q,
                              const SolverConfig& cfg) {
    return (-o + p - cfg.eta * q) * u +
           cfg.gamma * (u * std::log(u) + (1.0 - u) * std::log(1.0 - u));
}

double pixel_subproblem_oracle(double o, double p, double q,
                               const SolverConfig& cfg, int grid_points) {
    if (!(cfg.gamma > 0.0))
        throw std::invalid_argument("pixel_subproblem_oracle: gamma must be > 0");
    constexpr double lo = 1e-6, hi = 1.0 - 1e-6;
    double best_u = lo, best_phi = pixel_subproblem_value(lo, o, p, q, cfg);
    for (int i = 1; i < grid_points; ++i) {
        double u = lo + (hi - lo) * i / (grid_points - 1);
        double phi = pixel_subproblem_value(u, o, p, q, cfg);
        if (phi < best_phi) {
            best_phi = phi;
            best_u = u;
        }
    }
    return best_u;
}

std::vector<std::pair<int, int>> kink_free_pixels(const SkeletonTape& tape,
                                                  double margin) {
    // Two exclusions keep a finite-difference probe at y sound: the
    // pre-ReLU value at y itself must be at least `margin` from the
    // kinks at 0 and 1 (the sampling rule), and nothing the probe can
    // reach - presum pixels within (levels+2) element radii - may sit
    // so close to a kink that a +-1e-5 perturbation crosses it.
    constexpr double cross_eps = 1e-3;
    const GrayImage& presum = tape.presum;
    int radius = tape.params.element.radius * (tape.params.levels + 2);
    std::vector<std::pair<int, int>> good;
    for (int r = 0; r < presum.height(); ++r) {
        for (int c = 0; c < presum.width(); ++c) {
            double s0 = presum(r, c);
            if (std::abs(s0) < margin || std::abs(1.0 - s0) < margin) continue;
            bool ok = true;
            for (int rr = std::max(0, r - radius);
                 ok && rr <= std::min(presum.height() - 1, r + radius); ++rr) {
                for (int cc = std::max(0, c - radius);
                     cc <= std::min(presum.width() - 1, c + radius); ++cc) {
                    double s = presum(rr, cc);
                    if (std::abs(s) < cross_eps || std::abs(1.0 - s) < cross_eps) {
                        ok = false;
                        break;
                    }
                }
            }
            if (ok) good.emplace_back(r, c);
        }
    }
    return good;
}

namespace {

void merge_gradcheck(GradCheckReport& agg, const GradCheckReport& one) {
    if (one.max_rel_error > agg.max_rel_error) {
        agg.max_rel_error = one.max_rel_error;
        agg.worst_pixel = one.worst_pixel;
    }
    agg.max_abs_error = std::max(agg.max_abs_error, one.max_abs_error);
    agg.samples += one.samples;
}

// Compares analytic vs finite-difference gradients on the given pixels.
// Relative error is normalized by the gradient's overall scale so that
// near-zero entries do not blow it up.
GradCheckReport compare_grads(const GrayImage& analytic, const GrayImage& fd,
                              const std::vector<std::pair<int, int>>& pixels,
                              double step) {
    GradCheckReport report;
    report.step = step;
    double scale = 1e-12;
    for (auto [r, c] : pixels)
        scale = std::max({scale, std::abs(fd(r, c)), std::abs(analytic(r, c))});
    for (auto [r, c] : pixels) {
        double abs_err = std::abs(fd(r, c) - analytic(r, c));
        double rel = abs_err / scale;
        if (rel > report.max_rel_error) {
            report.max_rel_error = rel;
            report.worst_pixel = {r, c};
        }
        report.max_abs_error = std::max(report.max_abs_error, abs_err);
        ++report.samples;
    }
    return report;
}

}  // namespace

GradCheckSuiteResult run_gradcheck_suite(std::uint64_t seed, double alpha,
                                         bool corrupt_gradient) {
    GradCheckSuiteResult result;
    const double step = 1e-5;
    const double grad_tol = 1e-3;

    // Skeleton VJP and skeleton-cost gradient vs central differences on
    // at least 50 contributing 12x12 images, J cycling through {0,1,2}.
    {
        GradCheckReport agg;
        agg.step = step;
        long long images_checked = 0;
        for (int trial = 0; trial < 150 && images_checked < 51; ++trial) {
            int levels = trial % 3;
            SmoothParams params{alpha, levels,
                                make_element(ElementShape::square, 1)};
            GrayImage u =
                random_image(12, 12, seed + 101 * trial + 1, 0.1, 0.9);
            SkeletonResult res = smooth_skeleton(u, params);
            auto pixels = kink_free_pixels(res.tape);
            if (pixels.empty()) continue;
            ++images_checked;

            GrayImage skel_g = random_image(12, 12, seed + 101 * trial + 57,
                                            0.0, 1.0);
            GrayImage analytic = skeleton_cost_grad(u, skel_g, params);
            if (corrupt_gradient) {
                auto [r, c] = pixels.front();
                analytic(r, c) += 0.5;
            }
            GrayImage fd = finite_diff(
                [&](const GrayImage& v) { return skeleton_cost(v, skel_g, params); },
                u, step);
            merge_gradcheck(agg, compare_grads(analytic, fd, pixels, step));

            // VJP against a directional derivative with a random cotangent.
            GrayImage cot = random_image(12, 12, seed + 101 * trial + 13,
                                         -1.0, 1.0);
            GrayImage vjp = smooth_skeleton_vjp(res.tape, cot);
            GrayImage mask(12, 12, 0.0);
            for (auto [r, c] : pixels) mask(r, c) = 1.0;
            GrayImage dir = random_image(12, 12, seed + 101 * trial + 29,
                                         -1.0, 1.0);
            for (std::size_t i = 0; i < dir.size(); ++i)
                dir.data()[i] *= mask.data()[i];
            double analytic_dir = 0.0;
            for (std::size_t i = 0; i < dir.size(); ++i)
                analytic_dir += vjp.data()[i] * dir.data()[i];

            GrayImage up = u, dn = u;
            for (std::size_t i = 0; i < u.size(); ++i) {
                up.data()[i] += step * dir.data()[i];
                dn.data()[i] -= step * dir.data()[i];
            }
            auto dot_skel = [&](const GrayImage& v) {
                GrayImage s = smooth_skeleton(v, params).skeleton;
                double acc = 0.0;
                for (std::size_t i = 0; i < s.size(); ++i)
                    acc += s.data()[i] * cot.data()[i];
                return acc;
            };
            double fd_dir = (dot_skel(up) - dot_skel(dn)) / (2.0 * step);
            double denom = std::max({std::abs(fd_dir), std::abs(analytic_dir), 1e-9});
            double rel = std::abs(fd_dir - analytic_dir) / denom;
            GradCheckReport dir_report;
            dir_report.step = step;
            dir_report.max_rel_error = rel;
            dir_report.max_abs_error = std::abs(fd_dir - analytic_dir);
            dir_report.samples = 1;
            merge_gradcheck(agg, dir_report);
        }
        result.report = agg;
        result.gradient_images = images_checked;
        SuiteCheck check{"skeleton_gradients", agg.max_rel_error <= grad_tol,
                         agg.max_rel_error, grad_tol, ""};
        std::ostringstream detail;
        detail << "images=" << images_checked << " samples=" << agg.samples
               << " worst_pixel=(" << agg.worst_pixel.first << ","
               << agg.worst_pixel.second << ")";
        check.detail = detail.str();
        result.checks.push_back(check);
    }

    // Sandwich bound on random images.
    {
        double worst = 0.0;
        SmoothParams params{alpha, 0, make_element(ElementShape::square, 1)};
        for (int trial = 0; trial < 25; ++trial) {
            GrayImage u = random_image(16, 16, seed + 7000 + trial, 0.0, 1.0);
            worst = std::max(worst, sandwich_audit(u, params));
        }
        result.checks.push_back(
            {"sandwich_bound", worst <= 1e-10, worst, 1e-10, "25 images 16x16"});
    }

    // L1 duality: exact sign identity plus feasible inner products.
    {
        double worst_eq = 0.0, worst_gap = -std::numeric_limits<double>::infinity();
        for (int trial = 0; trial < 10; ++trial) {
            GrayImage y = random_image(12, 12, seed + 9000 + trial, -2.0, 2.0);
            DualL1Report rep = dual_l1_check(y, seed + trial);
            worst_eq = std::max(worst_eq, std::abs(rep.l1_norm - rep.signed_inner));
            worst_gap = std::max(worst_gap, rep.max_feasible_gap);
        }
        bool ok = worst_eq == 0.0 && worst_gap <= 0.0;
        std::ostringstream detail;
        detail << "max|l1-signed|=" << worst_eq << " max_gap=" << worst_gap;
        result.checks.push_back({"dual_l1", ok, worst_eq, 0.0, detail.str()});
    }

    // Closed-form u-update vs grid search.
    {
        Rng rng(seed + 31337);
        SolverConfig cfg;
        double worst = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < 200; ++k) {
            double o = rng.uniform(-4.0, 4.0);
            double p = rng.uniform(-1.0, 1.0);
            double q = rng.uniform(-1.0, 1.0);
            double closed =
                1.0 / (1.0 + std::exp(-(o - p + cfg.eta * q) / cfg.gamma));
            double grid = pixel_subproblem_oracle(o, p, q, cfg);
            worst = std::max(worst,
                             pixel_subproblem_value(closed, o, p, q, cfg) -
                                 pixel_subproblem_value(grid, o, p, q, cfg));
        }
        result.checks.push_back({"closed_form_u", worst <= 1e-8, worst, 1e-8,
                                 "200 instances vs 1e4-point grid"});
    }

    for (const SuiteCheck& check : result.checks)
        result.all_passed = result.all_passed && check.passed;
    return result;
}

}  // namespace morsp
