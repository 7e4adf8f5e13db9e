#ifndef MORSP_NUMCHECK_HPP
#define MORSP_NUMCHECK_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "morsp/image.hpp"
#include "morsp/smooth_morphology.hpp"
#include "morsp/solver.hpp"

namespace morsp {

struct GradCheckReport {
    double max_rel_error = 0.0;
    double max_abs_error = 0.0;
    std::pair<int, int> worst_pixel{0, 0};
    double step = 1e-5;
    long long samples = 0;
};

/// Central differences (fn(u + h e_x) - fn(u - h e_x)) / (2h) per pixel.
GrayImage finite_diff(const std::function<double(const GrayImage&)>& fn,
                      const GrayImage& u, double step);

struct DualL1Report {
    double l1_norm = 0.0;
    double signed_inner = 0.0;        // <sign(y), y>, sign(0) = 0
    double max_feasible_gap = 0.0;    // max over sampled q of <q,y> - ||y||_1
    int feasible_samples = 0;
};

/// Checks ||y||_1 = <sign(y), y> and <q,y> <= ||y||_1 for random
/// feasible q with ||q||_inf <= 1.
DualL1Report dual_l1_check(const GrayImage& y, std::uint64_t seed = 7,
                           int feasible_samples = 100);

/// Max violation of the dilation sandwich bound
/// D(u) <= D^alpha(u) <= D(u) + alpha*ln|B(x)| over all pixels.
double sandwich_audit(const GrayImage& u, const SmoothParams& params);

/// Grid-search minimizer of the per-pixel subproblem
/// phi(u) = (-o + p - eta*q) u + gamma (u ln u + (1-u) ln(1-u))
/// over grid_points samples of [1e-6, 1-1e-6].
double pixel_subproblem_oracle(double o, double p, double q,
                               const SolverConfig& cfg, int grid_points = 10000);

double pixel_subproblem_value(double u, double o, double p, double q,
                              const SolverConfig& cfg);

/// Random images with per-pixel uniform values in [lo, hi]; splitmix-fed
/// mt19937 and explicit scaling keep results identical across platforms.
GrayImage random_image(int height, int width, std::uint64_t seed,
                       double lo = 0.0, double hi = 1.0);

/// Pixels whose influence zone stays clear of the projection kinks
/// (pre-ReLU values at least `margin` from 0). Gradient checks compare
/// only there; the true map is nondifferentiable at the kinks.
std::vector<std::pair<int, int>> kink_free_pixels(const SkeletonTape& tape,
                                                  double margin = 0.05);

struct SuiteCheck {
    std::string name;
    bool passed = false;
    double worst = 0.0;       // worst observed value
    double tolerance = 0.0;
    std::string detail;
};

struct GradCheckSuiteResult {
    std::vector<SuiteCheck> checks;
    GradCheckReport report;  // aggregated over the gradient checks
    long long gradient_images = 0;  // images that contributed samples
    bool all_passed = true;
};

/// Full oracle suite: skeleton VJP, skeleton-cost gradient, sandwich
/// audit, L1 duality, and the closed-form u-update against grid search.
/// corrupt_gradient is a test hook that perturbs the analytic gradient
/// so the negative control fails.
GradCheckSuiteResult run_gradcheck_suite(std::uint64_t seed, double alpha,
                                         bool corrupt_gradient = false);

}  // namespace morsp

#endif
