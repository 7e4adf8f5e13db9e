#ifndef MORSP_SOLVER_HPP
#define MORSP_SOLVER_HPP

#include <vector>

#include "morsp/image.hpp"
#include "morsp/smooth_morphology.hpp"
#include "morsp/std_energy.hpp"

namespace morsp {

/// All mask-refinement hyperparameters. Defaults follow the module's
/// published initial setting: k=5, T=20, gamma=1, lambda=1, alpha=0.05,
/// eta=1, iota=1e-2.
struct SolverConfig {
    double gamma = 1.0;    // entropy weight, > 0
    double lambda = 1.0;   // TD weight, >= 0
    double alpha = 0.05;   // morphology temperature, > 0
    double eta = 1.0;      // penalty weight, >= 0
    double iota = 1e-2;    // w-step size, > 0
    int kernel_size = 5;   // odd
    double sigma = 1.0;    // > 0
    int levels = 5;        // skeleton depth J, >= 0
    int max_iter = 20;     // iteration cap T, >= 1
    double tol = 1e-4;     // residual tolerance, > 0
    StructuringElement element = make_element(ElementShape::square, 1);

    void validate() const;
    SmoothParams smooth_params() const { return {alpha, levels, element}; }
};

struct SolverState {
    GrayImage u, w, q, p;
    int iter = 0;
    std::vector<double> energy_trace;
    std::vector<double> residual_trace;  // max|u^{t+1} - u^t| per iteration
};

/// Skeleton-matching cost 0.5 * sum_x (S^alpha(w)(x) - skel_g(x))^2.
double skeleton_cost(const GrayImage& w, const GrayImage& skel_g,
                     const SmoothParams& params);

/// Gradient of skeleton_cost in w: the skeleton VJP applied to the
/// residual S^alpha(w) - skel_g.
GrayImage skeleton_cost_grad(const GrayImage& w, const GrayImage& skel_g,
                             const SmoothParams& params);

/// Dual ascent step q <- clamp(q + (w - u), -1, 1).
GrayImage update_q(const GrayImage& q, const GrayImage& w, const GrayImage& u);

/// Explicit gradient step w <- w - iota * (dC/dw + eta * q). No clamping.
GrayImage update_w(const GrayImage& w, const GrayImage& q_next,
                   const GrayImage& skel_g, const SolverConfig& cfg);

/// Closed-form subproblem solution u = sigmoid((o - p + eta*q) / gamma),
/// strictly inside (0,1).
GrayImage update_u(const GrayImage& o, const GrayImage& p,
                   const GrayImage& q_next, const SolverConfig& cfg);

/// u0 = sigmoid(o), w0 = (u0 + skel_g)/2, q0 = clamp(w0 - u0, -1, 1).
SolverState init_state(const GrayImage& o, const GrayImage& skel_g);

struct RefineResult {
    GrayImage u;
    SolverState state;
    GrayImage skel_g;  // precomputed target skeleton S^alpha(prior)
};

/// Runs the alternating q/w/u scheme on feature map o against the smooth
/// skeleton of the prior. Stops when max|u^{t+1}-u^t| < tol or after
/// max_iter iterations; traces energy and residual per iteration.
/// Throws on non-finite intermediates, reporting the iteration index.
RefineResult refine(const GrayImage& o, const GrayImage& skeleton_prior,
                    const SolverConfig& cfg);

}  // namespace morsp

#endif
