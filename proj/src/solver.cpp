#include "morsp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace morsp {

void SolverConfig::validate() const {
    if (!(gamma > 0.0)) throw std::invalid_argument("SolverConfig: gamma must be > 0");
    if (lambda < 0.0) throw std::invalid_argument("SolverConfig: lambda must be >= 0");
    if (!(alpha > 0.0)) throw std::invalid_argument("SolverConfig: alpha must be > 0");
    if (eta < 0.0) throw std::invalid_argument("SolverConfig: eta must be >= 0");
    if (!(iota > 0.0)) throw std::invalid_argument("SolverConfig: iota must be > 0");
    if (kernel_size < 1 || kernel_size % 2 == 0)
        throw std::invalid_argument("SolverConfig: kernel_size must be odd and >= 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("SolverConfig: sigma must be > 0");
    if (levels < 0) throw std::invalid_argument("SolverConfig: levels must be >= 0");
    if (max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("SolverConfig: tol must be > 0");
    smooth_params().validate();
}

double skeleton_cost(const GrayImage& w, const GrayImage& skel_g,
                     const SmoothParams& params) {
    require_same_shape(w, skel_g, "skeleton_cost");
    GrayImage skel = smooth_skeleton(w, params).skeleton;
    double acc = 0.0;
    for (std::size_t i = 0; i < skel.size(); ++i) {
        double d = skel.data()[i] - skel_g.data()[i];
        acc += d * d;
    }
    return 0.5 * acc;
}

GrayImage skeleton_cost_grad(const GrayImage& w, const GrayImage& skel_g,
                             const SmoothParams& params) {
    require_same_shape(w, skel_g, "skeleton_cost_grad");
    SkeletonResult res = smooth_skeleton(w, params);
    GrayImage residual = res.skeleton;
    for (std::size_t i = 0; i < residual.size(); ++i)
        residual.data()[i] -= skel_g.data()[i];
    return smooth_skeleton_vjp(res.tape, residual);
}

GrayImage update_q(const GrayImage& q, const GrayImage& w, const GrayImage& u) {
    require_same_shape(q, w, "update_q");
    require_same_shape(q, u, "update_q");
    GrayImage out = q;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] = std::clamp(out.data()[i] + w.data()[i] - u.data()[i],
                                   -1.0, 1.0);
    return out;
}

GrayImage update_w(const GrayImage& w, const GrayImage& q_next,
                   const GrayImage& skel_g, const SolverConfig& cfg) {
    require_same_shape(w, q_next, "update_w");
    GrayImage grad = skeleton_cost_grad(w, skel_g, cfg.smooth_params());
    GrayImage out = w;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] -= cfg.iota * (grad.data()[i] + cfg.eta * q_next.data()[i]);
    return out;
}

GrayImage update_u(const GrayImage& o, const GrayImage& p,
                   const GrayImage& q_next, const SolverConfig& cfg) {
    if (!(cfg.gamma > 0.0))
        throw std::invalid_argument("update_u: gamma must be > 0");
    require_same_shape(o, p, "update_u");
    require_same_shape(o, q_next, "update_u");
    GrayImage out(o.height(), o.width());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double arg = (o.data()[i] - p.data()[i] + cfg.eta * q_next.data()[i]) /
                     cfg.gamma;
        out.data()[i] = 1.0 / (1.0 + std::exp(-arg));
    }
    return out;
}

SolverState init_state(const GrayImage& o, const GrayImage& skel_g) {
    require_same_shape(o, skel_g, "init_state");
    SolverState state;
    state.u = GrayImage(o.height(), o.width());
    for (std::size_t i = 0; i < state.u.size(); ++i)
        state.u.data()[i] = 1.0 / (1.0 + std::exp(-o.data()[i]));
    state.w = state.u;
    for (std::size_t i = 0; i < state.w.size(); ++i)
        state.w.data()[i] = 0.5 * (state.u.data()[i] + skel_g.data()[i]);
    state.q = state.w;
    for (std::size_t i = 0; i < state.q.size(); ++i)
        state.q.data()[i] =
            std::clamp(state.w.data()[i] - state.u.data()[i], -1.0, 1.0);
    state.p = GrayImage(o.height(), o.width());
    return state;
}

RefineResult refine(const GrayImage& o, const GrayImage& skeleton_prior,
                    const SolverConfig& cfg) {
    cfg.validate();
    require_same_shape(o, skeleton_prior, "refine");
    if (!o.all_finite())
        throw std::invalid_argument("refine: feature map has non-finite values");

    // The prior is fixed, so its smooth skeleton is computed once.
    GrayImage skel_g =
        smooth_skeleton(skeleton_prior, cfg.smooth_params()).skeleton;
    GaussianKernel kernel = make_gaussian(cfg.kernel_size, cfg.sigma);

    SolverState state = init_state(o, skel_g);
    for (int t = 0; t < cfg.max_iter; ++t) {
        state.q = update_q(state.q, state.w, state.u);
        state.w = update_w(state.w, state.q, skel_g, cfg);
        state.p = td_subgradient(state.u, kernel, cfg.lambda);
        GrayImage u_next = update_u(o, state.p, state.q, cfg);

        double residual = 0.0;
        for (std::size_t i = 0; i < u_next.size(); ++i)
            residual = std::max(residual,
                                std::abs(u_next.data()[i] - state.u.data()[i]));
        state.u = std::move(u_next);
        ++state.iter;

        if (!state.u.all_finite() || !state.w.all_finite() ||
            !state.q.all_finite())
            throw std::runtime_error("refine: non-finite state at iteration " +
                                     std::to_string(state.iter));

        state.energy_trace.push_back(total_energy(state.u, o, kernel, cfg, skel_g));
        state.residual_trace.push_back(residual);
        if (residual < cfg.tol) break;
    }
    return {state.u, std::move(state), std::move(skel_g)};
}

}  // namespace morsp
