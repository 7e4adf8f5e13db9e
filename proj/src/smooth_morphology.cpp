#include "morsp/smooth_morphology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace morsp {

namespace {

double heaviside(double t) { return t > 0.0 ? 1.0 : 0.0; }

GrayImage negate(const GrayImage& u) {
    GrayImage out = u;
    for (double& v : out.data()) v = -v;
    return out;
}

// Stable log-sum-exp over the in-domain window at every pixel:
// out(x) = m + alpha * ln sum exp((v - m)/alpha), m the window max.
// The max term contributes exactly 1, so out >= m holds in floating point.
GrayImage lse_dilate(const GrayImage& u, const SmoothParams& params) {
    GrayImage out(u.height(), u.width());
    for (int r = 0; r < u.height(); ++r) {
        for (int c = 0; c < u.width(); ++c) {
            double m = -std::numeric_limits<double>::infinity();
            for (const Offset& z : params.element.offsets) {
                int rr = r + z.dy, cc = c + z.dx;
                if (u.in_bounds(rr, cc)) m = std::max(m, u(rr, cc));
            }
            double sum = 0.0;
            for (const Offset& z : params.element.offsets) {
                int rr = r + z.dy, cc = c + z.dx;
                if (u.in_bounds(rr, cc))
                    sum += std::exp((u(rr, cc) - m) / params.alpha);
            }
            out(r, c) = m + params.alpha * std::log(sum);
        }
    }
    return out;
}

// Scatters cot(x) * softmax_weight(x, z) into out(x+z); this is the
// adjoint of lse_dilate evaluated at base. With flip_sign the weights
// come from -base (the smooth-erosion kernel).
void scatter_kernel_adjoint(const GrayImage& base, const GrayImage& cot,
                            const SmoothParams& params, bool flip_sign,
                            double scale, GrayImage& out) {
    std::vector<double> vals(params.element.offsets.size());
    std::vector<int> rows(vals.size()), cols(vals.size());
    for (int r = 0; r < base.height(); ++r) {
        for (int c = 0; c < base.width(); ++c) {
            double factor = scale * cot(r, c);
            if (factor == 0.0) continue;
            std::size_t n = 0;
            double m = -std::numeric_limits<double>::infinity();
            for (const Offset& z : params.element.offsets) {
                int rr = r + z.dy, cc = c + z.dx;
                if (!base.in_bounds(rr, cc)) continue;
                double v = flip_sign ? -base(rr, cc) : base(rr, cc);
                vals[n] = v;
                rows[n] = rr;
                cols[n] = cc;
                m = std::max(m, v);
                ++n;
            }
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                vals[i] = std::exp((vals[i] - m) / params.alpha);
                sum += vals[i];
            }
            for (std::size_t i = 0; i < n; ++i)
                out(rows[i], cols[i]) += factor * vals[i] / sum;
        }
    }
}

double relu(double t) { return t > 0.0 ? t : 0.0; }

}  // namespace

void SmoothParams::validate() const {
    if (!(alpha > 0.0))
        throw std::invalid_argument("SmoothParams: alpha must be > 0");
    if (levels < 0)
        throw std::invalid_argument("SmoothParams: levels must be >= 0");
    bool has_origin = false;
    for (const Offset& z : element.offsets)
        if (z.dy == 0 && z.dx == 0) has_origin = true;
    if (!has_origin)
        throw std::invalid_argument("SmoothParams: element must contain the origin");
}

GrayImage smooth_dilate(const GrayImage& u, const SmoothParams& params) {
    params.validate();
    return lse_dilate(u, params);
}

GrayImage smooth_erode(const GrayImage& u, const SmoothParams& params) {
    params.validate();
    return negate(lse_dilate(negate(u), params));
}

KernelWeights dilation_kernel(const GrayImage& u, const SmoothParams& params,
                              int r, int c) {
    params.validate();
    if (!u.in_bounds(r, c))
        throw std::out_of_range("dilation_kernel: pixel out of bounds");
    KernelWeights kw;
    double m = -std::numeric_limits<double>::infinity();
    for (const Offset& z : params.element.offsets) {
        int rr = r + z.dy, cc = c + z.dx;
        if (!u.in_bounds(rr, cc)) continue;
        kw.offsets.push_back(z);
        m = std::max(m, u(rr, cc));
    }
    double sum = 0.0;
    for (const Offset& z : kw.offsets) {
        double e = std::exp((u(r + z.dy, c + z.dx) - m) / params.alpha);
        kw.weights.push_back(e);
        sum += e;
    }
    for (double& w : kw.weights) w /= sum;
    return kw;
}

GrayImage project_unit(const GrayImage& u) {
    GrayImage out = u;
    for (double& v : out.data()) v = relu(1.0 - relu(1.0 - v));
    return out;
}

SkeletonResult smooth_skeleton(const GrayImage& u, const SmoothParams& params) {
    params.validate();
    SkeletonTape tape;
    tape.params = params;
    tape.erosions.reserve(params.levels + 2);
    tape.erosions.push_back(u);
    for (int i = 1; i <= params.levels + 1; ++i)
        tape.erosions.push_back(smooth_erode(tape.erosions.back(), params));

    tape.presum = GrayImage(u.height(), u.width());
    for (int j = 0; j <= params.levels; ++j) {
        tape.dilations.push_back(lse_dilate(tape.erosions[j + 1], params));
        GrayImage level = tape.erosions[j];
        for (std::size_t i = 0; i < level.size(); ++i) {
            level.data()[i] -= tape.dilations[j].data()[i];
            tape.presum.data()[i] += level.data()[i];
        }
        tape.levels.push_back(std::move(level));
    }
    tape.skeleton = project_unit(tape.presum);
    return {tape.skeleton, tape};
}

GrayImage smooth_skeleton_vjp(const SkeletonTape& tape, const GrayImage& cotangent) {
    const SmoothParams& params = tape.params;
    if (tape.erosions.size() != static_cast<std::size_t>(params.levels) + 2)
        throw std::invalid_argument("smooth_skeleton_vjp: malformed tape");
    require_same_shape(tape.presum, cotangent, "smooth_skeleton_vjp");

    // Both ReLU factors of the projection, with H(0) = 0.
    GrayImage cot_sum = cotangent;
    for (std::size_t i = 0; i < cot_sum.size(); ++i) {
        double s = tape.presum.data()[i];
        cot_sum.data()[i] *= heaviside(1.0 - relu(1.0 - s)) * heaviside(1.0 - s);
    }

    std::vector<GrayImage> cot_erosions(
        tape.erosions.size(), GrayImage(cotangent.height(), cotangent.width()));

    for (int j = 0; j <= params.levels; ++j) {
        for (std::size_t i = 0; i < cot_sum.size(); ++i)
            cot_erosions[j].data()[i] += cot_sum.data()[i];
        scatter_kernel_adjoint(tape.erosions[j + 1], cot_sum, params,
                               /*flip_sign=*/false, -1.0, cot_erosions[j + 1]);
    }
    // e^i = -D^alpha(-e^{i-1}); its adjoint correlates with the softmin
    // kernel of the previous stage.
    for (int i = params.levels + 1; i >= 1; --i)
        scatter_kernel_adjoint(tape.erosions[i - 1], cot_erosions[i], params,
                               /*flip_sign=*/true, 1.0, cot_erosions[i - 1]);
    return std::move(cot_erosions[0]);
}

}  // namespace morsp
