#include "morsp/std_energy.hpp"

#include <algorithm>
#include <cmath>

#include "morsp/solver.hpp"

namespace morsp {

GaussianKernel make_gaussian(int size, double sigma) {
    if (size < 1 || size % 2 == 0)
        throw std::invalid_argument("make_gaussian: size must be odd and >= 1");
    if (!(sigma > 0.0))
        throw std::invalid_argument("make_gaussian: sigma must be > 0");
    GaussianKernel kernel;
    kernel.size = size;
    kernel.sigma = sigma;
    kernel.weights.resize(static_cast<std::size_t>(size) * size);
    int r = size / 2;
    double sum = 0.0;
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            double w = std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
            kernel.weights[static_cast<std::size_t>(dy + r) * size + (dx + r)] = w;
            sum += w;
        }
    }
    for (double& w : kernel.weights) w /= sum;
    return kernel;
}

GrayImage convolve_replicate(const GrayImage& u, const GaussianKernel& kernel) {
    GrayImage out(u.height(), u.width());
    int r = kernel.size / 2;
    for (int y = 0; y < u.height(); ++y) {
        for (int x = 0; x < u.width(); ++x) {
            double acc = 0.0;
            for (int dy = -r; dy <= r; ++dy) {
                int yy = std::clamp(y + dy, 0, u.height() - 1);
                for (int dx = -r; dx <= r; ++dx) {
                    int xx = std::clamp(x + dx, 0, u.width() - 1);
                    acc += kernel.at(dy, dx) * u(yy, xx);
                }
            }
            out(y, x) = acc;
        }
    }
    return out;
}

double td_regularizer(const GrayImage& u, const GaussianKernel& kernel,
                      double lambda) {
    GrayImage ones_minus = u;
    for (double& v : ones_minus.data()) v = 1.0 - v;
    GrayImage smoothed = convolve_replicate(ones_minus, kernel);
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        acc += u.data()[i] * smoothed.data()[i];
    return lambda * acc;
}

GrayImage td_subgradient(const GrayImage& u, const GaussianKernel& kernel,
                         double lambda) {
    GrayImage arg = u;
    for (double& v : arg.data()) v = 1.0 - 2.0 * v;
    GrayImage out = convolve_replicate(arg, kernel);
    for (double& v : out.data()) v *= lambda;
    return out;
}

double total_energy(const GrayImage& u, const GrayImage& o,
                    const GaussianKernel& kernel, const SolverConfig& cfg,
                    const GrayImage& skeleton_target) {
    require_same_shape(u, o, "total_energy");
    require_same_shape(u, skeleton_target, "total_energy");
    constexpr double eps = 1e-7;  // sigmoids never reach 0/1; file data can
    double fidelity = 0.0, entropy = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double v = u.data()[i];
        fidelity += -o.data()[i] * v;
        double vc = std::clamp(v, eps, 1.0 - eps);
        entropy += vc * std::log(vc) + (1.0 - vc) * std::log(1.0 - vc);
    }
    return fidelity + cfg.gamma * entropy + td_regularizer(u, kernel, cfg.lambda) +
           skeleton_cost(u, skeleton_target, cfg.smooth_params());
}

}  // namespace morsp
