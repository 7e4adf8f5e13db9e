#ifndef MORSP_STD_ENERGY_HPP
#define MORSP_STD_ENERGY_HPP

#include <vector>

#include "morsp/image.hpp"

namespace morsp {

struct SolverConfig;

/// Truncated, unit-sum sampled Gaussian. Symmetric under reflection in
/// both axes; the analytic normalizer is folded into the TD weight.
struct GaussianKernel {
    int size = 1;        // odd, pixels per side
    double sigma = 1.0;  // > 0
    std::vector<double> weights;  // size*size, row-major

    double at(int dy, int dx) const {
        int r = size / 2;
        return weights[static_cast<std::size_t>(dy + r) * size + (dx + r)];
    }
};

GaussianKernel make_gaussian(int size, double sigma);

/// Convolution with replicate-edge borders. The kernel is symmetric, so
/// this equals correlation.
GrayImage convolve_replicate(const GrayImage& u, const GaussianKernel& kernel);

/// Threshold-dynamics boundary energy lambda * <u, f * (1-u)>.
double td_regularizer(const GrayImage& u, const GaussianKernel& kernel,
                      double lambda);

/// Supporting-hyperplane subgradient p = lambda * f * (1 - 2u).
GrayImage td_subgradient(const GrayImage& u, const GaussianKernel& kernel,
                         double lambda);

/// Full model energy: <-o,u> + gamma * binary entropy + R(u) + skeleton
/// cost against a precomputed target skeleton. Entropy logs clamp u to
/// [eps, 1-eps] with eps = 1e-7.
double total_energy(const GrayImage& u, const GrayImage& o,
                    const GaussianKernel& kernel, const SolverConfig& cfg,
                    const GrayImage& skeleton_target);

}  // namespace morsp

#endif
