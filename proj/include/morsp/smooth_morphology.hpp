#ifndef MORSP_SMOOTH_MORPHOLOGY_HPP
#define MORSP_SMOOTH_MORPHOLOGY_HPP

#include <vector>

#include "morsp/image.hpp"

namespace morsp {

/// Temperature and depth of the log-sum-exp morphology.
struct SmoothParams {
    double alpha = 0.05;  // smoothing temperature, > 0
    int levels = 5;       // skeleton depth J, >= 0
    StructuringElement element = make_element(ElementShape::square, 1);

    void validate() const;
};

/// Log-sum-exp dilation: out(x) = alpha * ln sum_{z in B(x)} exp(u(x+z)/alpha),
/// computed with a max shift. Sandwiched between the hard dilation and
/// the hard dilation + alpha*ln|B(x)| (in-domain window count).
GrayImage smooth_dilate(const GrayImage& u, const SmoothParams& params);

/// -smooth_dilate(-u), sandwiched below the hard erosion.
GrayImage smooth_erode(const GrayImage& u, const SmoothParams& params);

/// Softmax weights over the in-domain window at one pixel. Weights sum
/// to 1; the weighted value minus the alpha-entropy reconstructs
/// smooth_dilate at that pixel.
struct KernelWeights {
    std::vector<Offset> offsets;  // in-domain subset of the element
    std::vector<double> weights;  // same length, nonnegative, sums to 1
};

KernelWeights dilation_kernel(const GrayImage& u, const SmoothParams& params,
                              int r, int c);

/// min(max(u,0),1), realized as ReLU(1 - ReLU(1 - u)).
GrayImage project_unit(const GrayImage& u);

/// Every intermediate of one smooth-skeleton evaluation, kept for the
/// reverse-mode pass. erosions holds e^0 = u through e^{J+1}.
struct SkeletonTape {
    SmoothParams params;
    std::vector<GrayImage> erosions;   // levels+2 entries
    std::vector<GrayImage> dilations;  // D^alpha(e^{j+1}), j = 0..J
    std::vector<GrayImage> levels;     // S_j^alpha = e^j - dilations[j]
    GrayImage presum;                  // sum_j S_j^alpha
    GrayImage skeleton;                // projected result, in [0,1]
};

struct SkeletonResult {
    GrayImage skeleton;
    SkeletonTape tape;
};

/// Smooth morphological skeleton with projection:
/// Proj(sum_j e^j - D^alpha(e^{j+1})), e^j the j-fold smooth erosion.
SkeletonResult smooth_skeleton(const GrayImage& u, const SmoothParams& params);

/// Applies the transposed derivative of smooth_skeleton to a cotangent
/// image by reverse traversal of the tape. ReLU factors use the step
/// convention H(t) = 1 for t > 0, else 0; softmax/softmin kernels give
/// the per-stage adjoints.
GrayImage smooth_skeleton_vjp(const SkeletonTape& tape, const GrayImage& cotangent);

}  // namespace morsp

#endif
