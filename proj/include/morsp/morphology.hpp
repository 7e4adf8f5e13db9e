#ifndef MORSP_MORPHOLOGY_HPP
#define MORSP_MORPHOLOGY_HPP

#include "morsp/image.hpp"

namespace morsp {

/// Classical gray-scale morphology. Border policy: the max/min run over
/// in-domain offsets only, so no padding values are invented.

/// Windowed maximum over the element.
GrayImage dilate(const GrayImage& u, const StructuringElement& element);

/// Windowed minimum; satisfies erode(u) == -dilate(-u) exactly.
GrayImage erode(const GrayImage& u, const StructuringElement& element);

/// j-fold erosion; j = 0 returns the input unchanged.
GrayImage erode_n(const GrayImage& u, const StructuringElement& element, int j);

/// Erosion followed by dilation with the same element.
GrayImage open(const GrayImage& u, const StructuringElement& element);

/// Morphological skeleton: sum over levels j of
/// (erode^j u) - open(erode^j u), clamped to [0,1].
GrayImage classic_skeleton(const GrayImage& u, const StructuringElement& element,
                           int levels);

/// Smallest J such that erode^{J+1}(u) is identically zero, capped at 10.
int auto_skeleton_levels(const GrayImage& u, const StructuringElement& element,
                         int cap = 10);

}  // namespace morsp

#endif
