#include "morsp/morphology.hpp"

#include <algorithm>
#include <limits>

namespace morsp {

namespace {

enum class Extremum { maximum, minimum };

GrayImage window_extremum(const GrayImage& u, const StructuringElement& element,
                          Extremum kind) {
    GrayImage out(u.height(), u.width());
    for (int r = 0; r < u.height(); ++r) {
        for (int c = 0; c < u.width(); ++c) {
            double best = kind == Extremum::maximum
                              ? -std::numeric_limits<double>::infinity()
                              : std::numeric_limits<double>::infinity();
            for (const Offset& z : element.offsets) {
                int rr = r + z.dy, cc = c + z.dx;
                if (!u.in_bounds(rr, cc)) continue;
                double v = u(rr, cc);
                best = kind == Extremum::maximum ? std::max(best, v)
                                                 : std::min(best, v);
            }
            out(r, c) = best;  // origin is always in-domain, so best is set
        }
    }
    return out;
}

}  // namespace

GrayImage dilate(const GrayImage& u, const StructuringElement& element) {
    return window_extremum(u, element, Extremum::maximum);
}

GrayImage erode(const GrayImage& u, const StructuringElement& element) {
    return window_extremum(u, element, Extremum::minimum);
}

GrayImage erode_n(const GrayImage& u, const StructuringElement& element, int j) {
    if (j < 0)
        throw std::invalid_argument("erode_n: iteration count must be >= 0");
    GrayImage out = u;
    for (int i = 0; i < j; ++i) out = erode(out, element);
    return out;
}

GrayImage open(const GrayImage& u, const StructuringElement& element) {
    return dilate(erode(u, element), element);
}

GrayImage classic_skeleton(const GrayImage& u, const StructuringElement& element,
                           int levels) {
    if (levels < 0)
        throw std::invalid_argument("classic_skeleton: levels must be >= 0");
    GrayImage sum(u.height(), u.width());
    GrayImage eroded = u;
    for (int j = 0; j <= levels; ++j) {
        GrayImage opened = open(eroded, element);
        for (std::size_t i = 0; i < sum.size(); ++i)
            sum.data()[i] += eroded.data()[i] - opened.data()[i];
        if (j < levels) eroded = erode(eroded, element);
    }
    // Clamp mirrors the projection applied to the smooth skeleton.
    for (double& v : sum.data()) v = std::clamp(v, 0.0, 1.0);
    return sum;
}

int auto_skeleton_levels(const GrayImage& u, const StructuringElement& element,
                         int cap) {
    GrayImage eroded = erode(u, element);
    for (int j = 0; j < cap; ++j) {
        bool empty = true;
        for (double v : eroded.data())
            if (v != 0.0) {
                empty = false;
                break;
            }
        if (empty) return j;
        eroded = erode(eroded, element);
    }
    return cap;
}

}  // namespace morsp
