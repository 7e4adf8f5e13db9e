#ifndef MORSP_METRICS_HPP
#define MORSP_METRICS_HPP

#include <optional>

#include "morsp/image.hpp"

namespace morsp {

struct Confusion {
    long long tp = 0, fp = 0, fn = 0, tn = 0;
};

/// Pixel counts with pred binarized at `threshold` (strictly greater)
/// and gt binarized at 0.5.
Confusion confusion(const GrayImage& pred, const GrayImage& gt,
                    double threshold = 0.5);

struct MetricsReport {
    double f1 = 0.0, iou = 0.0, precision = 0.0, recall = 0.0;
    std::optional<double> cl_dice;
    long long tp = 0, fp = 0, fn = 0, tn = 0;
};

/// F1, IoU, precision, recall from counts. Zero denominators score 0,
/// except the all-empty case (no foreground in either image) which
/// scores 1.
MetricsReport scores(const Confusion& counts);

/// Topology score: harmonic mean of skeleton precision
/// <g, S(pred)> / ||S(pred)||_1 and sensitivity <S(g), pred> / ||S(g)||_1,
/// with S the classical skeleton. Empty skeleton scores 0.
double cl_dice(const GrayImage& pred, const GrayImage& gt,
               const StructuringElement& element, int levels);

/// Full report; skeleton depth for cl-Dice picked per image by the
/// auto-level rule.
MetricsReport evaluate(const GrayImage& pred, const GrayImage& gt,
                       double threshold, const StructuringElement& element);

}  // namespace morsp

#endif
