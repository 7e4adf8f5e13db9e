#include "morsp/metrics.hpp"

#include "morsp/morphology.hpp"

namespace morsp {

Confusion confusion(const GrayImage& pred, const GrayImage& gt,
                    double threshold) {
    require_same_shape(pred, gt, "confusion");
    Confusion counts;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        bool p = pred.data()[i] > threshold;
        bool g = gt.data()[i] > 0.5;
        if (p && g) ++counts.tp;
        else if (p && !g) ++counts.fp;
        else if (!p && g) ++counts.fn;
        else ++counts.tn;
    }
    return counts;
}

namespace {

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

MetricsReport scores(const Confusion& counts) {
    if (counts.tp < 0 || counts.fp < 0 || counts.fn < 0 || counts.tn < 0)
        throw std::invalid_argument("scores: counts must be nonnegative");
    MetricsReport report;
    report.tp = counts.tp;
    report.fp = counts.fp;
    report.fn = counts.fn;
    report.tn = counts.tn;
    if (counts.tp == 0 && counts.fp == 0 && counts.fn == 0) {
        // Both prediction and truth empty: perfect agreement.
        report.f1 = report.iou = report.precision = report.recall = 1.0;
        return report;
    }
    double tp = static_cast<double>(counts.tp);
    report.precision = ratio(tp, tp + counts.fp);
    report.recall = ratio(tp, tp + counts.fn);
    report.f1 = ratio(2.0 * tp, 2.0 * tp + counts.fp + counts.fn);
    report.iou = ratio(tp, tp + counts.fp + counts.fn);
    return report;
}

double cl_dice(const GrayImage& pred, const GrayImage& gt,
               const StructuringElement& element, int levels) {
    require_same_shape(pred, gt, "cl_dice");
    GrayImage skel_pred = classic_skeleton(pred, element, levels);
    GrayImage skel_gt = classic_skeleton(gt, element, levels);
    double skel_pred_l1 = 0.0, skel_gt_l1 = 0.0;
    double prec_num = 0.0, sens_num = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        skel_pred_l1 += skel_pred.data()[i];
        skel_gt_l1 += skel_gt.data()[i];
        prec_num += gt.data()[i] * skel_pred.data()[i];
        sens_num += skel_gt.data()[i] * pred.data()[i];
    }
    if (skel_pred_l1 <= 0.0 || skel_gt_l1 <= 0.0) return 0.0;
    double t_prec = prec_num / skel_pred_l1;
    double t_sens = sens_num / skel_gt_l1;
    if (t_prec + t_sens <= 0.0) return 0.0;
    return 2.0 * t_prec * t_sens / (t_prec + t_sens);
}

MetricsReport evaluate(const GrayImage& pred, const GrayImage& gt,
                       double threshold, const StructuringElement& element) {
    MetricsReport report = scores(confusion(pred, gt, threshold));
    int levels_pred = auto_skeleton_levels(pred, element);
    int levels_gt = auto_skeleton_levels(gt, element);
    report.cl_dice = cl_dice(pred, gt, element, std::max(levels_pred, levels_gt));
    return report;
}

}  // namespace morsp
