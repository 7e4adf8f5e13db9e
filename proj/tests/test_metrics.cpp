#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "morsp/metrics.hpp"
#include "morsp/morphology.hpp"
#include "test_support.hpp"

using namespace morsp;
using namespace morsp::test;

namespace {

// 4x4 grid with 5 predicted, 6 true, 3 overlapping foreground pixels.
void build_confusion_case(GrayImage& pred, GrayImage& gt) {
    pred = GrayImage(4, 4, 0.0);
    gt = GrayImage(4, 4, 0.0);
    // overlap
    pred(0, 0) = gt(0, 0) = 1.0;
    pred(0, 1) = gt(0, 1) = 1.0;
    pred(1, 0) = gt(1, 0) = 1.0;
    // prediction only
    pred(2, 2) = 1.0;
    pred(2, 3) = 1.0;
    // truth only
    gt(1, 1) = 1.0;
    gt(3, 0) = 1.0;
    gt(3, 3) = 1.0;
}

}  // namespace

TEST_CASE("confusion counts") {
    GrayImage pred, gt;
    build_confusion_case(pred, gt);
    Confusion counts = confusion(pred, gt);
    CHECK(counts.tp == 3);
    CHECK(counts.fp == 2);
    CHECK(counts.fn == 3);
    CHECK(counts.tn == 8);
    CHECK(counts.tp + counts.fp + counts.fn + counts.tn == 16);

    Confusion same = confusion(gt, gt);
    CHECK(same.fp == 0);
    CHECK(same.fn == 0);

    GrayImage complement(4, 4, 0.0);
    for (std::size_t i = 0; i < gt.size(); ++i)
        complement.data()[i] = 1.0 - gt.data()[i];
    Confusion comp = confusion(complement, gt);
    CHECK(comp.tp == 0);
    CHECK(comp.tn == 0);

    GrayImage wrong(3, 4, 0.0);
    CHECK_THROWS_AS(confusion(wrong, gt), std::invalid_argument);
}

TEST_CASE("scores from counts") {
    MetricsReport r = scores({3, 2, 3, 8});
    CHECK(r.precision == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(r.recall == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.f1 == doctest::Approx(6.0 / 11.0).epsilon(1e-15));
    CHECK(r.iou == doctest::Approx(3.0 / 8.0).epsilon(1e-15));

    MetricsReport perfect = scores({10, 0, 0, 6});
    CHECK(perfect.f1 == 1.0);
    CHECK(perfect.iou == 1.0);
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);

    // Empty prediction against nonempty truth: zeros by convention.
    MetricsReport miss = scores({0, 0, 5, 11});
    CHECK(miss.f1 == 0.0);
    CHECK(miss.iou == 0.0);
    CHECK(miss.precision == 0.0);
    CHECK(miss.recall == 0.0);

    // All-empty case scores one.
    MetricsReport empty = scores({0, 0, 0, 16});
    CHECK(empty.f1 == 1.0);
    CHECK(empty.iou == 1.0);
}

TEST_CASE("score invariants on random masks") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        GrayImage pred = noise_image(8, 8, seed, 0.0, 1.0);
        GrayImage gt = noise_image(8, 8, seed + 50, 0.0, 1.0);
        MetricsReport r = scores(confusion(pred, gt));
        CHECK(r.f1 >= 0.0);
        CHECK(r.f1 <= 1.0);
        CHECK(r.iou <= r.f1 + 1e-15);
        if (r.precision + r.recall > 0.0) {
            double harmonic =
                2.0 * r.precision * r.recall / (r.precision + r.recall);
            CHECK(r.f1 == doctest::Approx(harmonic).epsilon(1e-12));
        }
    }
}

TEST_CASE("cl_dice") {
    StructuringElement b = make_element(ElementShape::square, 1);

    GrayImage shape(12, 12, 0.0);
    for (int r = 4; r <= 8; ++r)
        for (int c = 2; c <= 9; ++c) shape(r, c) = 1.0;
    int levels = auto_skeleton_levels(shape, b);
    CHECK(cl_dice(shape, shape, b, levels) == doctest::Approx(1.0).epsilon(1e-12));

    GrayImage empty(12, 12, 0.0);
    CHECK(cl_dice(empty, shape, b, levels) == 0.0);

    // A gap in the line costs topology score.
    GrayImage line(9, 16, 0.0), broken(9, 16, 0.0);
    for (int c = 2; c <= 13; ++c) line(4, c) = 1.0;
    for (int c = 2; c <= 13; ++c)
        if (c < 7 || c > 9) broken(4, c) = 1.0;
    double score = cl_dice(broken, line, b, 1);
    CHECK(score > 0.0);
    CHECK(score < 1.0);
}

TEST_CASE("evaluate produces the full report") {
    GrayImage pred, gt;
    build_confusion_case(pred, gt);
    MetricsReport r = evaluate(pred, gt, 0.5, make_element(ElementShape::square, 1));
    CHECK(r.precision == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(r.recall == doctest::Approx(0.5).epsilon(1e-15));
    REQUIRE(r.cl_dice.has_value());
    CHECK(*r.cl_dice >= 0.0);
    CHECK(*r.cl_dice <= 1.0);

    GrayImage ring(16, 16, 0.0);
    for (int c = 3; c <= 12; ++c) {
        ring(3, c) = ring(12, c) = 1.0;
        ring(c, 3) = ring(c, 12) = 1.0;
    }
    MetricsReport identity = evaluate(ring, ring, 0.5,
                                      make_element(ElementShape::square, 1));
    CHECK(identity.f1 == 1.0);
    REQUIRE(identity.cl_dice.has_value());
    CHECK(*identity.cl_dice == doctest::Approx(1.0).epsilon(1e-12));
}
