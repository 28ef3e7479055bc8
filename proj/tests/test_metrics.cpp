#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

#include <random>

using namespace endocal;

namespace {

std::mt19937_64& rng() {
    static std::mt19937_64 gen(555);
    return gen;
}

double uni(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

RigidTransform random_transform() {
    return from_euler(Vec3{uni(-50, 50), uni(-50, 50), uni(-50, 50)},
                      Vec3{uni(-179, 179), uni(-89, 89), uni(-179, 179)});
}

}  // namespace

TEST_CASE("box iou hand cases") {
    const BoundingBox2D a{0, 0, 10, 10};
    REQUIRE(box_iou(a, a) == 1.0);
    REQUIRE(box_iou(a, {20, 20, 30, 30}) == 0.0);
    REQUIRE(box_iou(a, {10, 0, 20, 10}) == 0.0);  // touching edge, zero area
    REQUIRE(box_iou(a, {5, 0, 15, 10}) == Catch::Approx(1.0 / 3.0));
    REQUIRE(box_iou(a, {2, 2, 8, 8}) == Catch::Approx(36.0 / 100.0));
    const BoundingBox2D degenerate{5, 5, 5, 5};
    REQUIRE(box_iou(degenerate, degenerate) == 0.0);

    REQUIRE(a.area() == 100.0);
    REQUIRE_THROWS_AS((BoundingBox2D{3, 0, 2, 1}.validate()), OutOfRangeError);
    REQUIRE_NOTHROW(a.validate());
}

TEST_CASE("detection includes the threshold boundary") {
    const BoundingBox2D gt{0, 0, 10, 10};
    const BoundingBox2D half{0, 0, 10, 5};  // IoU exactly 0.5
    REQUIRE(box_iou(half, gt) == 0.5);
    REQUIRE(detected(half, gt, 0.5));
    REQUIRE_FALSE(detected(half, gt, 0.5 + 1e-12));
    REQUIRE(detected(gt, gt, 1.0));
    REQUIRE_THROWS_AS(detected(half, gt, 0.0), OutOfRangeError);
    REQUIRE_THROWS_AS(detected(half, gt, 1.5), OutOfRangeError);
}

TEST_CASE("translation error is the Euclidean gap") {
    RigidTransform a, b;
    a.translation = {1.0, 2.0, 3.0};
    b.translation = {4.0, -2.0, 3.0};
    REQUIRE(translation_error(a, b) == 5.0);
    REQUIRE(translation_error(a, a) == 0.0);
}

TEST_CASE("centerline error ignores rotation about either shaft") {
    for (int i = 0; i < 200; ++i) {
        const RigidTransform a = random_transform();
        const RigidTransform b = random_transform();
        const double base = centerline_angle_error(a, b);

        RigidTransform a_spun = a;
        a_spun.rotation = a.rotation * Mat3::rotation_z(uni(-kPi, kPi));
        RigidTransform b_spun = b;
        b_spun.rotation = b.rotation * Mat3::rotation_z(uni(-kPi, kPi));
        REQUIRE(std::abs(centerline_angle_error(a_spun, b) - base) < 1e-9);
        REQUIRE(std::abs(centerline_angle_error(a, b_spun) - base) < 1e-9);
        REQUIRE(std::abs(centerline_angle_error(a_spun, b_spun) - base) < 1e-9);
    }
}

TEST_CASE("centerline error endpoints are safe") {
    const RigidTransform a = random_transform();
    REQUIRE(centerline_angle_error(a, a) == Catch::Approx(0.0).margin(1e-9));

    RigidTransform flipped = a;
    flipped.rotation = a.rotation * Mat3::rotation_x(kPi);  // z-axis negated
    REQUIRE(centerline_angle_error(a, flipped) == Catch::Approx(180.0).margin(1e-6));

    RigidTransform quarter;
    quarter.rotation = Mat3::rotation_x(kPi / 2.0);
    REQUIRE(centerline_angle_error(RigidTransform::identity(), quarter) ==
            Catch::Approx(90.0).margin(1e-9));
}

TEST_CASE("average precision follows the hand enumeration") {
    // one image, one class, three ground truths, four score-ordered
    // predictions: TP, duplicate-FP, TP, miss-FP
    const std::vector<GroundTruthRecord> gts = {
        {0, 0, {0, 0, 10, 10}},
        {0, 0, {20, 0, 30, 10}},
        {0, 0, {40, 0, 50, 10}},
    };
    const std::vector<DetectionRecord> dets = {
        {0, 0, {0, 0, 10, 9}, 0.95},    // IoU 0.9 with gt0: TP
        {0, 0, {0, 0, 10, 8}, 0.90},    // gt0 already taken: FP
        {0, 0, {20, 0, 30, 9}, 0.85},   // IoU 0.9 with gt1: TP
        {0, 0, {70, 0, 80, 10}, 0.80},  // overlaps nothing: FP
    };
    // precision curve (1, 1/2, 2/3, 1/2), envelope (1, 2/3, 2/3, 1/2),
    // recall steps at 1/3 and 2/3
    const double want = (1.0 / 3.0) * 1.0 + (1.0 / 3.0) * (2.0 / 3.0);
    REQUIRE(mean_average_precision(dets, gts) == Catch::Approx(want).margin(1e-9));
}

TEST_CASE("average precision corner cases") {
    REQUIRE(mean_average_precision({{0, 0, {0, 0, 1, 1}, 0.9}}, {}) == 0.0);
    REQUIRE(mean_average_precision({}, {{0, 0, {0, 0, 1, 1}}}) == 0.0);

    // detections only match ground truth from the same image
    const std::vector<GroundTruthRecord> gts = {{1, 0, {0, 0, 10, 10}}};
    REQUIRE(mean_average_precision({{2, 0, {0, 0, 10, 10}, 0.9}}, gts) == 0.0);
    REQUIRE(mean_average_precision({{1, 0, {0, 0, 10, 10}, 0.9}}, gts) == 1.0);

    REQUIRE_THROWS_AS(mean_average_precision({}, gts, 2.0), OutOfRangeError);
}

TEST_CASE("mean over classes counts only classes with ground truth") {
    const std::vector<GroundTruthRecord> gts = {
        {0, 1, {0, 0, 10, 10}},
        {0, 2, {20, 0, 30, 10}},
    };
    const std::vector<DetectionRecord> dets = {
        {0, 1, {0, 0, 10, 10}, 0.9},   // class 1: perfect, AP 1
        {0, 2, {50, 0, 60, 10}, 0.9},  // class 2: miss, AP 0
        {0, 7, {0, 0, 10, 10}, 0.9},   // class without gt: ignored
    };
    REQUIRE(mean_average_precision(dets, gts) == Catch::Approx(0.5));
}

TEST_CASE("greedy matching takes detections in score order") {
    // the low-score detection fits the gt better, but the high-score one
    // claims it first
    const std::vector<GroundTruthRecord> gts = {{0, 0, {0, 0, 10, 10}}};
    const std::vector<DetectionRecord> dets = {
        {0, 0, {0, 0, 10, 8}, 0.9},    // IoU 0.8: claims the gt
        {0, 0, {0, 0, 10, 10}, 0.5},   // IoU 1.0 but too late: FP
    };
    // curve: (1, 1/2) at recalls (1, 1) -> AP = 1
    REQUIRE(mean_average_precision(dets, gts) == 1.0);

    // reversed scores: identical AP here, but the match goes to the exact box
    const std::vector<DetectionRecord> swapped = {
        {0, 0, {0, 0, 10, 8}, 0.5},
        {0, 0, {0, 0, 10, 10}, 0.9},
    };
    REQUIRE(mean_average_precision(swapped, gts) == 1.0);
}

TEST_CASE("summarize reports means over detected pairs only") {
    std::vector<EvaluationPair> pairs(3);

    pairs[0].gt_box = {0, 0, 10, 10};
    pairs[0].pred_box = {0, 0, 10, 10};
    pairs[0].gt_pose = from_euler(Vec3{0, 0, 20}, Vec3{0, 0, 0});
    pairs[0].pred_pose = from_euler(Vec3{0, 0, 23}, Vec3{0, 0, 30});  // 3 mm, yaw only
    pairs[0].score = 0.9;

    pairs[1].gt_box = {0, 0, 10, 10};
    pairs[1].pred_box = {5, 0, 15, 10};  // IoU 1/3: not detected at 0.5
    pairs[1].gt_pose = RigidTransform::identity();
    pairs[1].pred_pose = from_euler(Vec3{9, 9, 9}, Vec3{40, 0, 0});
    pairs[1].score = 0.8;

    pairs[2].gt_box = {30, 30, 40, 40};
    pairs[2].has_prediction = false;

    const PoseErrorSummary s = summarize(pairs);
    REQUIRE(s.detected_rate_pct == Catch::Approx(100.0 / 3.0));
    REQUIRE(s.mean_translation_mm.has_value());
    REQUIRE(*s.mean_translation_mm == Catch::Approx(3.0).margin(1e-12));
    REQUIRE(*s.mean_centerline_deg == Catch::Approx(0.0).margin(1e-9));
    REQUIRE(s.map_at_50 == Catch::Approx(1.0 / 3.0).margin(1e-12));
}

TEST_CASE("summarize with nothing detected leaves the means absent") {
    std::vector<EvaluationPair> pairs(2);
    pairs[0].gt_box = {0, 0, 10, 10};
    pairs[0].has_prediction = false;
    pairs[1].gt_box = {20, 20, 30, 30};
    pairs[1].pred_box = {100, 100, 110, 110};
    const PoseErrorSummary s = summarize(pairs);
    REQUIRE_FALSE(s.mean_translation_mm.has_value());
    REQUIRE_FALSE(s.mean_centerline_deg.has_value());
    REQUIRE(s.detected_rate_pct == 0.0);
    REQUIRE(s.map_at_50 == 0.0);

    REQUIRE_THROWS_AS(summarize({}), NoPairsError);
}
