#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "endocal/errors.hpp"
#include "endocal/geometry.hpp"

namespace endocal {

struct BoundingBox2D {
    double u_min = 0.0;
    double v_min = 0.0;
    double u_max = 0.0;
    double v_max = 0.0;

    void validate() const {
        if (u_min > u_max || v_min > v_max)
            throw OutOfRangeError("bounding box with min > max");
    }
    double area() const { return (u_max - u_min) * (v_max - v_min); }
};

inline double box_iou(const BoundingBox2D& a, const BoundingBox2D& b) {
    const double iu0 = std::max(a.u_min, b.u_min);
    const double iv0 = std::max(a.v_min, b.v_min);
    const double iu1 = std::min(a.u_max, b.u_max);
    const double iv1 = std::min(a.v_max, b.v_max);
    const double inter = std::max(0.0, iu1 - iu0) * std::max(0.0, iv1 - iv0);
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) return 0.0;
    return inter / uni;
}

inline constexpr double kDetectionIouThreshold = 0.5;

inline bool detected(const BoundingBox2D& pred, const BoundingBox2D& gt,
                     double thr = kDetectionIouThreshold) {
    if (!(thr > 0.0 && thr <= 1.0)) throw OutOfRangeError("detection threshold outside (0, 1]");
    return box_iou(pred, gt) >= thr;
}

inline double translation_error(const RigidTransform& a, const RigidTransform& b) {
    return (a.translation - b.translation).norm();
}

/// Angle between the two frames' z-axes (the shaft direction), in
/// degrees. Invariant to rotation about either shaft by construction.
inline double centerline_angle_error(const RigidTransform& a, const RigidTransform& b) {
    const Vec3 za = a.rotation.col(2);
    const Vec3 zb = b.rotation.col(2);
    return rad_to_deg(std::acos(std::clamp(za.dot(zb), -1.0, 1.0)));
}

struct DetectionRecord {
    std::int64_t image_id = 0;
    int class_id = 0;
    BoundingBox2D box;
    double score = 0.0;
};

struct GroundTruthRecord {
    std::int64_t image_id = 0;
    int class_id = 0;
    BoundingBox2D box;
};

/// Score-sorted greedy matching at IoU >= thr with one match per ground
/// truth; AP is the area under the all-points-interpolated
/// precision-recall curve, averaged over classes that have ground truth.
inline double mean_average_precision(const std::vector<DetectionRecord>& detections,
                                     const std::vector<GroundTruthRecord>& ground_truths,
                                     double thr = kDetectionIouThreshold) {
    if (!(thr > 0.0 && thr <= 1.0)) throw OutOfRangeError("mAP threshold outside (0, 1]");

    std::map<int, std::vector<std::size_t>> gt_by_class;
    for (std::size_t i = 0; i < ground_truths.size(); ++i)
        gt_by_class[ground_truths[i].class_id].push_back(i);
    if (gt_by_class.empty()) return 0.0;

    double ap_sum = 0.0;
    for (const auto& [class_id, gt_idx] : gt_by_class) {
        std::vector<std::size_t> det_idx;
        for (std::size_t i = 0; i < detections.size(); ++i)
            if (detections[i].class_id == class_id) det_idx.push_back(i);
        std::stable_sort(det_idx.begin(), det_idx.end(), [&](std::size_t a, std::size_t b) {
            return detections[a].score > detections[b].score;
        });

        std::vector<bool> gt_matched(gt_idx.size(), false);
        std::vector<double> recalls, precisions;
        const double n_gt = static_cast<double>(gt_idx.size());
        int tp = 0, fp = 0;
        for (std::size_t di : det_idx) {
            const DetectionRecord& det = detections[di];
            double best_iou = 0.0;
            std::size_t best_k = gt_idx.size();
            for (std::size_t k = 0; k < gt_idx.size(); ++k) {
                if (gt_matched[k]) continue;
                const GroundTruthRecord& gt = ground_truths[gt_idx[k]];
                if (gt.image_id != det.image_id) continue;
                const double v = box_iou(det.box, gt.box);
                if (v > best_iou) {
                    best_iou = v;
                    best_k = k;
                }
            }
            if (best_k < gt_idx.size() && best_iou >= thr) {
                gt_matched[best_k] = true;
                ++tp;
            } else {
                ++fp;
            }
            recalls.push_back(tp / n_gt);
            precisions.push_back(static_cast<double>(tp) / (tp + fp));
        }

        // precision envelope from the right, then area under the steps
        for (std::size_t i = precisions.size(); i-- > 1;)
            precisions[i - 1] = std::max(precisions[i - 1], precisions[i]);
        double ap = 0.0;
        double prev_recall = 0.0;
        for (std::size_t i = 0; i < recalls.size(); ++i) {
            ap += (recalls[i] - prev_recall) * precisions[i];
            prev_recall = recalls[i];
        }
        ap_sum += ap;
    }
    return ap_sum / static_cast<double>(gt_by_class.size());
}

/// One ground-truth instance, paired with a prediction when one exists.
struct EvaluationPair {
    RigidTransform pred_pose;
    RigidTransform gt_pose;
    BoundingBox2D pred_box;
    BoundingBox2D gt_box;
    double score = 1.0;
    bool has_prediction = true;  // false: the instance was missed entirely
};

/// Error means cover detected pairs only; with zero detections they are
/// reported as absent rather than zero.
struct PoseErrorSummary {
    std::optional<double> mean_translation_mm;
    std::optional<double> mean_centerline_deg;
    double detected_rate_pct = 0.0;
    double map_at_50 = 0.0;
};

inline PoseErrorSummary summarize(const std::vector<EvaluationPair>& pairs,
                                  double thr = kDetectionIouThreshold) {
    if (pairs.empty()) throw NoPairsError("no evaluation pairs");

    PoseErrorSummary s;
    double t_sum = 0.0, a_sum = 0.0;
    int n_detected = 0;
    std::vector<DetectionRecord> dets;
    std::vector<GroundTruthRecord> gts;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const EvaluationPair& p = pairs[i];
        gts.push_back({static_cast<std::int64_t>(i), 0, p.gt_box});
        if (!p.has_prediction) continue;
        if (detected(p.pred_box, p.gt_box, thr)) {
            t_sum += translation_error(p.pred_pose, p.gt_pose);
            a_sum += centerline_angle_error(p.pred_pose, p.gt_pose);
            ++n_detected;
        }
        dets.push_back({static_cast<std::int64_t>(i), 0, p.pred_box, p.score});
    }
    if (n_detected > 0) {
        s.mean_translation_mm = t_sum / n_detected;
        s.mean_centerline_deg = a_sum / n_detected;
    }
    s.detected_rate_pct = 100.0 * n_detected / static_cast<double>(pairs.size());
    s.map_at_50 = mean_average_precision(dets, gts, thr);
    return s;
}

}  // namespace endocal
