#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "endocal/errors.hpp"
#include "endocal/mask.hpp"
#include "endocal/raster.hpp"

namespace endocal {

/// Ground-truth contour of one instrument in one frame. The polygons are
/// filled and unioned to form the reference silhouette.
struct ContourAnnotation {
    std::int64_t frame_id = 0;
    int instrument_id = 0;
    std::vector<std::vector<Pixel>> polygons;
};

enum class Aggregate { kMean, kSum };

struct ObjectiveConfig {
    double alpha = 0.8;
    double d_max = 10.0;
    Aggregate aggregate = Aggregate::kMean;

    void validate() const {
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw OutOfRangeError("alpha " + std::to_string(alpha) + " outside [0, 1]");
        if (!(d_max > 0.0))
            throw OutOfRangeError("d_max " + std::to_string(d_max) + " must be positive");
    }
};

/// Coordinates may spill at most 1 px past the image edge.
inline void validate_annotation(const ContourAnnotation& a, int width, int height) {
    if (a.polygons.empty())
        throw DegeneratePolygonError("annotation for frame " + std::to_string(a.frame_id) +
                                     " has no polygons");
    for (const auto& poly : a.polygons) {
        if (poly.size() < 3)
            throw DegeneratePolygonError("annotation polygon with " +
                                         std::to_string(poly.size()) + " vertices");
        for (const Pixel& p : poly)
            if (p.u < -1.0 || p.u > width + 1.0 || p.v < -1.0 || p.v > height + 1.0)
                throw OutOfRangeError("annotation vertex (" + std::to_string(p.u) + ", " +
                                      std::to_string(p.v) + ") outside image bounds");
    }
}

inline BinaryMask rasterize_annotation(const ContourAnnotation& a, int width, int height) {
    return rasterize_polygons(a.polygons, width, height);
}

inline double iou(const BinaryMask& a, const BinaryMask& b) {
    const std::uint64_t inter = intersection_count(a, b);
    const std::uint64_t uni = a.count() + b.count() - inter;
    if (uni == 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

/// Sum p_gt * p_proj / sum p_gt^2. Normalized by the ground truth only, so
/// values above 1 are possible when the projection's edge band is denser.
inline double edge_overlap(const WeightField& gt, const WeightField& proj) {
    if (!gt.same_size(proj)) throw DimensionMismatchError("weight field sizes differ");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < gt.p.size(); ++i) {
        num += gt.p[i] * proj.p[i];
        den += gt.p[i] * gt.p[i];
    }
    if (den == 0.0) throw EmptyGroundTruthError("ground-truth weight field is all zero");
    return num / den;
}

struct ObjectiveTerms {
    double iou = 0.0;
    double edge_overlap = 0.0;  // raw ratio, before clamping
    double value = 0.0;
};

/// alpha * iou + (1 - alpha) * min(1, edge_overlap). The clamp keeps the
/// blend inside [0, 1]; equality with 1 requires identical non-empty
/// masks. An empty projection scores 0 outright.
inline ObjectiveTerms contour_objective_terms(const BinaryMask& gt, const BinaryMask& proj,
                                              const ObjectiveConfig& cfg = {}) {
    cfg.validate();
    if (!gt.same_size(proj)) throw DimensionMismatchError("mask sizes differ");
    if (gt.count() == 0) throw EmptyGroundTruthError("ground-truth mask is empty");

    ObjectiveTerms t;
    if (proj.count() == 0) return t;

    t.iou = iou(gt, proj);
    const WeightField gt_w = weight_field(distance_transform(extract_edges(gt)), cfg.d_max);
    const WeightField proj_w = weight_field(distance_transform(extract_edges(proj)), cfg.d_max);
    t.edge_overlap = edge_overlap(gt_w, proj_w);
    t.value = cfg.alpha * t.iou + (1.0 - cfg.alpha) * std::min(1.0, t.edge_overlap);
    return t;
}

inline double contour_objective(const BinaryMask& gt, const BinaryMask& proj,
                                const ObjectiveConfig& cfg = {}) {
    return contour_objective_terms(gt, proj, cfg).value;
}

/// Aggregates per-instance objectives in the given order (deterministic
/// reduction). One instance is one instrument in one frame.
inline double dataset_objective(const std::vector<std::pair<BinaryMask, BinaryMask>>& instances,
                                const ObjectiveConfig& cfg = {}) {
    cfg.validate();
    if (instances.empty()) throw NoFramesError("no contour instances");
    double sum = 0.0;
    for (const auto& [gt, proj] : instances) sum += contour_objective(gt, proj, cfg);
    return cfg.aggregate == Aggregate::kMean ? sum / static_cast<double>(instances.size()) : sum;
}

inline double dataset_objective(
    const std::vector<std::pair<ContourAnnotation, BinaryMask>>& instances,
    const ObjectiveConfig& cfg = {}) {
    cfg.validate();
    if (instances.empty()) throw NoFramesError("no contour instances");
    double sum = 0.0;
    for (const auto& [ann, proj] : instances)
        sum += contour_objective(rasterize_annotation(ann, proj.width, proj.height), proj, cfg);
    return cfg.aggregate == Aggregate::kMean ? sum / static_cast<double>(instances.size()) : sum;
}

}  // namespace endocal
