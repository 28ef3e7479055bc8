#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "endocal/camera.hpp"
#include "endocal/errors.hpp"
#include "endocal/geometry.hpp"
#include "endocal/mask.hpp"
#include "endocal/objective.hpp"
#include "endocal/raster.hpp"
#include "endocal/rng.hpp"

namespace endocal {

/// One tracked, annotated endoscope frame. B places the instrument marker
/// in the tracker world frame, C the endoscope marker.
struct CalibrationFrame {
    std::int64_t frame_id = 0;
    RigidTransform B;
    RigidTransform C;
    std::vector<ContourAnnotation> annotations;
    std::map<int, double> gripper_deg;  // keyed by instrument_id; absent means closed (0)
    double timestamp_sec = 0.0;
};

/// CAD-derived ideal marker-to-tip (X) and marker-to-lens (Z) transforms.
struct HandEyeNominals {
    RigidTransform X_nom;
    RigidTransform Z_nom;
};

inline constexpr double kMountingBound = 1.0;  // mm and degrees

/// Small rigid corrections applied on the child side of each nominal:
/// X_cal = X_nom * from_euler(dx_X, drpy_X), likewise for Z.
struct MountingCorrection {
    Vec3 dx_X{};    // mm
    Vec3 drpy_X{};  // degrees
    Vec3 dx_Z{};    // mm
    Vec3 drpy_Z{};  // degrees
};

/// Search coordinates: translations before rotations, X before Z.
inline constexpr std::array<const char*, 12> kParameterNames = {
    "x_tx_mm",   "x_ty_mm",    "x_tz_mm",  "z_tx_mm",   "z_ty_mm",    "z_tz_mm",
    "x_roll_deg", "x_pitch_deg", "x_yaw_deg", "z_roll_deg", "z_pitch_deg", "z_yaw_deg"};

namespace detail {

inline double& vec_component(Vec3& v, int i) {
    switch (i) {
        case 0: return v.x;
        case 1: return v.y;
        default: return v.z;
    }
}

}  // namespace detail

inline double get_parameter(const MountingCorrection& c, int idx) {
    const Vec3* blocks[4] = {&c.dx_X, &c.dx_Z, &c.drpy_X, &c.drpy_Z};
    const Vec3& v = *blocks[idx / 3];
    switch (idx % 3) {
        case 0: return v.x;
        case 1: return v.y;
        default: return v.z;
    }
}

inline void set_parameter(MountingCorrection& c, int idx, double value) {
    Vec3* blocks[4] = {&c.dx_X, &c.dx_Z, &c.drpy_X, &c.drpy_Z};
    detail::vec_component(*blocks[idx / 3], idx % 3) = value;
}

inline void validate_correction(const MountingCorrection& c) {
    for (int i = 0; i < 12; ++i) {
        const double v = get_parameter(c, i);
        if (v < -kMountingBound - 1e-12 || v > kMountingBound + 1e-12)
            throw OutOfRangeError(std::string(kParameterNames[static_cast<std::size_t>(i)]) +
                                  " = " + std::to_string(v) + " outside [-1, 1]");
    }
}

struct SearchConfig {
    int max_sweeps = 10;
    double line_tolerance = 1e-3;
    double sweep_improvement_tol = 1e-4;
    double bound_mm = kMountingBound;
    double bound_deg = kMountingBound;
    std::vector<int> coordinates = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};

    void validate() const {
        if (max_sweeps < 1) throw OutOfRangeError("max_sweeps must be >= 1");
        if (!(line_tolerance > 0.0)) throw OutOfRangeError("line_tolerance must be positive");
        if (!(sweep_improvement_tol > 0.0))
            throw OutOfRangeError("sweep_improvement_tol must be positive");
        if (!(bound_mm > 0.0)) throw OutOfRangeError("bound_mm must be positive");
        if (!(bound_deg > 0.0)) throw OutOfRangeError("bound_deg must be positive");
        for (int c : coordinates)
            if (c < 0 || c >= 12)
                throw OutOfRangeError("coordinate index " + std::to_string(c) +
                                      " outside [0, 12)");
    }
};

struct TraceEntry {
    int parameter = 0;
    double value = 0.0;
    double objective = 0.0;
};

struct CalibrationResult {
    MountingCorrection correction;
    RigidTransform X_cal;
    RigidTransform Z_cal;
    double objective_before = 0.0;
    double objective_after = 0.0;
    std::vector<TraceEntry> trace;
};

/// Instrument tip expressed in the lens frame: Z^-1 * C^-1 * B * X.
inline RigidTransform tip_in_camera(const RigidTransform& B, const RigidTransform& C,
                                    const RigidTransform& X, const RigidTransform& Z) {
    return compose(compose(invert(Z), invert(C)), compose(B, X));
}

inline RigidTransform apply_correction(const RigidTransform& nom, const Vec3& dt_mm,
                                       const Vec3& drpy_deg) {
    return compose(nom, from_euler(dt_mm, drpy_deg));
}

inline RigidTransform corrected_x(const HandEyeNominals& nom, const MountingCorrection& c) {
    return apply_correction(nom.X_nom, c.dx_X, c.drpy_X);
}

inline RigidTransform corrected_z(const HandEyeNominals& nom, const MountingCorrection& c) {
    return apply_correction(nom.Z_nom, c.dx_Z, c.drpy_Z);
}

struct LineSearchResult {
    double argmax = 0.0;
    double max = 0.0;
};

/// Bounded maximization by interval thirds. The two probes shrink the
/// interval by 1/3 per step (both sides on a tie), stopping when its width
/// drops below tol; the midpoint of the final interval is returned with
/// its value. Exact up to tol for strictly unimodal f; for other f the
/// result is a local maximizer.
template <typename F>
LineSearchResult ternary_line_search(F&& f, double lo, double hi, double tol) {
    if (!(lo < hi)) throw OutOfRangeError("line search requires lo < hi");
    if (!(tol > 0.0)) throw OutOfRangeError("line search tolerance must be positive");
    while (hi - lo >= tol) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        const double f1 = f(m1);
        const double f2 = f(m2);
        if (f1 < f2) {
            lo = m1;
        } else if (f1 > f2) {
            hi = m2;
        } else {
            lo = m1;
            hi = m2;
        }
    }
    const double mid = 0.5 * (lo + hi);
    return {mid, f(mid)};
}

/// Renders one instrument silhouette for given tracker poses and hand-eye
/// transforms.
inline BinaryMask project_instrument(const RigidTransform& B, const RigidTransform& C,
                                     const RigidTransform& X, const RigidTransform& Z,
                                     const TriangleMesh& mesh, double gripper_deg,
                                     const CameraIntrinsics& cam) {
    return rasterize_silhouette(pose_mesh(mesh, tip_in_camera(B, C, X, Z), gripper_deg), cam);
}

namespace detail {

/// Repeated-evaluation engine behind calibrate(). Ground-truth masks,
/// their edge weight supports and window bounds are precomputed once; each
/// probe then re-renders only the projections and evaluates both objective
/// terms inside the per-instance window. Results match the public
/// contour_objective path bit for bit: every projection edge within d_max
/// of a ground-truth support pixel lies inside the window, and farther
/// edges contribute zero weight either way.
class DatasetEvaluator {
public:
    DatasetEvaluator(const std::vector<CalibrationFrame>& frames, const TriangleMesh& mesh,
                     const CameraIntrinsics& cam, const ObjectiveConfig& cfg)
        : frames_(frames), mesh_(mesh), cam_(cam), cfg_(cfg), view_(view_mask(cam)) {
        cfg_.validate();
        mesh_.validate();
        trunc_ = static_cast<int>(std::ceil(cfg_.d_max));
        const int pad = 2 * trunc_ + 1;
        const double d_max_sq = cfg_.d_max * cfg_.d_max;

        for (std::size_t fi = 0; fi < frames_.size(); ++fi) {
            for (const ContourAnnotation& ann : frames_[fi].annotations) {
                Instance inst;
                inst.frame_index = fi;
                auto grip = frames_[fi].gripper_deg.find(ann.instrument_id);
                inst.gripper_deg = grip == frames_[fi].gripper_deg.end() ? 0.0 : grip->second;
                inst.gt = rasterize_annotation(ann, cam.width, cam.height);
                inst.gt_count = inst.gt.count();
                if (inst.gt_count == 0)
                    throw EmptyGroundTruthError("annotation for frame " +
                                                std::to_string(frames_[fi].frame_id) +
                                                " rasterizes to an empty mask");

                int bx0 = cam.width, by0 = cam.height, bx1 = -1, by1 = -1;
                for (int v = 0; v < cam.height; ++v)
                    for (int u = 0; u < cam.width; ++u)
                        if (inst.gt.get(u, v)) {
                            bx0 = std::min(bx0, u);
                            by0 = std::min(by0, v);
                            bx1 = std::max(bx1, u);
                            by1 = std::max(by1, v);
                        }
                inst.x0 = std::max(0, bx0 - pad);
                inst.y0 = std::max(0, by0 - pad);
                inst.x1 = std::min(cam.width, bx1 + pad + 1);
                inst.y1 = std::min(cam.height, by1 + pad + 1);

                const BinaryMask gt_edges = extract_edges(inst.gt);
                std::vector<std::int64_t> sq;
                edt_window(gt_edges, inst.x0, inst.y0, inst.x1, inst.y1, sq, trunc_);
                inst.sum_p_gt_sq = 0.0;
                for (std::size_t k = 0; k < sq.size(); ++k) {
                    if (sq[k] < 0 || static_cast<double>(sq[k]) >= d_max_sq) continue;
                    const double t = cfg_.d_max - std::sqrt(static_cast<double>(sq[k]));
                    const double p = t * t;
                    inst.support_idx.push_back(k);
                    inst.support_p.push_back(p);
                    inst.sum_p_gt_sq += p * p;
                }
                instances_.push_back(std::move(inst));
            }
        }
        if (instances_.empty()) throw NoAnnotatedFramesError("no frame carries an annotation");
    }

    std::size_t instance_count() const { return instances_.size(); }

    /// Mean or sum of per-instance objectives for hand-eye candidates X, Z.
    double evaluate(const RigidTransform& X, const RigidTransform& Z,
                    bool* all_projections_empty = nullptr) {
        double sum = 0.0;
        bool any_nonempty = false;
        const double d_max_sq = cfg_.d_max * cfg_.d_max;
        for (const Instance& inst : instances_) {
            const CalibrationFrame& fr = frames_[inst.frame_index];
            const RigidTransform tip = tip_in_camera(fr.B, fr.C, X, Z);
            pose_mesh_into(posed_, mesh_, tip, inst.gripper_deg);
            rasterize_silhouette_into(proj_, posed_, cam_, view_);
            const std::uint64_t pc = proj_.count();
            if (pc == 0) continue;  // contributes 0
            any_nonempty = true;

            const std::uint64_t inter = intersection_count(inst.gt, proj_);
            const double iou_term = static_cast<double>(inter) /
                                    static_cast<double>(inst.gt_count + pc - inter);

            extract_edges_into(proj_edges_, proj_);
            edt_window(proj_edges_, inst.x0, inst.y0, inst.x1, inst.y1, sq_, trunc_);
            double num = 0.0;
            for (std::size_t k = 0; k < inst.support_idx.size(); ++k) {
                const std::int64_t s = sq_[inst.support_idx[k]];
                if (s < 0 || static_cast<double>(s) >= d_max_sq) continue;
                const double t = cfg_.d_max - std::sqrt(static_cast<double>(s));
                num += inst.support_p[k] * (t * t);
            }
            const double edge_term = std::min(1.0, num / inst.sum_p_gt_sq);
            sum += cfg_.alpha * iou_term + (1.0 - cfg_.alpha) * edge_term;
        }
        if (all_projections_empty) *all_projections_empty = !any_nonempty;
        return cfg_.aggregate == Aggregate::kMean
                   ? sum / static_cast<double>(instances_.size())
                   : sum;
    }

private:
    struct Instance {
        std::size_t frame_index = 0;
        double gripper_deg = 0.0;
        BinaryMask gt;
        std::uint64_t gt_count = 0;
        int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open window
        std::vector<std::size_t> support_idx;  // window-local linear indices
        std::vector<double> support_p;
        double sum_p_gt_sq = 0.0;
    };

    const std::vector<CalibrationFrame>& frames_;
    TriangleMesh mesh_;
    CameraIntrinsics cam_;
    ObjectiveConfig cfg_;
    BinaryMask view_;
    int trunc_ = -1;
    std::vector<Instance> instances_;

    PosedMesh posed_;
    BinaryMask proj_;
    BinaryMask proj_edges_;
    std::vector<std::int64_t> sq_;
};

}  // namespace detail

/// Cyclic coordinate ascent over the 12 mounting-error parameters, each
/// visited with a bounded ternary line search of the dataset objective. An
/// update is kept only when it does not decrease the objective, so the
/// accepted trace is non-decreasing. Deterministic for identical inputs.
inline CalibrationResult calibrate(const std::vector<CalibrationFrame>& frames,
                                   const HandEyeNominals& nominals, const TriangleMesh& mesh,
                                   const CameraIntrinsics& cam,
                                   const ObjectiveConfig& obj_cfg = {},
                                   const SearchConfig& search_cfg = {}) {
    search_cfg.validate();
    for (const CalibrationFrame& f : frames) {
        if (!f.B.is_valid() || !f.C.is_valid())
            throw NonRigidRotationError("frame " + std::to_string(f.frame_id) +
                                        " has a non-rigid B or C");
    }
    detail::DatasetEvaluator evaluator(frames, mesh, cam, obj_cfg);

    CalibrationResult result;
    MountingCorrection current;
    bool all_empty = false;
    double f_cur = evaluator.evaluate(corrected_x(nominals, current),
                                      corrected_z(nominals, current), &all_empty);
    if (all_empty) {
        const RigidTransform tip =
            tip_in_camera(frames.front().B, frames.front().C, nominals.X_nom, nominals.Z_nom);
        throw AllProjectionsEmptyError(
            "no instance projects into the view under the nominal transforms; first-frame tip "
            "sits at (" +
            std::to_string(tip.translation.x) + ", " + std::to_string(tip.translation.y) +
            ", " + std::to_string(tip.translation.z) + ") mm in the lens frame");
    }
    result.objective_before = f_cur;

    for (int sweep = 0; sweep < search_cfg.max_sweeps; ++sweep) {
        const double f_sweep_start = f_cur;
        for (int coord : search_cfg.coordinates) {
            auto probe = [&](double x) {
                MountingCorrection trial = current;
                set_parameter(trial, coord, x);
                return evaluator.evaluate(corrected_x(nominals, trial),
                                          corrected_z(nominals, trial));
            };
            const double bound = coord < 6 ? search_cfg.bound_mm : search_cfg.bound_deg;
            const LineSearchResult line =
                ternary_line_search(probe, -bound, bound, search_cfg.line_tolerance);
            // strict improvement only: plateau ties would otherwise walk the
            // correction around inside the pixel-quantization flat spot
            if (line.max > f_cur) {
                set_parameter(current, coord, line.argmax);
                f_cur = line.max;
            }
            result.trace.push_back({coord, get_parameter(current, coord), f_cur});
        }
        if (f_cur - f_sweep_start < search_cfg.sweep_improvement_tol) break;
    }

    result.correction = current;
    result.X_cal = corrected_x(nominals, current);
    result.Z_cal = corrected_z(nominals, current);
    result.objective_after = f_cur;
    return result;
}

/// Everything calibrate() consumes plus the ground truth it should
/// recover.
struct SyntheticScenario {
    std::vector<CalibrationFrame> frames;
    HandEyeNominals nominals;
    MountingCorrection true_error;
    RigidTransform X_true;
    RigidTransform Z_true;
    RigidTransform endoscope_marker_world;  // C, held fixed
    CameraIntrinsics cam;
    TriangleMesh mesh;
};

/// Fabricates a consistent tracked dataset: instrument poses are drawn
/// uniformly from the range-of-motion intervals, B is back-solved from
/// the TRUE hand-eye transforms, and annotations are traced from
/// silhouettes rendered with those same true transforms. Optional
/// isotropic Gaussian noise (given as 3D RMS) perturbs the B and C
/// translations afterwards. Frames whose silhouette is tiny, or whose
/// traced outline cannot reproduce the mask exactly (holes), are skipped
/// deterministically.
inline SyntheticScenario synthesize_scenario(const MountingCorrection& true_error, int n_frames,
                                             const PoseRanges& ranges = {},
                                             double noise_rms_mm = 0.0, std::uint64_t seed = 0,
                                             int min_silhouette_px = 300) {
    if (n_frames < 1) throw OutOfRangeError("n_frames must be >= 1");
    validate_correction(true_error);

    SyntheticScenario sc;
    sc.cam = default_endoscope_intrinsics();
    sc.mesh = make_forceps_mesh();
    sc.true_error = true_error;
    sc.nominals.X_nom = from_euler({12.0, -8.0, 150.0}, {5.0, -3.0, 10.0});
    sc.nominals.Z_nom = from_euler({20.0, 10.0, 40.0}, {-4.0, 6.0, 2.0});
    sc.X_true = corrected_x(sc.nominals, true_error);
    sc.Z_true = corrected_z(sc.nominals, true_error);
    sc.endoscope_marker_world = from_euler({120.0, -60.0, 400.0}, {15.0, -25.0, 70.0});

    const double sigma = noise_rms_mm / std::sqrt(3.0);
    const long max_attempts = 50L * n_frames + 100;
    int accepted = 0;
    for (long attempt = 0; attempt < max_attempts && accepted < n_frames; ++attempt) {
        CounterRng rng(seed, "pose", static_cast<std::uint64_t>(attempt));
        EulerPose pose;
        pose.x_mm = rng.uniform(ranges.min(0), ranges.max(0));
        pose.y_mm = rng.uniform(ranges.min(1), ranges.max(1));
        pose.z_mm = rng.uniform(ranges.min(2), ranges.max(2));
        pose.roll_deg = rng.uniform(ranges.min(3), ranges.max(3));
        pose.pitch_deg = rng.uniform(ranges.min(4), ranges.max(4));
        pose.yaw_deg = rng.uniform(ranges.min(5), ranges.max(5));
        pose.gripper_deg = rng.uniform(ranges.min(6), ranges.max(6));

        const RigidTransform tip_pose = from_euler(pose);
        const BinaryMask gt =
            rasterize_silhouette(pose_mesh(sc.mesh, tip_pose, pose.gripper_deg), sc.cam);
        if (gt.count() < static_cast<std::uint64_t>(min_silhouette_px)) continue;
        std::vector<std::vector<Pixel>> loops = trace_boundaries(gt);
        if (loops.empty()) continue;
        if (!(rasterize_polygons(loops, sc.cam.width, sc.cam.height) == gt)) continue;

        CalibrationFrame frame;
        frame.frame_id = accepted;
        frame.timestamp_sec = accepted / 20.0;
        frame.C = sc.endoscope_marker_world;
        frame.B = compose(compose(frame.C, sc.Z_true), compose(tip_pose, invert(sc.X_true)));
        frame.gripper_deg[0] = pose.gripper_deg;
        ContourAnnotation ann;
        ann.frame_id = frame.frame_id;
        ann.instrument_id = 0;
        ann.polygons = std::move(loops);
        frame.annotations.push_back(std::move(ann));

        if (noise_rms_mm > 0.0) {
            CounterRng nb(seed, "noise_b", static_cast<std::uint64_t>(attempt));
            CounterRng nc(seed, "noise_c", static_cast<std::uint64_t>(attempt));
            frame.B.translation.x += sigma * nb.normal();
            frame.B.translation.y += sigma * nb.normal();
            frame.B.translation.z += sigma * nb.normal();
            frame.C.translation.x += sigma * nc.normal();
            frame.C.translation.y += sigma * nc.normal();
            frame.C.translation.z += sigma * nc.normal();
        }
        sc.frames.push_back(std::move(frame));
        ++accepted;
    }
    if (accepted < n_frames)
        throw NoFramesError("only " + std::to_string(accepted) + " of " +
                            std::to_string(n_frames) +
                            " frames produced a usable silhouette; widen the pose ranges or "
                            "lower min_silhouette_px");
    return sc;
}

}  // namespace endocal
