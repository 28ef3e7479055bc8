#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "endocal/errors.hpp"
#include "endocal/geometry.hpp"
#include "endocal/rng.hpp"

namespace endocal {

/// Domain-randomization switches. Each one widens a single scene factor;
/// all off yields the fixed canonical scene (poses still vary).
struct DRFlags {
    bool dr1 = false;   // light position
    bool dr2 = false;   // light intensity
    bool dr3 = false;   // light count
    bool dr4 = false;   // light kind
    bool dr5 = false;   // background texture augmentation
    bool dr6 = false;   // non-contextual background textures
    bool dr7 = false;   // instrument color
    bool dr8 = false;   // instrument glossiness
    bool dr9 = false;   // per-part randomization
    bool dr10 = false;  // scratch normal maps
    bool dr11 = false;  // non-contextual convex normal maps

    static DRFlags all_on() {
        return {true, true, true, true, true, true, true, true, true, true, true};
    }
};

enum class LightKind { kPoint, kSun, kArea, kHemi };

inline const char* to_string(LightKind k) {
    switch (k) {
        case LightKind::kPoint: return "point";
        case LightKind::kSun: return "sun";
        case LightKind::kArea: return "area";
        default: return "hemi";
    }
}

struct LightConfig {
    LightKind kind = LightKind::kPoint;
    Vec3 position_mm{0.0, 0.0, -100.0};
    double intensity = 1000.0;
};

/// Canonical light used whenever dr1/dr2/dr4 are off.
inline LightConfig canonical_light() { return {}; }

inline constexpr double kIntensityMin = 5.0;
inline constexpr double kIntensityMax = 1e6;
inline constexpr double kLightBoxHalfExtentMm = 500.0;  // behind-camera half-space box

enum class BackgroundSource { kContextual, kContextualAugmented, kSurgery, kCoco };

inline const char* to_string(BackgroundSource s) {
    switch (s) {
        case BackgroundSource::kContextual: return "contextual";
        case BackgroundSource::kContextualAugmented: return "contextual_augmented";
        case BackgroundSource::kSurgery: return "surgery";
        default: return "coco";
    }
}

struct TextureAugmentation {
    double hue_shift = 0.0;         // [-0.5, 0.5]
    double brightness_scale = 1.0;  // [0.5, 1.5]
};

struct BackgroundConfig {
    BackgroundSource source = BackgroundSource::kContextual;
    std::string image_ref;
    std::optional<TextureAugmentation> augmentation;
};

/// Mixing ratios for non-contextual backgrounds.
inline constexpr double kSurgeryRatio = 0.25;
inline constexpr double kCocoRatio = 0.5;
inline constexpr double kContextualRatio = 0.25;

struct BackgroundCatalogs {
    std::vector<std::string> contextual;
    std::vector<std::string> surgery;
    std::vector<std::string> coco;
    std::vector<std::string> convex_maps;
};

struct Appearance {
    double hue_shift = 0.0;         // [-0.5, 0.5]
    double brightness_scale = 1.0;  // [0.5, 1.5]
    double roughness = 0.2;         // [0, 1], lower is glossier
};

/// Parameters for the renderer's scratch normal-map generator; no pixels
/// are produced here.
struct ScratchRecipe {
    int count = 1;
    double length_px = 20.0;
    double width_px = 2.0;
    int depth_sign = 1;  // +1 groove, -1 ridge
    std::uint64_t placement_seed = 0;
};

struct InstrumentConfig {
    EulerPose pose;
    Appearance appearance;
    std::map<std::string, Appearance> per_part;
    std::optional<ScratchRecipe> scratch;
    std::vector<std::string> convex_maps;
};

inline constexpr int kDefaultImageSize = 299;
inline constexpr int kInstrumentsPerScene = 2;

inline const std::vector<std::string>& default_part_names() {
    static const std::vector<std::string> names = {"shaft", "jaw_a", "jaw_b"};
    return names;
}

struct SceneConfig {
    std::int64_t scene_id = 0;
    int width = kDefaultImageSize;
    int height = kDefaultImageSize;
    std::vector<InstrumentConfig> instruments;
    std::vector<LightConfig> lights;
    BackgroundConfig background;
};

inline EulerPose sample_pose(const PoseRanges& ranges, CounterRng& rng) {
    EulerPose p;
    p.x_mm = rng.uniform(ranges.min(0), ranges.max(0));
    p.y_mm = rng.uniform(ranges.min(1), ranges.max(1));
    p.z_mm = rng.uniform(ranges.min(2), ranges.max(2));
    p.roll_deg = rng.uniform(ranges.min(3), ranges.max(3));
    p.pitch_deg = rng.uniform(ranges.min(4), ranges.max(4));
    p.yaw_deg = rng.uniform(ranges.min(5), ranges.max(5));
    p.gripper_deg = rng.uniform(ranges.min(6), ranges.max(6));
    return p;
}

namespace detail {

inline const std::string& pick(const std::vector<std::string>& catalog, const char* name,
                               CounterRng& rng) {
    if (catalog.empty()) throw EmptyCatalogError(std::string(name) + " catalog is empty");
    return catalog[rng.uniform_index(catalog.size())];
}

inline Appearance sample_full_appearance(CounterRng& rng) {
    Appearance a;
    a.hue_shift = rng.uniform(-0.5, 0.5);
    a.brightness_scale = rng.uniform(0.5, 1.5);
    a.roughness = rng.uniform(0.0, 1.0);
    return a;
}

}  // namespace detail

/// Category draw surgery/coco/contextual at 0.25/0.5/0.25 when
/// non-contextual textures are enabled, contextual only otherwise;
/// uniform image choice within the category. Texture augmentation, when
/// enabled, applies to the contextual category.
inline BackgroundConfig sample_background(bool non_contextual_enabled, bool augment_enabled,
                                          const BackgroundCatalogs& catalogs, CounterRng& rng) {
    BackgroundConfig bg;
    BackgroundSource category = BackgroundSource::kContextual;
    if (non_contextual_enabled) {
        const double u = rng.next_double();
        if (u < kSurgeryRatio) category = BackgroundSource::kSurgery;
        else if (u < kSurgeryRatio + kCocoRatio) category = BackgroundSource::kCoco;
    }
    switch (category) {
        case BackgroundSource::kSurgery:
            bg.source = category;
            bg.image_ref = detail::pick(catalogs.surgery, "surgery", rng);
            break;
        case BackgroundSource::kCoco:
            bg.source = category;
            bg.image_ref = detail::pick(catalogs.coco, "coco", rng);
            break;
        default:
            bg.source = BackgroundSource::kContextual;
            bg.image_ref = detail::pick(catalogs.contextual, "contextual", rng);
            if (augment_enabled) {
                bg.source = BackgroundSource::kContextualAugmented;
                TextureAugmentation aug;
                aug.hue_shift = rng.uniform(-0.5, 0.5);
                aug.brightness_scale = rng.uniform(0.5, 1.5);
                bg.augmentation = aug;
            }
            break;
    }
    return bg;
}

/// One scene config at a stream index. Poses come from the "pose" stream
/// only and DR choices from per-aspect streams, so the pose sequence for a
/// given seed is identical across every DRFlags setting. Any index can be
/// sampled directly without generating its predecessors.
inline SceneConfig sample_scene(std::uint64_t seed, std::int64_t index, const DRFlags& flags,
                                const BackgroundCatalogs& catalogs,
                                const PoseRanges& ranges = {},
                                const std::vector<std::string>& part_names =
                                    default_part_names()) {
    SceneConfig sc;
    sc.scene_id = index;

    CounterRng pose_rng(seed, "pose", static_cast<std::uint64_t>(index));
    CounterRng light_rng(seed, "light", static_cast<std::uint64_t>(index));
    CounterRng bg_rng(seed, "background", static_cast<std::uint64_t>(index));
    CounterRng app_rng(seed, "appearance", static_cast<std::uint64_t>(index));

    for (int i = 0; i < kInstrumentsPerScene; ++i) {
        InstrumentConfig inst;
        inst.pose = sample_pose(ranges, pose_rng);
        sc.instruments.push_back(std::move(inst));
    }

    const int n_lights = flags.dr3 ? 1 + static_cast<int>(light_rng.uniform_index(2)) : 1;
    for (int i = 0; i < n_lights; ++i) {
        LightConfig light = canonical_light();
        if (flags.dr4) {
            static constexpr LightKind kKinds[4] = {LightKind::kPoint, LightKind::kSun,
                                                    LightKind::kArea, LightKind::kHemi};
            light.kind = kKinds[light_rng.uniform_index(4)];
        }
        if (flags.dr1) {
            light.position_mm.x = light_rng.uniform(-kLightBoxHalfExtentMm, kLightBoxHalfExtentMm);
            light.position_mm.y = light_rng.uniform(-kLightBoxHalfExtentMm, kLightBoxHalfExtentMm);
            light.position_mm.z = light_rng.uniform(-kLightBoxHalfExtentMm, 0.0);
        }
        if (flags.dr2) light.intensity = light_rng.log_uniform(kIntensityMin, kIntensityMax);
        sc.lights.push_back(light);
    }

    sc.background = sample_background(flags.dr6, flags.dr5, catalogs, bg_rng);

    for (InstrumentConfig& inst : sc.instruments) {
        if (flags.dr7) {
            inst.appearance.hue_shift = app_rng.uniform(-0.5, 0.5);
            inst.appearance.brightness_scale = app_rng.uniform(0.5, 1.5);
        }
        if (flags.dr8) inst.appearance.roughness = app_rng.uniform(0.0, 1.0);
        if (flags.dr9)
            for (const std::string& part : part_names)
                if (app_rng.next_double() < 0.5)
                    inst.per_part[part] = detail::sample_full_appearance(app_rng);
        if (flags.dr10) {
            ScratchRecipe r;
            r.count = 1 + static_cast<int>(app_rng.uniform_index(8));
            r.length_px = app_rng.uniform(5.0, 60.0);
            r.width_px = app_rng.uniform(1.0, 5.0);
            r.depth_sign = app_rng.next_double() < 0.5 ? -1 : 1;
            r.placement_seed = app_rng.next_u64();
            inst.scratch = r;
        }
        if (flags.dr11)
            inst.convex_maps.push_back(detail::pick(catalogs.convex_maps, "convex map", app_rng));
    }
    return sc;
}

inline std::vector<SceneConfig> generate_dataset(int n, std::uint64_t seed, const DRFlags& flags,
                                                 const BackgroundCatalogs& catalogs,
                                                 const PoseRanges& ranges = {}) {
    if (n < 1) throw OutOfRangeError("dataset size must be >= 1");
    std::vector<SceneConfig> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out.push_back(sample_scene(seed, i, flags, catalogs, ranges));
    return out;
}

}  // namespace endocal
