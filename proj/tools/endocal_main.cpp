// endocal command-line front end.
//
// Exit codes: 0 success, 1 usage error, 2 data error (unreadable or
// inconsistent inputs), 3 numerical failure (e.g. nothing projects into
// the view). Machine-readable JSON goes to stdout; human summaries and
// warnings go to stderr.

#include <endocal/endocal.hpp>

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace endocal;

namespace {

int usage_error(const std::string& msg) {
    std::cerr << "usage error: " << msg << '\n';
    return 1;
}

fs::path resolve(const fs::path& root, const fs::path& p) {
    return p.is_absolute() ? p : root / p;
}

// Runs a command body and maps the library's error taxonomy onto exit codes.
template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const AllProjectionsEmptyError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
}

std::string fmt_vec3(const Vec3& v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "(%.4f, %.4f, %.4f)", v.x, v.y, v.z);
    return buf;
}

// Placeholder asset catalogs sized like a typical acquisition campaign, so
// scene sampling works out of the box without any asset drop.
BackgroundCatalogs builtin_catalogs() {
    BackgroundCatalogs cats;
    auto fill = [](std::vector<std::string>& out, const char* stem, int n) {
        out.reserve(static_cast<std::size_t>(n));
        char buf[64];
        for (int i = 0; i < n; ++i) {
            std::snprintf(buf, sizeof buf, "%s/%04d.png", stem, i);
            out.emplace_back(buf);
        }
    };
    fill(cats.contextual, "contextual", 754);
    fill(cats.surgery, "surgery", 2840);
    fill(cats.coco, "coco", 5000);
    fill(cats.convex_maps, "convex", 19);
    return cats;
}

int cmd_calibrate(const fs::path& root, const std::string& manifest, const ObjectiveConfig& ocfg,
                  const SearchConfig& scfg, const std::string& out) {
    return guarded([&] {
        const LoadedDataset ds = load_dataset(resolve(root, manifest));
        const CalibrationResult res = calibrate(ds.frames, ds.nominals, ds.mesh, ds.cam, ocfg, scfg);
        const ResultFile rf{res, ocfg, scfg};
        if (!out.empty()) save_result(resolve(root, out), rf);
        std::cout << result_to_json(rf).dump(2) << '\n';

        const std::size_t per_sweep = scfg.coordinates.empty() ? 1 : scfg.coordinates.size();
        std::cerr << "calibrated " << ds.frames.size() << " frames: objective "
                  << res.objective_before << " -> " << res.objective_after << " ("
                  << res.trace.size() / per_sweep << " sweeps)\n"
                  << "correction X: t " << fmt_vec3(res.correction.dx_X) << " mm, rpy "
                  << fmt_vec3(res.correction.drpy_X) << " deg\n"
                  << "correction Z: t " << fmt_vec3(res.correction.dx_Z) << " mm, rpy "
                  << fmt_vec3(res.correction.drpy_Z) << " deg\n";
        if (!out.empty()) std::cerr << "wrote " << resolve(root, out).string() << '\n';
        return 0;
    });
}

int cmd_project(const fs::path& root, const std::string& manifest, const std::string& x_cal,
                const std::string& z_cal, const std::vector<std::int64_t>& frame_ids,
                const std::string& out_dir) {
    return guarded([&] {
        const LoadedDataset ds = load_dataset(resolve(root, manifest));
        const RigidTransform X =
            x_cal.empty() ? ds.nominals.X_nom : load_transform(resolve(root, x_cal));
        const RigidTransform Z =
            z_cal.empty() ? ds.nominals.Z_nom : load_transform(resolve(root, z_cal));

        std::vector<const CalibrationFrame*> selected;
        if (frame_ids.empty()) {
            for (const CalibrationFrame& f : ds.frames) selected.push_back(&f);
        } else {
            for (std::int64_t id : frame_ids) {
                const CalibrationFrame* hit = nullptr;
                for (const CalibrationFrame& f : ds.frames)
                    if (f.frame_id == id) {
                        hit = &f;
                        break;
                    }
                if (!hit)
                    throw DanglingIndexError("frame id " + std::to_string(id) +
                                             " is not in the tracker log");
                selected.push_back(hit);
            }
        }

        const fs::path dir = resolve(root, out_dir);
        fs::create_directories(dir);
        nlohmann::json written = nlohmann::json::array();
        nlohmann::json empty = nlohmann::json::array();
        for (const CalibrationFrame* f : selected) {
            const RigidTransform tip = tip_in_camera(f->B, f->C, X, Z);
            BinaryMask mask(ds.cam.width, ds.cam.height);
            if (f->gripper_deg.empty()) {
                mask = rasterize_silhouette(pose_mesh(ds.mesh, tip, 0.0), ds.cam);
            } else {
                for (const auto& [inst, deg] : f->gripper_deg) {
                    const BinaryMask one = rasterize_silhouette(pose_mesh(ds.mesh, tip, deg), ds.cam);
                    for (std::size_t i = 0; i < mask.words.size(); ++i) mask.words[i] |= one.words[i];
                }
            }
            char name[48];
            std::snprintf(name, sizeof name, "frame_%06" PRId64 ".pgm", f->frame_id);
            save_pgm(dir / name, mask);
            written.push_back(name);
            if (mask.count() == 0) {
                empty.push_back(f->frame_id);
                std::cerr << "warning: frame " << f->frame_id
                          << " projects to an empty mask (behind the lens or outside the view)\n";
            }
        }
        nlohmann::json j;
        j["out_dir"] = dir.string();
        j["files"] = std::move(written);
        j["empty_frames"] = std::move(empty);
        std::cout << j.dump(2) << '\n';
        std::cerr << "wrote " << selected.size() << " silhouette(s) to " << dir.string() << '\n';
        return 0;
    });
}

int cmd_evaluate(const fs::path& root, const std::string& pred, const std::string& gt, double thr,
                 const std::string& out) {
    return guarded([&] {
        const std::vector<InstanceRecord> preds = load_instance_records(resolve(root, pred));
        const std::vector<InstanceRecord> gts = load_instance_records(resolve(root, gt));
        const std::vector<EvaluationPair> pairs = build_evaluation_pairs(preds, gts);
        const PoseErrorSummary s = summarize(pairs, thr);
        const nlohmann::json j = summary_to_json(s, thr);
        if (!out.empty()) {
            std::ofstream f(resolve(root, out));
            f << j.dump(2) << '\n';
        }
        std::cout << j.dump(2) << '\n';
        std::cerr << pairs.size() << " instance(s): detected " << s.detected_rate_pct << "%, mAP@"
                  << thr << " " << s.map_at_50;
        if (s.mean_translation_mm)
            std::cerr << ", mean translation error " << *s.mean_translation_mm << " mm";
        if (s.mean_centerline_deg)
            std::cerr << ", mean centerline error " << *s.mean_centerline_deg << " deg";
        std::cerr << '\n';
        return 0;
    });
}

int cmd_synth_oracle(const fs::path& root, const MountingCorrection& err, int n_frames,
                     double noise_mm, std::uint64_t seed, const std::string& out_dir,
                     bool dataset_only) {
    return guarded([&] {
        const SyntheticScenario sc = synthesize_scenario(err, n_frames, {}, noise_mm, seed);
        const fs::path dir = resolve(root, out_dir);
        fs::create_directories(dir);

        save_intrinsics(dir / "intrinsics.json", sc.cam);
        save_mesh(dir / "mesh.obj", dir / "mesh.parts.json", sc.mesh);
        save_tracker_log(dir / "tracker.csv", sc.frames);
        std::vector<AnnotationRecord> recs;
        for (const CalibrationFrame& f : sc.frames)
            for (const ContourAnnotation& a : f.annotations)
                recs.push_back({a, f.gripper_deg.at(a.instrument_id), {}});
        save_annotation_records(dir / "annotations.jsonl", recs);
        save_nominals(dir / "nominals.json", sc.nominals);
        save_manifest(dir / "manifest.json", {{"intrinsics", "intrinsics.json"},
                                              {"mesh_obj", "mesh.obj"},
                                              {"mesh_sidecar", "mesh.parts.json"},
                                              {"tracker_csv", "tracker.csv"},
                                              {"annotations_jsonl", "annotations.jsonl"},
                                              {"nominals", "nominals.json"}});
        save_transform(dir / "x_true.json", sc.X_true);
        save_transform(dir / "z_true.json", sc.Z_true);
        nlohmann::json truth;
        truth["true_correction"] = {{"dx_x_mm", {err.dx_X.x, err.dx_X.y, err.dx_X.z}},
                                    {"drpy_x_deg", {err.drpy_X.x, err.drpy_X.y, err.drpy_X.z}},
                                    {"dx_z_mm", {err.dx_Z.x, err.dx_Z.y, err.dx_Z.z}},
                                    {"drpy_z_deg", {err.drpy_Z.x, err.drpy_Z.y, err.drpy_Z.z}}};
        truth["seed"] = seed;
        truth["noise_rms_mm"] = noise_mm;
        truth["frames"] = sc.frames.size();
        {
            std::ofstream f(dir / "truth.json");
            f << truth.dump(2) << '\n';
        }
        std::cerr << "wrote synthetic dataset (" << sc.frames.size() << " frames) to "
                  << dir.string() << '\n';

        if (dataset_only) {
            nlohmann::json j;
            j["dataset"] = dir.string();
            j["frames"] = sc.frames.size();
            std::cout << j.dump(2) << '\n';
            return 0;
        }

        const LoadedDataset ds = load_dataset(dir / "manifest.json");
        const ObjectiveConfig ocfg;
        const SearchConfig scfg;
        const CalibrationResult res = calibrate(ds.frames, ds.nominals, ds.mesh, ds.cam, ocfg, scfg);
        save_result(dir / "result.json", {res, ocfg, scfg});

        nlohmann::json report;
        report["dataset"] = dir.string();
        report["objective_before"] = res.objective_before;
        report["objective_after"] = res.objective_after;
        nlohmann::json residuals = nlohmann::json::object();
        double max_t = 0.0, max_r = 0.0;
        for (int i = 0; i < 12; ++i) {
            const double r = get_parameter(res.correction, i) - get_parameter(err, i);
            residuals[std::string(kParameterNames[static_cast<std::size_t>(i)])] = r;
            (i < 6 ? max_t : max_r) = std::max(i < 6 ? max_t : max_r, std::abs(r));
        }
        report["residuals"] = std::move(residuals);
        report["max_abs_translation_residual_mm"] = max_t;
        report["max_abs_rotation_residual_deg"] = max_r;
        std::cout << report.dump(2) << '\n';
        std::cerr << "recovery: objective " << res.objective_before << " -> " << res.objective_after
                  << ", worst residual " << max_t << " mm / " << max_r << " deg\n";
        return 0;
    });
}

int cmd_sample_scenes(const fs::path& root, int n, std::uint64_t seed, const DRFlags& flags,
                      const std::string& flags_str, const std::string& catalogs_dir,
                      const std::string& out) {
    return guarded([&] {
        BackgroundCatalogs cats;
        if (catalogs_dir.empty()) {
            cats = builtin_catalogs();
        } else {
            const fs::path dir = resolve(root, catalogs_dir);
            cats.contextual = load_catalog(dir / "contextual.txt");
            cats.surgery = load_catalog(dir / "surgery.txt");
            cats.coco = load_catalog(dir / "coco.txt");
            cats.convex_maps = load_catalog(dir / "convex_maps.txt");
        }
        const std::vector<SceneConfig> scenes = generate_dataset(n, seed, flags, cats);
        if (out.empty() || out == "-") {
            for (const SceneConfig& sc : scenes) std::cout << scene_to_json(sc).dump() << '\n';
        } else {
            save_scene_configs(resolve(root, out), scenes);
            nlohmann::json j;
            j["out"] = resolve(root, out).string();
            j["scenes"] = n;
            std::cout << j.dump(2) << '\n';
        }
        std::cerr << "sampled " << n << " scene config(s), seed " << seed << ", flags "
                  << (flags_str.empty() ? "none" : flags_str) << '\n';
        return 0;
    });
}

bool parse_flags(const std::string& spec, DRFlags& flags, std::string& err) {
    flags = DRFlags{};
    if (spec == "none" || spec.empty()) return true;
    if (spec == "all") {
        flags = DRFlags::all_on();
        return true;
    }
    bool* slots[11] = {&flags.dr1, &flags.dr2, &flags.dr3, &flags.dr4, &flags.dr5, &flags.dr6,
                       &flags.dr7, &flags.dr8, &flags.dr9, &flags.dr10, &flags.dr11};
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        const std::size_t comma = std::min(spec.find(',', pos), spec.size());
        const std::string tok = spec.substr(pos, comma - pos);
        pos = comma + 1;
        if (tok.size() < 3 || tok.compare(0, 2, "dr") != 0) {
            err = "unknown flag token '" + tok + "' (expected dr1..dr11, all, or none)";
            return false;
        }
        int idx = 0;
        for (std::size_t i = 2; i < tok.size(); ++i) {
            if (tok[i] < '0' || tok[i] > '9') idx = 99;
            else idx = idx * 10 + (tok[i] - '0');
        }
        if (idx < 1 || idx > 11) {
            err = "unknown flag token '" + tok + "' (expected dr1..dr11, all, or none)";
            return false;
        }
        *slots[idx - 1] = true;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contour-driven hand-eye calibration toolkit for endoscope-held instruments"};
    app.require_subcommand(1);
    std::string root = ".";
    app.add_option("--root", root, "Directory all relative paths resolve against")
        ->capture_default_str();

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "Search mounting corrections that best align "
                                                "projected silhouettes with annotated contours");
    std::string cal_manifest;
    ObjectiveConfig ocfg;
    SearchConfig scfg;
    std::string cal_out;
    cal->add_option("manifest", cal_manifest, "Dataset manifest JSON")->required();
    cal->add_option("--alpha", ocfg.alpha, "Blend weight: alpha*IoU + (1-alpha)*edge overlap")
        ->capture_default_str();
    cal->add_option("--dmax", ocfg.d_max, "Edge-weight saturation distance in pixels")
        ->capture_default_str();
    cal->add_option("--bounds-mm", scfg.bound_mm, "Half-width of each translation interval, mm")
        ->capture_default_str();
    cal->add_option("--bounds-deg", scfg.bound_deg, "Half-width of each rotation interval, deg")
        ->capture_default_str();
    cal->add_option("--sweeps", scfg.max_sweeps, "Maximum coordinate sweeps")
        ->capture_default_str();
    cal->add_option("--out", cal_out, "Also write the calibration result JSON here");

    // project
    auto* prj = app.add_subcommand("project", "Render predicted silhouettes to PGM for visual "
                                              "comparison against the video");
    std::string prj_manifest, prj_x, prj_z, prj_out = "projections";
    std::vector<std::int64_t> prj_frames;
    prj->add_option("manifest", prj_manifest, "Dataset manifest JSON")->required();
    prj->add_option("--x-cal", prj_x, "Calibrated instrument-side transform JSON (default: nominal)");
    prj->add_option("--z-cal", prj_z, "Calibrated camera-side transform JSON (default: nominal)");
    prj->add_option("--frames", prj_frames, "Frame ids to render (default: all)")
        ->delimiter(',');
    prj->add_option("--out-dir", prj_out, "Output directory for PGM masks")
        ->capture_default_str();

    // evaluate
    auto* eva = app.add_subcommand("evaluate", "Score predicted instrument poses/boxes against "
                                               "ground truth");
    std::string eva_pred, eva_gt, eva_out;
    double eva_thr = kDetectionIouThreshold;
    eva->add_option("predictions", eva_pred, "Predicted instance records JSONL")->required();
    eva->add_option("ground_truth", eva_gt, "Ground-truth instance records JSONL")->required();
    eva->add_option("--iou-thr", eva_thr, "Detection IoU threshold in (0, 1]")
        ->capture_default_str();
    eva->add_option("--out", eva_out, "Also write the summary JSON here");

    // synth-oracle
    auto* syn = app.add_subcommand("synth-oracle", "Fabricate a tracked dataset with a known "
                                                   "mounting error, then verify recovery");
    std::vector<double> syn_err;
    int syn_frames = 20;
    double syn_noise = 0.12;
    std::uint64_t syn_seed = 0;
    std::string syn_out = "synthetic";
    bool syn_dataset_only = false;
    syn->add_option("--error", syn_err,
                    "Injected correction, 12 comma-separated values (x_tx_mm,x_ty_mm,x_tz_mm,"
                    "z_tx_mm,z_ty_mm,z_tz_mm,x_roll_deg,x_pitch_deg,x_yaw_deg,z_roll_deg,"
                    "z_pitch_deg,z_yaw_deg); default all zero")
        ->delimiter(',');
    syn->add_option("--frames", syn_frames, "Frame count")->capture_default_str();
    syn->add_option("--noise-mm", syn_noise, "Tracker translation noise, 3D RMS in mm")
        ->capture_default_str();
    syn->add_option("--seed", syn_seed, "Deterministic sampling seed")->capture_default_str();
    syn->add_option("--out", syn_out, "Output dataset directory")->capture_default_str();
    syn->add_flag("--dataset-only", syn_dataset_only, "Write the dataset without running the search");

    // sample-scenes
    auto* smp = app.add_subcommand("sample-scenes", "Sample deterministic domain-randomization "
                                                    "scene configs");
    int smp_n = 1;
    std::uint64_t smp_seed = 0;
    std::string smp_flags = "all", smp_catalogs, smp_out = "-";
    smp->add_option("--n", smp_n, "Number of scenes")->capture_default_str();
    smp->add_option("--seed", smp_seed, "Deterministic sampling seed")->capture_default_str();
    smp->add_option("--flags", smp_flags,
                    "Randomization switches: all, none, or comma list of dr1..dr11")
        ->capture_default_str();
    smp->add_option("--catalogs", smp_catalogs,
                    "Directory with contextual.txt, surgery.txt, coco.txt, convex_maps.txt "
                    "(default: built-in placeholder catalogs)");
    smp->add_option("--out", smp_out, "Output JSONL path, or - for stdout")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    const fs::path root_path(root);
    if (cal->parsed()) {
        try {
            ocfg.validate();
            scfg.validate();
        } catch (const Error& e) {
            return usage_error(e.what());
        }
        return cmd_calibrate(root_path, cal_manifest, ocfg, scfg, cal_out);
    }
    if (prj->parsed()) return cmd_project(root_path, prj_manifest, prj_x, prj_z, prj_frames, prj_out);
    if (eva->parsed()) {
        if (!(eva_thr > 0.0 && eva_thr <= 1.0)) return usage_error("--iou-thr must lie in (0, 1]");
        return cmd_evaluate(root_path, eva_pred, eva_gt, eva_thr, eva_out);
    }
    if (syn->parsed()) {
        MountingCorrection err;
        if (!syn_err.empty()) {
            if (syn_err.size() != 12)
                return usage_error("--error needs exactly 12 values, got " +
                                   std::to_string(syn_err.size()));
            for (int i = 0; i < 12; ++i) set_parameter(err, i, syn_err[static_cast<std::size_t>(i)]);
        }
        try {
            validate_correction(err);
        } catch (const Error& e) {
            return usage_error(e.what());
        }
        if (syn_frames < 1) return usage_error("--frames must be >= 1");
        if (syn_noise < 0.0) return usage_error("--noise-mm must be >= 0");
        return cmd_synth_oracle(root_path, err, syn_frames, syn_noise, syn_seed, syn_out,
                                syn_dataset_only);
    }
    if (smp->parsed()) {
        DRFlags flags;
        std::string err;
        if (!parse_flags(smp_flags, flags, err)) return usage_error(err);
        if (smp_n < 1) return usage_error("--n must be >= 1");
        return cmd_sample_scenes(root_path, smp_n, smp_seed, flags, smp_flags, smp_catalogs, smp_out);
    }
    return usage_error("no subcommand given");
}
