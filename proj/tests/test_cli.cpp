#include <catch2/catch_amalgamated.hpp>

#include <endocal/endocal.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

using namespace endocal;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string env_or_die(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) throw std::runtime_error(std::string(name) + " is not set");
    return v;
}

const fs::path& cli() {
    static const fs::path p = env_or_die("ENDOCAL_CLI");
    return p;
}

const fs::path& fixtures() {
    static const fs::path p = env_or_die("ENDOCAL_FIXTURES");
    return p;
}

const fs::path& scratch() {
    static const fs::path p = [] {
        const fs::path d = fs::temp_directory_path() /
                           ("endocal_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(d);
        return d;
    }();
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path out = scratch() / ("stdout_" + std::to_string(counter) + ".txt");
    const fs::path err = scratch() / ("stderr_" + std::to_string(counter) + ".txt");
    ++counter;
    const std::string cmd = "\"" + cli().string() + "\" " + args + " > \"" + out.string() +
                            "\" 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

nlohmann::json json_out(const RunResult& r) {
    return nlohmann::json::parse(r.out);
}

}  // namespace

TEST_CASE("help and usage errors") {
    REQUIRE(run_cli("--help").exit_code == 0);
    const RunResult help = run_cli("--help");
    REQUIRE(help.out.find("calibrate") != std::string::npos);
    REQUIRE(run_cli("").exit_code == 1);
    REQUIRE(run_cli("frobnicate").exit_code == 1);
    REQUIRE(run_cli("calibrate").exit_code == 1);  // manifest is required
}

TEST_CASE("calibrate recovers the injected mounting error") {
    const fs::path result_path = scratch() / "injected_result.json";
    const RunResult r = run_cli("--root \"" + (fixtures() / "injected_error").string() +
                                "\" calibrate manifest.json --out \"" + result_path.string() + "\"");
    INFO(r.err);
    REQUIRE(r.exit_code == 0);

    const nlohmann::json res = json_out(r);
    const nlohmann::json truth =
        nlohmann::json::parse(slurp(fixtures() / "injected_error" / "truth.json"));
    for (const char* key : {"dx_x_mm", "drpy_x_deg", "dx_z_mm", "drpy_z_deg"}) {
        for (int i = 0; i < 3; ++i) {
            const double got = res["correction"][key][i].get<double>();
            const double want = truth["true_correction"][key][i].get<double>();
            INFO(key << "[" << i << "]");
            REQUIRE(std::abs(got - want) < 0.15);
        }
    }
    REQUIRE(res["objective_after"].get<double>() >= 0.95);
    REQUIRE(res["objective_after"].get<double>() >= res["objective_before"].get<double>());

    // --out wrote the same result to disk
    const ResultFile rf = load_result(result_path);
    REQUIRE(rf.result.objective_after == res["objective_after"].get<double>());
    REQUIRE(rf.result.trace.size() == res["trace"].size());
}

TEST_CASE("calibrate leaves a perfect dataset untouched") {
    const RunResult r =
        run_cli("--root \"" + (fixtures() / "zero_error").string() + "\" calibrate manifest.json");
    INFO(r.err);
    REQUIRE(r.exit_code == 0);
    const nlohmann::json res = json_out(r);
    REQUIRE(res["objective_before"].get<double>() == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(res["objective_after"].get<double>() == Catch::Approx(1.0).margin(1e-12));
    for (const char* key : {"dx_x_mm", "drpy_x_deg", "dx_z_mm", "drpy_z_deg"})
        for (int i = 0; i < 3; ++i) REQUIRE(res["correction"][key][i].get<double>() == 0.0);
}

TEST_CASE("calibrate data and usage failures") {
    REQUIRE(run_cli("--root \"" + (fixtures() / "unannotated").string() +
                    "\" calibrate manifest.json")
                .exit_code == 2);
    REQUIRE(run_cli("calibrate /nonexistent/manifest.json").exit_code == 2);
    REQUIRE(run_cli("--root \"" + (fixtures() / "injected_error").string() +
                    "\" calibrate manifest.json --alpha 1.5")
                .exit_code == 1);
    REQUIRE(run_cli("--root \"" + (fixtures() / "injected_error").string() +
                    "\" calibrate manifest.json --sweeps 0")
                .exit_code == 1);
}

TEST_CASE("project reproduces the golden silhouette byte for byte") {
    const fs::path out_dir = scratch() / "proj_golden";
    const RunResult r = run_cli("--root \"" + (fixtures() / "injected_error").string() +
                                "\" project manifest.json --x-cal x_true.json --z-cal z_true.json" +
                                " --frames 0 --out-dir \"" + out_dir.string() + "\"");
    INFO(r.err);
    REQUIRE(r.exit_code == 0);
    const nlohmann::json res = json_out(r);
    REQUIRE(res["files"].size() == 1);
    REQUIRE(res["empty_frames"].empty());
    REQUIRE(slurp(out_dir / "frame_000000.pgm") ==
            slurp(fixtures() / "golden" / "frame_000000.pgm"));
}

TEST_CASE("project warns on frames that leave the view") {
    // push the camera-side transform far away so nothing projects
    HandEyeNominals nom = load_nominals(fixtures() / "zero_error" / "nominals.json");
    nom.Z_nom.translation.z += 5000.0;
    const fs::path far_z = scratch() / "far_z.json";
    save_transform(far_z, nom.Z_nom);

    const fs::path out_dir = scratch() / "proj_empty";
    const RunResult r = run_cli("--root \"" + (fixtures() / "zero_error").string() +
                                "\" project manifest.json --z-cal \"" + far_z.string() +
                                "\" --frames 0 --out-dir \"" + out_dir.string() + "\"");
    REQUIRE(r.exit_code == 0);
    const nlohmann::json res = json_out(r);
    REQUIRE(res["empty_frames"].size() == 1);
    REQUIRE(r.err.find("warning") != std::string::npos);
    REQUIRE(load_pgm(out_dir / "frame_000000.pgm").count() == 0);
}

TEST_CASE("project rejects unknown frame ids") {
    REQUIRE(run_cli("--root \"" + (fixtures() / "zero_error").string() +
                    "\" project manifest.json --frames 99 --out-dir \"" +
                    (scratch() / "proj_bad").string() + "\"")
                .exit_code == 2);
}

TEST_CASE("evaluate matches the frozen summary") {
    const fs::path out = scratch() / "summary.json";
    const RunResult r = run_cli("--root \"" + (fixtures() / "eval").string() +
                                "\" evaluate pred.jsonl gt.jsonl --out \"" + out.string() + "\"");
    INFO(r.err);
    REQUIRE(r.exit_code == 0);
    const nlohmann::json expected =
        nlohmann::json::parse(slurp(fixtures() / "eval" / "expected_summary.json"));
    REQUIRE(json_out(r) == expected);
    REQUIRE(nlohmann::json::parse(slurp(out)) == expected);
}

TEST_CASE("evaluate validates the threshold") {
    const std::string base = "--root \"" + (fixtures() / "eval").string() +
                             "\" evaluate pred.jsonl gt.jsonl";
    REQUIRE(run_cli(base + " --iou-thr 1.5").exit_code == 1);
    REQUIRE(run_cli(base + " --iou-thr 0").exit_code == 1);
    REQUIRE(run_cli(base + " --iou-thr 0.75").exit_code == 0);
}

TEST_CASE("synth-oracle writes a dataset that loads back") {
    const fs::path dir = scratch() / "synth_ds";
    const RunResult r = run_cli("synth-oracle --dataset-only --frames 2 --seed 11 --noise-mm 0"
                                " --error 0.2,0,0,0,0,0,0,0,0,0,0,0 --out \"" +
                                dir.string() + "\"");
    INFO(r.err);
    REQUIRE(r.exit_code == 0);
    const nlohmann::json res = json_out(r);
    REQUIRE(res["frames"].get<int>() == 2);

    const LoadedDataset ds = load_dataset(dir / "manifest.json");
    REQUIRE(ds.frames.size() == 2);
    REQUIRE(ds.frames[0].annotations.size() == 1);
    const RigidTransform x_true = load_transform(dir / "x_true.json");
    const RigidTransform z_true = load_transform(dir / "z_true.json");
    detail::DatasetEvaluator ev(ds.frames, ds.mesh, ds.cam, ObjectiveConfig{});
    REQUIRE(ev.evaluate(x_true, z_true) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("synth-oracle validates its inputs") {
    REQUIRE(run_cli("synth-oracle --error 1,2,3").exit_code == 1);
    REQUIRE(run_cli("synth-oracle --error 1.5,0,0,0,0,0,0,0,0,0,0,0").exit_code == 1);
    REQUIRE(run_cli("synth-oracle --frames 0").exit_code == 1);
    REQUIRE(run_cli("synth-oracle --noise-mm -1").exit_code == 1);
}

TEST_CASE("sample-scenes streams deterministic configs") {
    const std::string args = "sample-scenes --n 5 --seed 9 --flags all";
    const RunResult a = run_cli(args);
    const RunResult b = run_cli(args);
    REQUIRE(a.exit_code == 0);
    REQUIRE(a.out == b.out);

    int lines = 0;
    for (char c : a.out) lines += c == '\n';
    REQUIRE(lines == 5);

    const fs::path out = scratch() / "scenes.jsonl";
    REQUIRE(run_cli(args + " --out \"" + out.string() + "\"").exit_code == 0);
    REQUIRE(load_scene_configs(out).size() == 5);

    REQUIRE(run_cli("sample-scenes --flags dr1,dr6 --n 1").exit_code == 0);
    REQUIRE(run_cli("sample-scenes --flags dr12 --n 1").exit_code == 1);
    REQUIRE(run_cli("sample-scenes --n 0").exit_code == 1);
}
