#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "endocal/calibrate.hpp"
#include "endocal/camera.hpp"
#include "endocal/errors.hpp"
#include "endocal/geometry.hpp"
#include "endocal/mask.hpp"
#include "endocal/metrics.hpp"
#include "endocal/objective.hpp"
#include "endocal/raster.hpp"
#include "endocal/scenegen.hpp"

namespace endocal {

inline constexpr int kManifestSchemaVersion = 1;
inline constexpr int kSceneSchemaVersion = 1;

/// Rotations this far from orthonormal are absorbed (tracker-export
/// rounding); anything worse is rejected.
inline constexpr double kTrackerDriftTolerance = 1e-3;

namespace detail {

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string(), 0, 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& token, int row, int col) {
    double v = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end)
        throw ParseError("not a number: '" + token + "'", row, col);
    return v;
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

inline const nlohmann::json& require_field(const nlohmann::json& obj, const char* key,
                                           int line) {
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(std::string("missing field '") + key + "'", line);
    return *it;
}

inline Vec3 json_to_vec3(const nlohmann::json& j, const char* what, int line) {
    if (!j.is_array() || j.size() != 3)
        throw SchemaError(std::string(what) + " must be a 3-element array", line);
    for (const auto& e : j)
        if (!e.is_number()) throw SchemaError(std::string(what) + " must be numeric", line);
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline nlohmann::json vec3_to_json(const Vec3& v) {
    return nlohmann::json::array({v.x, v.y, v.z});
}

inline nlohmann::json transform_to_json(const RigidTransform& t) {
    nlohmann::json j;
    nlohmann::json rot = nlohmann::json::array();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) rot.push_back(t.rotation(r, c));
    j["rotation"] = std::move(rot);
    j["translation_mm"] = vec3_to_json(t.translation);
    return j;
}

inline RigidTransform json_to_transform(const nlohmann::json& j, const char* what, int line) {
    if (!j.is_object()) throw SchemaError(std::string(what) + " must be an object", line);
    const nlohmann::json& rot = require_field(j, "rotation", line);
    if (!rot.is_array() || rot.size() != 9)
        throw SchemaError(std::string(what) + ".rotation must be a 9-element array", line);
    RigidTransform t;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            const auto& e = rot[static_cast<std::size_t>(r * 3 + c)];
            if (!e.is_number())
                throw SchemaError(std::string(what) + ".rotation must be numeric", line);
            t.rotation(r, c) = e.get<double>();
        }
    t.translation = json_to_vec3(require_field(j, "translation_mm", line),
                                 (std::string(what) + ".translation_mm").c_str(), line);
    if (!t.is_valid(1e-6))
        throw NonRigidRotationError(std::string(what) + " rotation is not orthonormal", line);
    return t;
}

inline nlohmann::json euler_to_json(const EulerPose& p) {
    nlohmann::json j;
    j["euler_convention"] = kEulerConvention;
    j["x_mm"] = p.x_mm;
    j["y_mm"] = p.y_mm;
    j["z_mm"] = p.z_mm;
    j["roll_deg"] = p.roll_deg;
    j["pitch_deg"] = p.pitch_deg;
    j["yaw_deg"] = p.yaw_deg;
    j["gripper_deg"] = p.gripper_deg;
    return j;
}

inline EulerPose json_to_euler(const nlohmann::json& j, int line) {
    if (!j.is_object()) throw SchemaError("pose must be an object", line);
    const nlohmann::json& conv = require_field(j, "euler_convention", line);
    if (!conv.is_string() || conv.get<std::string>() != kEulerConvention)
        throw SchemaError(std::string("unsupported euler_convention (expected ") +
                              kEulerConvention + ")",
                          line);
    EulerPose p;
    auto num = [&](const char* key) {
        const nlohmann::json& f = require_field(j, key, line);
        if (!f.is_number()) throw SchemaError(std::string(key) + " must be numeric", line);
        return f.get<double>();
    };
    p.x_mm = num("x_mm");
    p.y_mm = num("y_mm");
    p.z_mm = num("z_mm");
    p.roll_deg = num("roll_deg");
    p.pitch_deg = num("pitch_deg");
    p.yaw_deg = num("yaw_deg");
    p.gripper_deg = num("gripper_deg");
    return p;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// tracker log (CSV)

inline std::string tracker_log_header() {
    std::string h = "frame_id,t_sec";
    for (char m : {'b', 'c'})
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 4; ++c)
                h += std::string(",") + m + std::to_string(r) + std::to_string(c);
    return h;
}

inline void save_tracker_log(const std::filesystem::path& path,
                             const std::vector<CalibrationFrame>& frames) {
    std::ofstream out = detail::open_for_write(path);
    out << tracker_log_header() << '\n';
    auto write_transform = [&out](const RigidTransform& t) {
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 4; ++c) {
                const double v = c < 3 ? t.rotation(r, c)
                                       : (r == 0   ? t.translation.x
                                          : r == 1 ? t.translation.y
                                                   : t.translation.z);
                out << ',' << detail::fmt17(v);
            }
    };
    for (const CalibrationFrame& f : frames) {
        out << f.frame_id << ',' << detail::fmt17(f.timestamp_sec);
        write_transform(f.B);
        write_transform(f.C);
        out << '\n';
    }
}

/// Frames come back without annotations (see load_annotations +
/// merge_annotations). Rotation blocks within 1e-3 of orthonormal are
/// re-orthonormalized; exact blocks are kept bit-for-bit; reflections and
/// worse are rejected.
inline std::vector<CalibrationFrame> load_tracker_log(const std::filesystem::path& path) {
    const std::string text = detail::read_text_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty tracker log", 1, 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != tracker_log_header())
        throw ParseError("unexpected header (want '" + tracker_log_header() + "')", 1, 1);

    std::vector<CalibrationFrame> frames;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = detail::split_csv(line);
        if (fields.size() != 26)
            throw ParseError("expected 26 fields, got " + std::to_string(fields.size()), row,
                             static_cast<int>(fields.size()));

        CalibrationFrame f;
        {
            std::int64_t id = 0;
            const std::string& tok = fields[0];
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), id);
            if (ec != std::errc() || ptr != tok.data() + tok.size())
                throw ParseError("bad frame_id '" + tok + "'", row, 1);
            f.frame_id = id;
        }
        f.timestamp_sec = detail::parse_double(fields[1], row, 2);

        for (int block = 0; block < 2; ++block) {
            RigidTransform t;
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 4; ++c) {
                    const int col = 3 + block * 12 + r * 4 + c;
                    const double v =
                        detail::parse_double(fields[static_cast<std::size_t>(col - 1)], row, col);
                    if (c < 3) t.rotation(r, c) = v;
                    else if (r == 0) t.translation.x = v;
                    else if (r == 1) t.translation.y = v;
                    else t.translation.z = v;
                }
            const double drift = t.rotation.orthonormality_drift();
            if (drift > kTrackerDriftTolerance)
                throw NonRigidRotationError("rotation drift " + std::to_string(drift) +
                                                " exceeds " +
                                                std::to_string(kTrackerDriftTolerance),
                                            row);
            if (drift > 1e-12) t.reorthonormalize();
            if (t.rotation.determinant() < 0.0)
                throw NonRigidRotationError("rotation block is a reflection", row);
            (block == 0 ? f.B : f.C) = t;
        }
        frames.push_back(std::move(f));
    }
    return frames;
}

// ---------------------------------------------------------------------------
// annotations (JSON Lines)

/// One annotation line; gripper_deg is an optional documented field, and
/// extras holds unknown fields accepted in lax mode (round-tripped on
/// save).
struct AnnotationRecord {
    ContourAnnotation annotation;
    std::optional<double> gripper_deg;
    nlohmann::json extras = nlohmann::json::object();
};

inline std::vector<AnnotationRecord> load_annotation_records(const std::filesystem::path& path,
                                                             bool strict = true) {
    const std::string text = detail::read_text_file(path);
    std::istringstream in(text);
    std::string line;
    std::vector<AnnotationRecord> records;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(std::string("invalid JSON: ") + e.what(), lineno);
        }
        if (!j.is_object()) throw SchemaError("record must be an object", lineno);

        AnnotationRecord rec;
        const nlohmann::json& fid = detail::require_field(j, "frame_id", lineno);
        if (!fid.is_number_integer()) throw SchemaError("frame_id must be an integer", lineno);
        rec.annotation.frame_id = fid.get<std::int64_t>();
        const nlohmann::json& iid = detail::require_field(j, "instrument_id", lineno);
        if (!iid.is_number_integer())
            throw SchemaError("instrument_id must be an integer", lineno);
        rec.annotation.instrument_id = iid.get<int>();

        const nlohmann::json& polys = detail::require_field(j, "polygons", lineno);
        if (!polys.is_array() || polys.empty())
            throw SchemaError("polygons must be a non-empty array", lineno);
        for (const auto& poly : polys) {
            if (!poly.is_array() || poly.size() < 3)
                throw SchemaError("polygon must have at least 3 vertices", lineno);
            std::vector<Pixel> verts;
            for (const auto& v : poly) {
                if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
                    throw SchemaError("polygon vertex must be [u, v]", lineno);
                verts.push_back({v[0].get<double>(), v[1].get<double>()});
            }
            rec.annotation.polygons.push_back(std::move(verts));
        }

        for (auto it = j.begin(); it != j.end(); ++it) {
            const std::string& key = it.key();
            if (key == "frame_id" || key == "instrument_id" || key == "polygons") continue;
            if (key == "gripper_deg") {
                if (!it.value().is_number())
                    throw SchemaError("gripper_deg must be numeric", lineno);
                rec.gripper_deg = it.value().get<double>();
                continue;
            }
            if (strict) throw SchemaError("unknown field '" + key + "'", lineno);
            rec.extras[key] = it.value();
        }
        records.push_back(std::move(rec));
    }
    return records;
}

inline void save_annotation_records(const std::filesystem::path& path,
                                    const std::vector<AnnotationRecord>& records) {
    std::ofstream out = detail::open_for_write(path);
    for (const AnnotationRecord& rec : records) {
        nlohmann::json j = rec.extras;
        j["frame_id"] = rec.annotation.frame_id;
        j["instrument_id"] = rec.annotation.instrument_id;
        nlohmann::json polys = nlohmann::json::array();
        for (const auto& poly : rec.annotation.polygons) {
            nlohmann::json p = nlohmann::json::array();
            for (const Pixel& v : poly) p.push_back(nlohmann::json::array({v.u, v.v}));
            polys.push_back(std::move(p));
        }
        j["polygons"] = std::move(polys);
        if (rec.gripper_deg) j["gripper_deg"] = *rec.gripper_deg;
        out << j.dump() << '\n';
    }
}

inline std::vector<ContourAnnotation> load_annotations(const std::filesystem::path& path,
                                                       bool strict = true) {
    std::vector<ContourAnnotation> out;
    for (AnnotationRecord& rec : load_annotation_records(path, strict))
        out.push_back(std::move(rec.annotation));
    return out;
}

inline void save_annotations(const std::filesystem::path& path,
                             const std::vector<ContourAnnotation>& annotations) {
    std::vector<AnnotationRecord> records;
    for (const ContourAnnotation& a : annotations) records.push_back({a, std::nullopt, {}});
    save_annotation_records(path, records);
}

/// Attaches annotation records to their frames by frame_id and fills the
/// per-instrument gripper angles.
inline void merge_annotations(std::vector<CalibrationFrame>& frames,
                              const std::vector<AnnotationRecord>& records) {
    std::map<std::int64_t, std::size_t> by_id;
    for (std::size_t i = 0; i < frames.size(); ++i) by_id[frames[i].frame_id] = i;
    for (const AnnotationRecord& rec : records) {
        auto it = by_id.find(rec.annotation.frame_id);
        if (it == by_id.end())
            throw DanglingIndexError("annotation references unknown frame " +
                                     std::to_string(rec.annotation.frame_id));
        CalibrationFrame& frame = frames[it->second];
        frame.annotations.push_back(rec.annotation);
        if (rec.gripper_deg)
            frame.gripper_deg[rec.annotation.instrument_id] = *rec.gripper_deg;
    }
}

// ---------------------------------------------------------------------------
// mesh (OBJ subset + sidecar JSON)

/// Supported subset: '#' comments, 'v x y z', 'f i j k' with plain 1-based
/// indices. Everything else is rejected loudly rather than skipped.
inline TriangleMesh load_obj(const std::filesystem::path& path) {
    const std::string text = detail::read_text_file(path);
    std::istringstream in(text);
    std::string line;
    TriangleMesh mesh;
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string directive;
        if (!(ls >> directive)) continue;  // blank
        if (directive[0] == '#') continue;

        if (directive == "v") {
            std::vector<std::string> toks;
            std::string t;
            while (ls >> t) toks.push_back(t);
            if (toks.size() != 3)
                throw ParseError("'v' needs exactly 3 coordinates", row, 1);
            Vec3 v;
            v.x = detail::parse_double(toks[0], row, 2);
            v.y = detail::parse_double(toks[1], row, 3);
            v.z = detail::parse_double(toks[2], row, 4);
            mesh.vertices.push_back(v);
        } else if (directive == "f") {
            std::vector<std::string> toks;
            std::string t;
            while (ls >> t) toks.push_back(t);
            if (toks.size() != 3)
                throw UnsupportedDirectiveError("only triangle faces are supported (row " +
                                                std::to_string(row) + ")");
            std::array<int, 3> tri{};
            for (int i = 0; i < 3; ++i) {
                const std::string& tok = toks[static_cast<std::size_t>(i)];
                if (tok.find('/') != std::string::npos)
                    throw UnsupportedDirectiveError(
                        "face vertex syntax with '/' is not supported (row " +
                        std::to_string(row) + ")");
                long idx = 0;
                auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), idx);
                if (ec != std::errc() || ptr != tok.data() + tok.size())
                    throw ParseError("bad face index '" + tok + "'", row, i + 2);
                if (idx < 1 || idx > static_cast<long>(mesh.vertices.size()))
                    throw DanglingIndexError("face index " + std::to_string(idx) +
                                             " out of range (row " + std::to_string(row) + ")");
                tri[static_cast<std::size_t>(i)] = static_cast<int>(idx - 1);
            }
            mesh.triangles.push_back(tri);
        } else {
            throw UnsupportedDirectiveError("directive '" + directive +
                                            "' is not in the supported OBJ subset (row " +
                                            std::to_string(row) + ")");
        }
    }
    return mesh;
}

inline void save_obj(const std::filesystem::path& path, const TriangleMesh& mesh) {
    std::ofstream out = detail::open_for_write(path);
    for (const Vec3& v : mesh.vertices)
        out << "v " << detail::fmt17(v.x) << ' ' << detail::fmt17(v.y) << ' '
            << detail::fmt17(v.z) << '\n';
    for (const auto& t : mesh.triangles)
        out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

inline void save_mesh_sidecar(const std::filesystem::path& path, const TriangleMesh& mesh) {
    nlohmann::json j;
    nlohmann::json parts = nlohmann::json::array();
    for (const MeshPart& p : mesh.parts) {
        nlohmann::json pj;
        pj["name"] = p.name;
        pj["triangles"] = nlohmann::json::array({p.tri_begin, p.tri_count});
        const EulerPose e = to_euler(p.part_to_body);
        pj["transform"] = {{"t", detail::vec3_to_json(p.part_to_body.translation)},
                           {"rpy_deg", nlohmann::json::array(
                                           {e.roll_deg, e.pitch_deg, e.yaw_deg})}};
        parts.push_back(std::move(pj));
    }
    j["parts"] = std::move(parts);
    if (mesh.joint) {
        nlohmann::json joint;
        joint["axis"] = detail::vec3_to_json(mesh.joint->axis);
        joint["origin"] = detail::vec3_to_json(mesh.joint->origin);
        nlohmann::json signs = nlohmann::json::object();
        for (const MeshPart& p : mesh.parts)
            if (p.hinge_sign != 0) signs[p.name] = p.hinge_sign;
        joint["signs"] = std::move(signs);
        j["joint"] = std::move(joint);
    }
    std::ofstream out = detail::open_for_write(path);
    out << j.dump(2) << '\n';
}

inline void save_mesh(const std::filesystem::path& obj_path,
                      const std::filesystem::path& sidecar_path, const TriangleMesh& mesh) {
    save_obj(obj_path, mesh);
    save_mesh_sidecar(sidecar_path, mesh);
}

inline TriangleMesh load_mesh(const std::filesystem::path& obj_path,
                              const std::filesystem::path& sidecar_path) {
    TriangleMesh mesh = load_obj(obj_path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(detail::read_text_file(sidecar_path));
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("invalid sidecar JSON: ") + e.what(), 1);
    }
    if (!j.is_object()) throw SchemaError("sidecar must be an object", 1);

    const nlohmann::json& parts = detail::require_field(j, "parts", 1);
    if (!parts.is_array()) throw SchemaError("parts must be an array", 1);
    for (const auto& pj : parts) {
        MeshPart p;
        const nlohmann::json& name = detail::require_field(pj, "name", 1);
        if (!name.is_string()) throw SchemaError("part name must be a string", 1);
        p.name = name.get<std::string>();
        const nlohmann::json& tr = detail::require_field(pj, "triangles", 1);
        if (!tr.is_array() || tr.size() != 2 || !tr[0].is_number_unsigned() ||
            !tr[1].is_number_unsigned())
            throw SchemaError("part triangles must be [start, count]", 1);
        p.tri_begin = tr[0].get<std::size_t>();
        p.tri_count = tr[1].get<std::size_t>();
        if (pj.contains("transform")) {
            const nlohmann::json& tj = pj["transform"];
            const Vec3 t = detail::json_to_vec3(detail::require_field(tj, "t", 1), "t", 1);
            const Vec3 rpy =
                detail::json_to_vec3(detail::require_field(tj, "rpy_deg", 1), "rpy_deg", 1);
            p.part_to_body = from_euler(t, rpy);
        }
        mesh.parts.push_back(std::move(p));
    }

    if (j.contains("joint")) {
        const nlohmann::json& jj = j["joint"];
        Hinge hinge;
        hinge.axis = detail::json_to_vec3(detail::require_field(jj, "axis", 1), "axis", 1);
        const double n = hinge.axis.norm();
        if (std::abs(n - 1.0) > 1e-6)
            throw SchemaError("joint axis must be unit length", 1);
        hinge.axis = hinge.axis * (1.0 / n);
        hinge.origin = detail::json_to_vec3(detail::require_field(jj, "origin", 1), "origin", 1);
        const nlohmann::json& signs = detail::require_field(jj, "signs", 1);
        if (!signs.is_object()) throw SchemaError("joint signs must be an object", 1);
        for (auto it = signs.begin(); it != signs.end(); ++it) {
            bool found = false;
            for (MeshPart& p : mesh.parts)
                if (p.name == it.key()) {
                    if (!it.value().is_number_integer())
                        throw SchemaError("hinge sign must be an integer", 1);
                    const int s = it.value().get<int>();
                    if (s < -1 || s > 1) throw SchemaError("hinge sign must be -1, 0, or 1", 1);
                    p.hinge_sign = s;
                    found = true;
                    break;
                }
            if (!found)
                throw UnknownPartError("joint sign for undeclared part '" + it.key() + "'");
        }
        mesh.joint = hinge;
    }
    mesh.validate();
    return mesh;
}

// ---------------------------------------------------------------------------
// intrinsics / poses / nominals (JSON)

inline nlohmann::json intrinsics_to_json(const CameraIntrinsics& cam) {
    nlohmann::json j;
    j["fx"] = cam.fx;
    j["fy"] = cam.fy;
    j["cx"] = cam.cx;
    j["cy"] = cam.cy;
    j["k1"] = cam.k1;
    j["k2"] = cam.k2;
    j["width"] = cam.width;
    j["height"] = cam.height;
    j["circle"] = {{"u", cam.view_circle.u}, {"v", cam.view_circle.v}, {"r", cam.view_circle.r}};
    return j;
}

inline void save_intrinsics(const std::filesystem::path& path, const CameraIntrinsics& cam) {
    std::ofstream out = detail::open_for_write(path);
    out << intrinsics_to_json(cam).dump(2) << '\n';
}

inline CameraIntrinsics load_intrinsics(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(detail::read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("invalid intrinsics JSON: ") + e.what(), 1);
    }
    auto num = [&](const char* key) {
        const nlohmann::json& f = detail::require_field(j, key, 1);
        if (!f.is_number()) throw SchemaError(std::string(key) + " must be numeric", 1);
        return f.get<double>();
    };
    CameraIntrinsics cam;
    cam.fx = num("fx");
    cam.fy = num("fy");
    cam.cx = num("cx");
    cam.cy = num("cy");
    cam.k1 = num("k1");
    cam.k2 = num("k2");
    const nlohmann::json& w = detail::require_field(j, "width", 1);
    const nlohmann::json& h = detail::require_field(j, "height", 1);
    if (!w.is_number_integer() || !h.is_number_integer())
        throw SchemaError("width/height must be integers", 1);
    cam.width = w.get<int>();
    cam.height = h.get<int>();
    const nlohmann::json& circle = detail::require_field(j, "circle", 1);
    auto cnum = [&](const char* key) {
        const nlohmann::json& f = detail::require_field(circle, key, 1);
        if (!f.is_number()) throw SchemaError(std::string("circle.") + key + " must be numeric", 1);
        return f.get<double>();
    };
    cam.view_circle.u = cnum("u");
    cam.view_circle.v = cnum("v");
    cam.view_circle.r = cnum("r");
    if (!cam.is_valid()) throw SchemaError("intrinsics are not self-consistent", 1);
    return cam;
}

inline void save_pose(const std::filesystem::path& path, const EulerPose& pose) {
    std::ofstream out = detail::open_for_write(path);
    out << detail::euler_to_json(pose).dump(2) << '\n';
}

inline EulerPose load_pose(const std::filesystem::path& path) {
    try {
        return detail::json_to_euler(nlohmann::json::parse(detail::read_text_file(path)), 1);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("invalid pose JSON: ") + e.what(), 1);
    }
}

inline void save_transform(const std::filesystem::path& path, const RigidTransform& t) {
    std::ofstream out = detail::open_for_write(path);
    out << detail::transform_to_json(t).dump(2) << '\n';
}

inline RigidTransform load_transform(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(detail::read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("invalid transform JSON: ") + e.what(), 1);
    }
    return detail::json_to_transform(j, "transform", 1);
}

inline void save_nominals(const std::filesystem::path& path, const HandEyeNominals& nom) {
    nlohmann::json j;
    j["X_nom"] = detail::transform_to_json(nom.X_nom);
    j["Z_nom"] = detail::transform_to_json(nom.Z_nom);
    std::ofstream out = detail::open_for_write(path);
    out << j.dump(2) << '\n';
}

inline HandEyeNominals load_nominals(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(detail::read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("invalid nominals JSON: ") + e.what(), 1);
    }
    HandEyeNominals nom;
    nom.X_nom = detail::json_to_transform(detail::require_field(j, "X_nom", 1), "X_nom", 1);
    nom.Z_nom = detail::json_to_transform(detail::require_field(j, "Z_nom", 1), "Z_nom", 1);
    return nom;
}

// ---------------------------------------------------------------------------
// calibration result (JSON)

struct ResultFile {
    CalibrationResult result;
    ObjectiveConfig objective;
    SearchConfig search;
};

inline nlohmann::json result_to_json(const ResultFile& rf) {
    nlohmann::json j;
    j["correction"] = {{"dx_x_mm", detail::vec3_to_json(rf.result.correction.dx_X)},
                       {"drpy_x_deg", detail::vec3_to_json(rf.result.correction.drpy_X)},
                       {"dx_z_mm", detail::vec3_to_json(rf.result.correction.dx_Z)},
                       {"drpy_z_deg", detail::vec3_to_json(rf.result.correction.drpy_Z)}};
    j["x_cal"] = detail::transform_to_json(rf.result.X_cal);
    j["z_cal"] = detail::transform_to_json(rf.result.Z_cal);
    j["objective_before"] = rf.result.objective_before;
    j["objective_after"] = rf.result.objective_after;
    nlohmann::json trace = nlohmann::json::array();
    for (const TraceEntry& e : rf.result.trace)
        trace.push_back({{"param", e.parameter},
                         {"name", kParameterNames[static_cast<std::size_t>(e.parameter)]},
                         {"value", e.value},
                         {"objective", e.objective}});
    j["trace"] = std::move(trace);
    j["config"] = {{"alpha", rf.objective.alpha},
                   {"d_max", rf.objective.d_max},
                   {"aggregate", rf.objective.aggregate == Aggregate::kMean ? "mean" : "sum"},
                   {"max_sweeps", rf.search.max_sweeps},
                   {"line_tolerance", rf.search.line_tolerance},
                   {"sweep_improvement_tol", rf.search.sweep_improvement_tol},
                   {"bound_mm", rf.search.bound_mm},
                   {"bound_deg", rf.search.bound_deg},
                   {"coordinates", rf.search.coordinates}};
    return j;
}

inline void save_result(const std::filesystem::path& path, const ResultFile& rf) {
    std::ofstream out = detail::open_for_write(path);
    out << result_to_json(rf).dump(2) << '\n';
}

inline ResultFile load_result(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(detail::read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("invalid result JSON: ") + e.what(), 1);
    }
    ResultFile rf;
    const nlohmann::json& corr = detail::require_field(j, "correction", 1);
    rf.result.correction.dx_X =
        detail::json_to_vec3(detail::require_field(corr, "dx_x_mm", 1), "dx_x_mm", 1);
    rf.result.correction.drpy_X =
        detail::json_to_vec3(detail::require_field(corr, "drpy_x_deg", 1), "drpy_x_deg", 1);
    rf.result.correction.dx_Z =
        detail::json_to_vec3(detail::require_field(corr, "dx_z_mm", 1), "dx_z_mm", 1);
    rf.result.correction.drpy_Z =
        detail::json_to_vec3(detail::require_field(corr, "drpy_z_deg", 1), "drpy_z_deg", 1);
    rf.result.X_cal = detail::json_to_transform(detail::require_field(j, "x_cal", 1), "x_cal", 1);
    rf.result.Z_cal = detail::json_to_transform(detail::require_field(j, "z_cal", 1), "z_cal", 1);
    rf.result.objective_before = detail::require_field(j, "objective_before", 1).get<double>();
    rf.result.objective_after = detail::require_field(j, "objective_after", 1).get<double>();
    for (const auto& e : detail::require_field(j, "trace", 1)) {
        TraceEntry t;
        t.parameter = detail::require_field(e, "param", 1).get<int>();
        t.value = detail::require_field(e, "value", 1).get<double>();
        t.objective = detail::require_field(e, "objective", 1).get<double>();
        rf.result.trace.push_back(t);
    }
    const nlohmann::json& cfg = detail::require_field(j, "config", 1);
    rf.objective.alpha = detail::require_field(cfg, "alpha", 1).get<double>();
    rf.objective.d_max = detail::require_field(cfg, "d_max", 1).get<double>();
    rf.objective.aggregate =
        detail::require_field(cfg, "aggregate", 1).get<std::string>() == "sum"
            ? Aggregate::kSum
            : Aggregate::kMean;
    rf.search.max_sweeps = detail::require_field(cfg, "max_sweeps", 1).get<int>();
    rf.search.line_tolerance = detail::require_field(cfg, "line_tolerance", 1).get<double>();
    rf.search.sweep_improvement_tol =
        detail::require_field(cfg, "sweep_improvement_tol", 1).get<double>();
    rf.search.bound_mm = detail::require_field(cfg, "bound_mm", 1).get<double>();
    rf.search.bound_deg = detail::require_field(cfg, "bound_deg", 1).get<double>();
    rf.search.coordinates =
        detail::require_field(cfg, "coordinates", 1).get<std::vector<int>>();
    return rf;
}

// ---------------------------------------------------------------------------
// masks (binary PGM, P5)

inline void save_pgm(const std::filesystem::path& path, const BinaryMask& mask) {
    std::ofstream out = detail::open_for_write(path);
    out << "P5\n" << mask.width << ' ' << mask.height << "\n255\n";
    std::string row(static_cast<std::size_t>(mask.width), '\0');
    for (int v = 0; v < mask.height; ++v) {
        for (int u = 0; u < mask.width; ++u)
            row[static_cast<std::size_t>(u)] = mask.get(u, v) ? '\xff' : '\0';
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
}

inline BinaryMask load_pgm(const std::filesystem::path& path) {
    const std::string text = detail::read_text_file(path);
    std::size_t pos = 0;
    auto next_token = [&]() -> std::string {
        while (pos < text.size()) {
            if (text[pos] == '#') {
                while (pos < text.size() && text[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(text[pos]))) {
                ++pos;
            } else {
                break;
            }
        }
        const std::size_t start = pos;
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        return text.substr(start, pos - start);
    };
    if (next_token() != "P5") throw ParseError("not a binary PGM (want P5)", 1, 1);
    const std::string ws = next_token(), hs = next_token(), ms = next_token();
    int w = 0, h = 0, maxval = 0;
    try {
        w = std::stoi(ws);
        h = std::stoi(hs);
        maxval = std::stoi(ms);
    } catch (const std::exception&) {
        throw ParseError("bad PGM header", 1, 1);
    }
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
        throw ParseError("unsupported PGM header", 1, 1);
    ++pos;  // single whitespace after maxval
    if (text.size() - pos < static_cast<std::size_t>(w) * static_cast<std::size_t>(h))
        throw ParseError("truncated PGM payload", 1, 1);
    BinaryMask mask(w, h);
    for (int v = 0; v < h; ++v)
        for (int u = 0; u < w; ++u)
            if (text[pos + static_cast<std::size_t>(v) * w + u] != '\0') mask.set(u, v);
    return mask;
}

// ---------------------------------------------------------------------------
// catalogs (plain-text lists)

inline std::vector<std::string> load_catalog(const std::filesystem::path& path) {
    const std::string text = detail::read_text_file(path);
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> entries;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) entries.push_back(line);
    }
    return entries;
}

inline void save_catalog(const std::filesystem::path& path,
                         const std::vector<std::string>& entries) {
    std::ofstream out = detail::open_for_write(path);
    for (const std::string& e : entries) out << e << '\n';
}

// ---------------------------------------------------------------------------
// scene configs (JSON Lines)

namespace detail {

inline nlohmann::json appearance_to_json(const Appearance& a) {
    return {{"hue_shift", a.hue_shift},
            {"brightness_scale", a.brightness_scale},
            {"roughness", a.roughness}};
}

inline Appearance json_to_appearance(const nlohmann::json& j, int line) {
    Appearance a;
    a.hue_shift = require_field(j, "hue_shift", line).get<double>();
    a.brightness_scale = require_field(j, "brightness_scale", line).get<double>();
    a.roughness = require_field(j, "roughness", line).get<double>();
    return a;
}

}  // namespace detail

inline nlohmann::json scene_to_json(const SceneConfig& sc) {
    nlohmann::json j;
    j["schema_version"] = kSceneSchemaVersion;
    j["scene_id"] = sc.scene_id;
    j["width"] = sc.width;
    j["height"] = sc.height;

    nlohmann::json instruments = nlohmann::json::array();
    for (const InstrumentConfig& inst : sc.instruments) {
        nlohmann::json ij;
        ij["pose"] = detail::euler_to_json(inst.pose);
        ij["appearance"] = detail::appearance_to_json(inst.appearance);
        if (!inst.per_part.empty()) {
            nlohmann::json pp = nlohmann::json::object();
            for (const auto& [name, app] : inst.per_part)
                pp[name] = detail::appearance_to_json(app);
            ij["per_part"] = std::move(pp);
        }
        if (inst.scratch) {
            ij["scratch"] = {{"count", inst.scratch->count},
                             {"length_px", inst.scratch->length_px},
                             {"width_px", inst.scratch->width_px},
                             {"depth_sign", inst.scratch->depth_sign},
                             {"placement_seed", inst.scratch->placement_seed}};
        }
        if (!inst.convex_maps.empty()) ij["convex_maps"] = inst.convex_maps;
        instruments.push_back(std::move(ij));
    }
    j["instruments"] = std::move(instruments);

    nlohmann::json lights = nlohmann::json::array();
    for (const LightConfig& l : sc.lights)
        lights.push_back({{"kind", to_string(l.kind)},
                          {"position_mm", detail::vec3_to_json(l.position_mm)},
                          {"intensity", l.intensity}});
    j["lights"] = std::move(lights);

    nlohmann::json bg;
    bg["source"] = to_string(sc.background.source);
    bg["image_ref"] = sc.background.image_ref;
    if (sc.background.augmentation)
        bg["augmentation"] = {{"hue_shift", sc.background.augmentation->hue_shift},
                              {"brightness_scale", sc.background.augmentation->brightness_scale}};
    j["background"] = std::move(bg);

    j["metadata"] = {{"intensity_distribution", "log_uniform[5,1e6]"},
                     {"hue_shift_range", nlohmann::json::array({-0.5, 0.5})},
                     {"brightness_scale_range", nlohmann::json::array({0.5, 1.5})}};
    return j;
}

inline SceneConfig scene_from_json(const nlohmann::json& j, int line = 1) {
    if (!j.is_object()) throw SchemaError("scene record must be an object", line);
    const nlohmann::json& ver = detail::require_field(j, "schema_version", line);
    if (!ver.is_number_integer() || ver.get<int>() != kSceneSchemaVersion)
        throw SchemaError("unsupported scene schema_version", line);

    SceneConfig sc;
    sc.scene_id = detail::require_field(j, "scene_id", line).get<std::int64_t>();
    sc.width = detail::require_field(j, "width", line).get<int>();
    sc.height = detail::require_field(j, "height", line).get<int>();

    for (const auto& ij : detail::require_field(j, "instruments", line)) {
        InstrumentConfig inst;
        inst.pose = detail::json_to_euler(detail::require_field(ij, "pose", line), line);
        inst.appearance =
            detail::json_to_appearance(detail::require_field(ij, "appearance", line), line);
        if (ij.contains("per_part"))
            for (auto it = ij["per_part"].begin(); it != ij["per_part"].end(); ++it)
                inst.per_part[it.key()] = detail::json_to_appearance(it.value(), line);
        if (ij.contains("scratch")) {
            const nlohmann::json& s = ij["scratch"];
            ScratchRecipe r;
            r.count = detail::require_field(s, "count", line).get<int>();
            r.length_px = detail::require_field(s, "length_px", line).get<double>();
            r.width_px = detail::require_field(s, "width_px", line).get<double>();
            r.depth_sign = detail::require_field(s, "depth_sign", line).get<int>();
            r.placement_seed =
                detail::require_field(s, "placement_seed", line).get<std::uint64_t>();
            inst.scratch = r;
        }
        if (ij.contains("convex_maps"))
            inst.convex_maps = ij["convex_maps"].get<std::vector<std::string>>();
        sc.instruments.push_back(std::move(inst));
    }

    for (const auto& lj : detail::require_field(j, "lights", line)) {
        LightConfig l;
        const std::string kind = detail::require_field(lj, "kind", line).get<std::string>();
        if (kind == "point") l.kind = LightKind::kPoint;
        else if (kind == "sun") l.kind = LightKind::kSun;
        else if (kind == "area") l.kind = LightKind::kArea;
        else if (kind == "hemi") l.kind = LightKind::kHemi;
        else throw SchemaError("unknown light kind '" + kind + "'", line);
        l.position_mm = detail::json_to_vec3(detail::require_field(lj, "position_mm", line),
                                             "position_mm", line);
        l.intensity = detail::require_field(lj, "intensity", line).get<double>();
        sc.lights.push_back(l);
    }

    const nlohmann::json& bg = detail::require_field(j, "background", line);
    const std::string source = detail::require_field(bg, "source", line).get<std::string>();
    if (source == "contextual") sc.background.source = BackgroundSource::kContextual;
    else if (source == "contextual_augmented")
        sc.background.source = BackgroundSource::kContextualAugmented;
    else if (source == "surgery") sc.background.source = BackgroundSource::kSurgery;
    else if (source == "coco") sc.background.source = BackgroundSource::kCoco;
    else throw SchemaError("unknown background source '" + source + "'", line);
    sc.background.image_ref = detail::require_field(bg, "image_ref", line).get<std::string>();
    if (bg.contains("augmentation")) {
        TextureAugmentation aug;
        aug.hue_shift =
            detail::require_field(bg["augmentation"], "hue_shift", line).get<double>();
        aug.brightness_scale =
            detail::require_field(bg["augmentation"], "brightness_scale", line).get<double>();
        sc.background.augmentation = aug;
    }
    return sc;
}

inline void save_scene_configs(const std::filesystem::path& path,
                               const std::vector<SceneConfig>& scenes) {
    std::ofstream out = detail::open_for_write(path);
    for (const SceneConfig& sc : scenes) out << scene_to_json(sc).dump() << '\n';
}

inline std::vector<SceneConfig> load_scene_configs(const std::filesystem::path& path) {
    const std::string text = detail::read_text_file(path);
    std::istringstream in(text);
    std::string line;
    std::vector<SceneConfig> scenes;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(std::string("invalid JSON: ") + e.what(), lineno);
        }
        scenes.push_back(scene_from_json(j, lineno));
    }
    return scenes;
}

// ---------------------------------------------------------------------------
// evaluation instance records (JSON Lines)

/// One pose/box instance keyed by id; predictions and ground truth share
/// the format (score defaults to 1 and is usually omitted in ground
/// truth).
struct InstanceRecord {
    std::int64_t id = 0;
    EulerPose pose;
    BoundingBox2D box;
    double score = 1.0;
};

inline void save_instance_records(const std::filesystem::path& path,
                                  const std::vector<InstanceRecord>& records) {
    std::ofstream out = detail::open_for_write(path);
    for (const InstanceRecord& r : records) {
        nlohmann::json j;
        j["id"] = r.id;
        j["pose"] = detail::euler_to_json(r.pose);
        j["box"] = {{"u_min", r.box.u_min},
                    {"v_min", r.box.v_min},
                    {"u_max", r.box.u_max},
                    {"v_max", r.box.v_max}};
        j["score"] = r.score;
        out << j.dump() << '\n';
    }
}

inline std::vector<InstanceRecord> load_instance_records(const std::filesystem::path& path) {
    const std::string text = detail::read_text_file(path);
    std::istringstream in(text);
    std::string line;
    std::vector<InstanceRecord> records;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(std::string("invalid JSON: ") + e.what(), lineno);
        }
        InstanceRecord r;
        r.id = detail::require_field(j, "id", lineno).get<std::int64_t>();
        r.pose = detail::json_to_euler(detail::require_field(j, "pose", lineno), lineno);
        const nlohmann::json& box = detail::require_field(j, "box", lineno);
        r.box.u_min = detail::require_field(box, "u_min", lineno).get<double>();
        r.box.v_min = detail::require_field(box, "v_min", lineno).get<double>();
        r.box.u_max = detail::require_field(box, "u_max", lineno).get<double>();
        r.box.v_max = detail::require_field(box, "v_max", lineno).get<double>();
        r.box.validate();
        if (j.contains("score")) r.score = j["score"].get<double>();
        records.push_back(r);
    }
    return records;
}

/// Pairs ground truth with predictions by id. Every prediction must match
/// a ground-truth id; ground truth without a prediction yields an
/// undetected pair.
inline std::vector<EvaluationPair> build_evaluation_pairs(
    const std::vector<InstanceRecord>& predictions,
    const std::vector<InstanceRecord>& ground_truths) {
    std::map<std::int64_t, const InstanceRecord*> pred_by_id;
    for (const InstanceRecord& p : predictions) {
        if (!pred_by_id.emplace(p.id, &p).second)
            throw DanglingIndexError("duplicate prediction id " + std::to_string(p.id));
    }
    std::map<std::int64_t, bool> gt_ids;
    for (const InstanceRecord& g : ground_truths) {
        if (!gt_ids.emplace(g.id, true).second)
            throw DanglingIndexError("duplicate ground-truth id " + std::to_string(g.id));
    }
    for (const InstanceRecord& p : predictions)
        if (gt_ids.find(p.id) == gt_ids.end())
            throw DanglingIndexError("prediction id " + std::to_string(p.id) +
                                     " has no ground truth");

    std::vector<EvaluationPair> pairs;
    for (const InstanceRecord& g : ground_truths) {
        EvaluationPair pair;
        pair.gt_pose = from_euler(g.pose);
        pair.gt_box = g.box;
        auto it = pred_by_id.find(g.id);
        if (it == pred_by_id.end()) {
            pair.has_prediction = false;
        } else {
            pair.pred_pose = from_euler(it->second->pose);
            pair.pred_box = it->second->box;
            pair.score = it->second->score;
        }
        pairs.push_back(pair);
    }
    return pairs;
}

inline nlohmann::json summary_to_json(const PoseErrorSummary& s, double thr) {
    nlohmann::json j;
    if (s.mean_translation_mm) j["mean_translation_mm"] = *s.mean_translation_mm;
    else j["mean_translation_mm"] = nullptr;
    if (s.mean_centerline_deg) j["mean_centerline_deg"] = *s.mean_centerline_deg;
    else j["mean_centerline_deg"] = nullptr;
    j["detected_rate_pct"] = s.detected_rate_pct;
    j["map_at_50"] = s.map_at_50;
    j["protocol"] = {{"iou_threshold", thr},
                     {"matching", "score-sorted greedy, one match per ground truth"},
                     {"interpolation", "all-points"}};
    return j;
}

// ---------------------------------------------------------------------------
// dataset manifest

struct DatasetManifest {
    std::filesystem::path root;
    std::filesystem::path intrinsics;
    std::filesystem::path mesh_obj;
    std::filesystem::path mesh_sidecar;
    std::filesystem::path tracker_csv;
    std::filesystem::path annotations_jsonl;
    std::filesystem::path nominals;
    std::optional<std::filesystem::path> catalog_contextual;
    std::optional<std::filesystem::path> catalog_surgery;
    std::optional<std::filesystem::path> catalog_coco;
    std::optional<std::filesystem::path> catalog_convex_maps;
};

inline DatasetManifest load_manifest(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(detail::read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("invalid manifest JSON: ") + e.what(), 1);
    }
    const nlohmann::json& ver = detail::require_field(j, "schema_version", 1);
    if (!ver.is_number_integer() || ver.get<int>() != kManifestSchemaVersion)
        throw SchemaError("unsupported manifest schema_version", 1);

    DatasetManifest m;
    m.root = std::filesystem::absolute(path).parent_path();
    auto resolve = [&](const char* key) {
        const nlohmann::json& f = detail::require_field(j, key, 1);
        if (!f.is_string()) throw SchemaError(std::string(key) + " must be a path string", 1);
        const std::filesystem::path p = m.root / f.get<std::string>();
        if (!std::filesystem::exists(p))
            throw SchemaError(std::string(key) + " references a missing file: " + p.string(), 1);
        return p;
    };
    m.intrinsics = resolve("intrinsics");
    m.mesh_obj = resolve("mesh_obj");
    m.mesh_sidecar = resolve("mesh_sidecar");
    m.tracker_csv = resolve("tracker_csv");
    m.annotations_jsonl = resolve("annotations_jsonl");
    m.nominals = resolve("nominals");
    if (j.contains("catalogs")) {
        const nlohmann::json& cats = j["catalogs"];
        auto resolve_cat = [&](const char* key) -> std::optional<std::filesystem::path> {
            if (!cats.contains(key)) return std::nullopt;
            const std::filesystem::path p = m.root / cats[key].get<std::string>();
            if (!std::filesystem::exists(p))
                throw SchemaError(std::string("catalogs.") + key +
                                      " references a missing file: " + p.string(),
                                  1);
            return p;
        };
        m.catalog_contextual = resolve_cat("contextual");
        m.catalog_surgery = resolve_cat("surgery");
        m.catalog_coco = resolve_cat("coco");
        m.catalog_convex_maps = resolve_cat("convex_maps");
    }
    return m;
}

/// Writes a manifest with the given paths stored relative to the manifest
/// location.
inline void save_manifest(const std::filesystem::path& path,
                          const std::map<std::string, std::string>& entries,
                          const std::map<std::string, std::string>& catalogs = {}) {
    nlohmann::json j;
    j["schema_version"] = kManifestSchemaVersion;
    for (const auto& [key, value] : entries) j[key] = value;
    if (!catalogs.empty()) {
        nlohmann::json cats = nlohmann::json::object();
        for (const auto& [key, value] : catalogs) cats[key] = value;
        j["catalogs"] = std::move(cats);
    }
    std::ofstream out = detail::open_for_write(path);
    out << j.dump(2) << '\n';
}

struct LoadedDataset {
    std::vector<CalibrationFrame> frames;  // annotations merged in
    HandEyeNominals nominals;
    TriangleMesh mesh;
    CameraIntrinsics cam;
};

inline LoadedDataset load_dataset(const std::filesystem::path& manifest_path) {
    const DatasetManifest m = load_manifest(manifest_path);
    LoadedDataset d;
    d.cam = load_intrinsics(m.intrinsics);
    d.mesh = load_mesh(m.mesh_obj, m.mesh_sidecar);
    d.nominals = load_nominals(m.nominals);
    d.frames = load_tracker_log(m.tracker_csv);
    merge_annotations(d.frames, load_annotation_records(m.annotations_jsonl));
    return d;
}

}  // namespace endocal
