#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "endocal/camera.hpp"
#include "endocal/errors.hpp"
#include "endocal/geometry.hpp"
#include "endocal/mask.hpp"

namespace endocal {

/// Near-plane used when clipping triangles that cross the lens plane.
inline constexpr double kSilhouetteClipMm = 1e-6;

inline constexpr double kGripperMinDeg = 0.0;
inline constexpr double kGripperMaxDeg = 60.0;

/// Named sub-mesh: a contiguous triangle range with a fixed part-to-body
/// transform and a hinge participation sign (-1, 0, +1).
struct MeshPart {
    std::string name;
    std::size_t tri_begin = 0;
    std::size_t tri_count = 0;
    RigidTransform part_to_body;
    int hinge_sign = 0;
};

struct Hinge {
    Vec3 axis{1.0, 0.0, 0.0};  // unit
    Vec3 origin{0.0, 0.0, 0.0};
};

/// Instrument CAD geometry: shared vertex/triangle arrays partitioned into
/// named parts, with an optional gripper hinge.
struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<MeshPart> parts;  // empty means one implicit rigid part
    std::optional<Hinge> joint;

    void validate() const {
        const int n = static_cast<int>(vertices.size());
        for (const auto& t : triangles)
            for (int i : t)
                if (i < 0 || i >= n)
                    throw DanglingIndexError("triangle index " + std::to_string(i) +
                                             " out of range [0, " + std::to_string(n) + ")");
        for (const auto& p : parts)
            if (p.tri_begin + p.tri_count > triangles.size())
                throw DanglingIndexError("part '" + p.name + "' triangle range out of bounds");
        if (joint && std::abs(joint->axis.norm() - 1.0) > 1e-9)
            throw Error("hinge axis must be unit length");
    }
};

struct PosedMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
};

namespace detail {

inline RigidTransform hinge_transform(const Hinge& h, double angle_rad) {
    RigidTransform t;
    t.rotation = Mat3::axis_angle(h.axis, angle_rad);
    t.translation = h.origin - t.rotation * h.origin;
    return t;
}

}  // namespace detail

/// Applies body_pose * part_to_body * hinge(sign * gripper / 2) per part.
/// Each jaw swings half the gripper opening. Single implicit part when the
/// mesh declares none.
inline void pose_mesh_into(PosedMesh& out, const TriangleMesh& mesh,
                           const RigidTransform& body_pose, double gripper_deg = 0.0) {
    if (mesh.joint && (gripper_deg < kGripperMinDeg - 1e-12 ||
                       gripper_deg > kGripperMaxDeg + 1e-12))
        throw JointLimitError("gripper angle " + std::to_string(gripper_deg) +
                              " outside [0, 60] degrees");

    static const MeshPart kWholeMesh{};
    std::size_t n_parts = mesh.parts.empty() ? 1 : mesh.parts.size();
    const std::size_t nv = mesh.vertices.size();

    out.vertices.resize(n_parts * nv);
    out.triangles.clear();
    out.triangles.reserve(mesh.parts.empty() ? mesh.triangles.size() : 0);

    for (std::size_t pi = 0; pi < n_parts; ++pi) {
        const MeshPart& part = mesh.parts.empty() ? kWholeMesh : mesh.parts[pi];
        RigidTransform t = mesh.parts.empty() ? body_pose : compose(body_pose, part.part_to_body);
        if (mesh.joint && part.hinge_sign != 0)
            t = compose(t, detail::hinge_transform(
                               *mesh.joint, deg_to_rad(part.hinge_sign * gripper_deg / 2.0)));

        const int base = static_cast<int>(pi * nv);
        for (std::size_t i = 0; i < nv; ++i) out.vertices[pi * nv + i] = t.apply(mesh.vertices[i]);

        const std::size_t tb = mesh.parts.empty() ? 0 : part.tri_begin;
        const std::size_t tc = mesh.parts.empty() ? mesh.triangles.size() : part.tri_count;
        for (std::size_t ti = tb; ti < tb + tc; ++ti) {
            const auto& tri = mesh.triangles[ti];
            out.triangles.push_back({tri[0] + base, tri[1] + base, tri[2] + base});
        }
    }
}

inline PosedMesh pose_mesh(const TriangleMesh& mesh, const RigidTransform& body_pose,
                           double gripper_deg = 0.0) {
    PosedMesh out;
    pose_mesh_into(out, mesh, body_pose, gripper_deg);
    return out;
}

namespace detail {

/// Fills one screen-space triangle with the pixel-center-inside test:
/// a center is in when all three edge functions are >= 0, so points
/// exactly on an edge count as inside. Candidate pixels per row come from
/// the scanline crossings padded by one pixel; the pad makes the interval
/// a superset of every center that can pass the edge test, so the result
/// is identical to scanning the full bounding box.
inline void fill_triangle(BinaryMask& m, const Pixel& a, const Pixel& b, const Pixel& c) {
    const double area2 = (b.u - a.u) * (c.v - a.v) - (b.v - a.v) * (c.u - a.u);
    if (area2 == 0.0) return;
    const double sgn = area2 > 0.0 ? 1.0 : -1.0;

    const double min_v = std::min({a.v, b.v, c.v});
    const double max_v = std::max({a.v, b.v, c.v});
    const int v0 = std::max(0, static_cast<int>(std::ceil(min_v - 0.5)));
    const int v1 = std::min(m.height - 1, static_cast<int>(std::floor(max_v - 0.5)));

    const Pixel* verts[3] = {&a, &b, &c};
    for (int v = v0; v <= v1; ++v) {
        const double pv = v + 0.5;
        double xlo = std::numeric_limits<double>::infinity();
        double xhi = -xlo;
        for (int i = 0; i < 3; ++i) {
            const Pixel& p = *verts[i];
            const Pixel& q = *verts[(i + 1) % 3];
            if (p.v == q.v) {
                if (p.v == pv) {
                    xlo = std::min({xlo, p.u, q.u});
                    xhi = std::max({xhi, p.u, q.u});
                }
                continue;
            }
            if (pv < std::min(p.v, q.v) || pv > std::max(p.v, q.v)) continue;
            const double x = p.u + (pv - p.v) * (q.u - p.u) / (q.v - p.v);
            xlo = std::min(xlo, x);
            xhi = std::max(xhi, x);
        }
        if (!(xlo <= xhi)) continue;
        const int u0 = std::max(0, static_cast<int>(std::floor(xlo - 0.5)) - 1);
        const int u1 = std::min(m.width - 1, static_cast<int>(std::ceil(xhi - 0.5)) + 1);
        for (int u = u0; u <= u1; ++u) {
            const double pu = u + 0.5;
            const double e0 = sgn * ((b.u - a.u) * (pv - a.v) - (b.v - a.v) * (pu - a.u));
            const double e1 = sgn * ((c.u - b.u) * (pv - b.v) - (c.v - b.v) * (pu - b.u));
            const double e2 = sgn * ((a.u - c.u) * (pv - c.v) - (a.v - c.v) * (pu - c.u));
            if (e0 >= 0.0 && e1 >= 0.0 && e2 >= 0.0) m.set(u, v);
        }
    }
}

/// Sutherland-Hodgman clip of a camera-space polygon against z >= z_min.
inline void clip_near_plane(std::vector<Vec3>& poly, double z_min) {
    static thread_local std::vector<Vec3> tmp;
    tmp.clear();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3& cur = poly[i];
        const Vec3& nxt = poly[(i + 1) % n];
        const bool cur_in = cur.z >= z_min;
        const bool nxt_in = nxt.z >= z_min;
        if (cur_in) tmp.push_back(cur);
        if (cur_in != nxt_in) {
            const double t = (z_min - cur.z) / (nxt.z - cur.z);
            tmp.push_back(cur + (nxt - cur) * t);
        }
    }
    poly = tmp;
}

}  // namespace detail

/// Rasterizes the union of the posed mesh's projected triangles into `out`
/// (cleared first), intersected with `view`. Triangles crossing the lens
/// plane are clipped at z = 1e-6 mm. An entirely invisible mesh yields an
/// empty mask; the overlap objective treats that as zero overlap.
inline void rasterize_silhouette_into(BinaryMask& out, const PosedMesh& posed,
                                      const CameraIntrinsics& cam, const BinaryMask& view) {
    if (out.width != cam.width || out.height != cam.height) out = BinaryMask(cam.width, cam.height);
    else out.fill_zero();

    std::vector<Vec3> poly;
    std::vector<Pixel> proj;
    for (const auto& tri : posed.triangles) {
        const Vec3& a = posed.vertices[static_cast<std::size_t>(tri[0])];
        const Vec3& b = posed.vertices[static_cast<std::size_t>(tri[1])];
        const Vec3& c = posed.vertices[static_cast<std::size_t>(tri[2])];
        if (a.z < kSilhouetteClipMm && b.z < kSilhouetteClipMm && c.z < kSilhouetteClipMm)
            continue;
        poly.assign({a, b, c});
        if (a.z < kSilhouetteClipMm || b.z < kSilhouetteClipMm || c.z < kSilhouetteClipMm)
            detail::clip_near_plane(poly, kSilhouetteClipMm);
        if (poly.size() < 3) continue;

        proj.clear();
        for (const Vec3& p : poly) proj.push_back(*project_point(cam, p));
        for (std::size_t i = 1; i + 1 < proj.size(); ++i)
            detail::fill_triangle(out, proj[0], proj[i], proj[i + 1]);
    }

    for (std::size_t i = 0; i < out.words.size(); ++i) out.words[i] &= view.words[i];
}

inline BinaryMask rasterize_silhouette(const PosedMesh& posed, const CameraIntrinsics& cam) {
    BinaryMask out(cam.width, cam.height);
    rasterize_silhouette_into(out, posed, cam, view_mask(cam));
    return out;
}

/// Even-odd (crossing number) fill at pixel centers, one polygon at a time,
/// unioned into the result. Polygons with fewer than 3 vertices are
/// rejected.
inline BinaryMask rasterize_polygons(const std::vector<std::vector<Pixel>>& polygons, int width,
                                     int height) {
    for (const auto& poly : polygons)
        if (poly.size() < 3)
            throw DegeneratePolygonError("polygon with " + std::to_string(poly.size()) +
                                         " vertices");
    BinaryMask out(width, height);
    std::vector<double> xs;
    for (const auto& poly : polygons) {
        double min_v = poly[0].v, max_v = poly[0].v;
        for (const Pixel& p : poly) {
            min_v = std::min(min_v, p.v);
            max_v = std::max(max_v, p.v);
        }
        const int v0 = std::max(0, static_cast<int>(std::ceil(min_v - 0.5)));
        const int v1 = std::min(height - 1, static_cast<int>(std::floor(max_v - 0.5)));
        for (int v = v0; v <= v1; ++v) {
            const double yc = v + 0.5;
            xs.clear();
            const std::size_t n = poly.size();
            for (std::size_t i = 0; i < n; ++i) {
                const Pixel& a = poly[i];
                const Pixel& b = poly[(i + 1) % n];
                if ((a.v > yc) != (b.v > yc))
                    xs.push_back(a.u + (yc - a.v) * (b.u - a.u) / (b.v - a.v));
            }
            std::sort(xs.begin(), xs.end());
            for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
                const int u0 = std::max(0, static_cast<int>(std::ceil(xs[i] - 0.5)));
                const int u1 =
                    std::min(width - 1, static_cast<int>(std::ceil(xs[i + 1] - 0.5)) - 1);
                for (int u = u0; u <= u1; ++u) out.set(u, v);
            }
        }
    }
    return out;
}

/// Inner 4-connectivity boundary: set pixels with at least one 4-neighbor
/// that is unset or out of bounds.
inline void extract_edges_into(BinaryMask& out, const BinaryMask& m) {
    if (!out.same_size(m)) out = BinaryMask(m.width, m.height);
    else out.fill_zero();
    const int wpr = m.words_per_row;
    for (int v = 0; v < m.height; ++v) {
        const std::uint64_t* row = &m.words[static_cast<std::size_t>(v) * wpr];
        const std::uint64_t* up = v > 0 ? row - wpr : nullptr;
        const std::uint64_t* dn = v + 1 < m.height ? row + wpr : nullptr;
        for (int i = 0; i < wpr; ++i) {
            const std::uint64_t w = row[i];
            if (!w) continue;
            const std::uint64_t left = (w << 1) | (i > 0 ? row[i - 1] >> 63 : 0ULL);
            const std::uint64_t right = (w >> 1) | (i + 1 < wpr ? row[i + 1] << 63 : 0ULL);
            const std::uint64_t interior =
                w & left & right & (up ? up[i] : 0ULL) & (dn ? dn[i] : 0ULL);
            out.words[static_cast<std::size_t>(v) * wpr + i] = w & ~interior;
        }
    }
}

inline BinaryMask extract_edges(const BinaryMask& m) {
    BinaryMask out(m.width, m.height);
    extract_edges_into(out, m);
    return out;
}

namespace detail {

/// Exact 1D squared-distance lower envelope (integer arithmetic), one row.
/// `f` holds per-site additive offsets (squared column distances) or -1
/// for columns without features; `out` receives min_i (x-i)^2 + f[i].
/// All intersections are compared as exact rationals in int64.
class EdtRowSolver {
public:
    void solve(const std::vector<std::int64_t>& f, int n, std::vector<std::int64_t>& out) {
        sites_.clear();
        zn_.clear();
        zd_.clear();
        for (int x = 0; x < n; ++x) {
            const std::int64_t fx = f[static_cast<std::size_t>(x)];
            if (fx < 0) continue;
            while (!sites_.empty()) {
                const int p = sites_.back();
                const std::int64_t fp = f[static_cast<std::size_t>(p)];
                // intersection of parabolas at p and x: s = (fx + x^2 - fp - p^2) / (2(x-p))
                const std::int64_t num =
                    fx + static_cast<std::int64_t>(x) * x - fp - static_cast<std::int64_t>(p) * p;
                const std::int64_t den = 2 * static_cast<std::int64_t>(x - p);
                if (sites_.size() == 1) {
                    zn_.push_back(num);
                    zd_.push_back(den);
                    break;
                }
                // pop while s <= z.back(): num/den <= zn/zd  (dens positive)
                if (num * zd_.back() <= zn_.back() * den) {
                    sites_.pop_back();
                    zn_.pop_back();
                    zd_.pop_back();
                } else {
                    zn_.push_back(num);
                    zd_.push_back(den);
                    break;
                }
            }
            sites_.push_back(x);
        }

        if (sites_.empty()) {
            std::fill_n(out.begin(), n, static_cast<std::int64_t>(-1));
            return;
        }
        std::size_t k = 0;
        for (int x = 0; x < n; ++x) {
            while (k < zn_.size() && zn_[k] <= static_cast<std::int64_t>(x) * zd_[k]) ++k;
            const int s = sites_[k];
            out[static_cast<std::size_t>(x)] =
                static_cast<std::int64_t>(x - s) * (x - s) + f[static_cast<std::size_t>(s)];
        }
    }

private:
    std::vector<int> sites_;
    std::vector<std::int64_t> zn_;  // boundary numerators
    std::vector<std::int64_t> zd_;  // boundary denominators (> 0)
};

/// Exact squared EDT of the window [x0,x1) x [y0,y1), feature pixels taken
/// from `features` inside the window only. Output is window-local
/// row-major; -1 encodes "no feature reachable".
///
/// With trunc >= 0, feature sites farther than trunc rows from a pixel are
/// dropped. Any output that would be < trunc^2 is still exact (its nearest
/// site lies within trunc rows, so it survives the cut); other outputs come
/// back as -1 or as a value >= trunc^2. Callers that clamp distances at
/// some d_max <= trunc therefore see identical results either way.
inline void edt_window(const BinaryMask& features, int x0, int y0, int x1, int y1,
                       std::vector<std::int64_t>& out_sq, int trunc = -1) {
    const int w = x1 - x0;
    const int h = y1 - y0;
    out_sq.assign(static_cast<std::size_t>(w) * h, -1);

    // pass 1: per column, nearest feature row distance (city block along y),
    // row-major sweeps with one running counter per column
    static thread_local std::vector<std::int32_t> col_dist;
    static thread_local std::vector<std::int32_t> run;
    col_dist.assign(static_cast<std::size_t>(w) * h, -1);
    run.assign(static_cast<std::size_t>(w), -1);
    for (int y = 0; y < h; ++y) {
        std::int32_t* dst = col_dist.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            if (features.get(x0 + x, y0 + y)) run[static_cast<std::size_t>(x)] = 0;
            else if (run[static_cast<std::size_t>(x)] >= 0) ++run[static_cast<std::size_t>(x)];
            dst[x] = run[static_cast<std::size_t>(x)];
        }
    }
    std::fill(run.begin(), run.end(), -1);
    for (int y = h - 1; y >= 0; --y) {
        std::int32_t* dst = col_dist.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            auto& r = run[static_cast<std::size_t>(x)];
            if (features.get(x0 + x, y0 + y)) r = 0;
            else if (r >= 0) ++r;
            if (r >= 0 && (dst[x] < 0 || r < dst[x])) dst[x] = r;
        }
    }

    // pass 2: per row, exact parabola envelope over squared column distances
    static thread_local std::vector<std::int64_t> f;
    static thread_local std::vector<std::int64_t> row_out;
    static thread_local EdtRowSolver solver;
    f.resize(static_cast<std::size_t>(w));
    row_out.resize(static_cast<std::size_t>(w));
    for (int y = 0; y < h; ++y) {
        const std::int32_t* src = col_dist.data() + static_cast<std::size_t>(y) * w;
        bool any = false;
        for (int x = 0; x < w; ++x) {
            const std::int32_t d = src[x];
            if (d < 0 || (trunc >= 0 && d > trunc)) {
                f[static_cast<std::size_t>(x)] = -1;
            } else {
                f[static_cast<std::size_t>(x)] = static_cast<std::int64_t>(d) * d;
                any = true;
            }
        }
        if (!any) continue;  // out_sq row stays -1
        solver.solve(f, w, row_out);
        std::copy(row_out.begin(), row_out.end(),
                  out_sq.begin() + static_cast<std::size_t>(y) * w);
    }
}

}  // namespace detail

/// Exact Euclidean distance transform (separable two-pass squared-distance
/// algorithm). Squared distances are integers and bitwise-reproducible; an
/// empty feature set yields +infinity everywhere.
inline DistanceField distance_transform(const BinaryMask& edges) {
    DistanceField out(edges.width, edges.height);
    std::vector<std::int64_t> sq;
    detail::edt_window(edges, 0, 0, edges.width, edges.height, sq);
    for (std::size_t i = 0; i < sq.size(); ++i)
        if (sq[i] >= 0) out.squared[i] = static_cast<double>(sq[i]);
    return out;
}

/// p(u, v) = (d_max - min(d_nearest(u, v), d_max))^2.
inline WeightField weight_field(const DistanceField& d, double d_max) {
    if (!(d_max > 0.0)) throw Error("d_max must be positive");
    WeightField out(d.width, d.height);
    const double d_max_sq = d_max * d_max;
    for (std::size_t i = 0; i < d.squared.size(); ++i) {
        const double sq = d.squared[i];
        if (sq >= d_max_sq) continue;  // stays 0
        const double t = d_max - std::sqrt(sq);
        out.p[i] = t * t;
    }
    return out;
}

/// Traces the region outline of a mask along pixel borders, producing
/// closed polygons with integer grid-corner vertices. Re-filling the loops
/// with rasterize_polygons reproduces the mask exactly for hole-free
/// regions (holes come back as separate loops that even-odd union cannot
/// represent).
inline std::vector<std::vector<Pixel>> trace_boundaries(const BinaryMask& m) {
    const int gw = m.width + 1;  // vertex grid
    const int gh = m.height + 1;
    // outgoing directed crack edges per grid vertex, inside kept on the left:
    // bit 0 = east, 1 = south, 2 = west, 3 = north
    std::vector<std::uint8_t> out_dirs(static_cast<std::size_t>(gw) * gh, 0);
    auto vid = [gw](int x, int y) { return static_cast<std::size_t>(y) * gw + x; };

    for (int v = 0; v < m.height; ++v)
        for (int u = 0; u < m.width; ++u) {
            if (!m.get(u, v)) continue;
            if (v == 0 || !m.get(u, v - 1)) out_dirs[vid(u + 1, v)] |= 1u << 2;      // top: west
            if (v + 1 >= m.height || !m.get(u, v + 1)) out_dirs[vid(u, v + 1)] |= 1u << 0;  // bottom: east
            if (u == 0 || !m.get(u - 1, v)) out_dirs[vid(u, v)] |= 1u << 1;          // left: south
            if (u + 1 >= m.width || !m.get(u + 1, v)) out_dirs[vid(u + 1, v + 1)] |= 1u << 3;  // right: north
        }

    static constexpr int dx[4] = {1, 0, -1, 0};
    static constexpr int dy[4] = {0, 1, 0, -1};

    std::vector<std::vector<Pixel>> loops;
    for (int sy = 0; sy < gh; ++sy)
        for (int sx = 0; sx < gw; ++sx) {
            while (out_dirs[vid(sx, sy)]) {
                int dir = std::countr_zero(out_dirs[vid(sx, sy)]);
                std::vector<Pixel> loop;
                int x = sx, y = sy;
                loop.push_back({static_cast<double>(x), static_cast<double>(y)});
                do {
                    out_dirs[vid(x, y)] &= static_cast<std::uint8_t>(~(1u << dir));
                    x += dx[dir];
                    y += dy[dir];
                    if (x == sx && y == sy) break;
                    // prefer left turn, then straight, then right
                    const std::uint8_t pending = out_dirs[vid(x, y)];
                    int next = -1;
                    for (int turn : {3, 0, 1}) {
                        const int cand = (dir + turn) & 3;
                        if (pending & (1u << cand)) {
                            next = cand;
                            break;
                        }
                    }
                    if (next != dir)
                        loop.push_back({static_cast<double>(x), static_cast<double>(y)});
                    dir = next;
                } while (dir >= 0);
                if (loop.size() >= 3) loops.push_back(std::move(loop));
            }
        }
    return loops;
}

/// Procedural 3 mm two-jaw forceps: cylindrical shaft along -z ending at
/// the body origin, two thin blade jaws extending in +z, hinged about x.
/// Stands in for the instrument CAD model in synthetic scenarios and
/// fixtures.
inline TriangleMesh make_forceps_mesh(double shaft_length_mm = 40.0,
                                      double shaft_radius_mm = 1.5,
                                      double jaw_length_mm = 8.0, int shaft_segments = 12) {
    TriangleMesh mesh;
    auto add_vertex = [&mesh](double x, double y, double z) {
        mesh.vertices.push_back({x, y, z});
        return static_cast<int>(mesh.vertices.size() - 1);
    };
    auto add_tri = [&mesh](int a, int b, int c) { mesh.triangles.push_back({a, b, c}); };

    // shaft
    std::vector<int> ring_back, ring_front;
    for (int i = 0; i < shaft_segments; ++i) {
        const double ang = 2.0 * kPi * i / shaft_segments;
        const double x = shaft_radius_mm * std::cos(ang);
        const double y = shaft_radius_mm * std::sin(ang);
        ring_back.push_back(add_vertex(x, y, -shaft_length_mm));
        ring_front.push_back(add_vertex(x, y, 0.0));
    }
    const int center_back = add_vertex(0.0, 0.0, -shaft_length_mm);
    const int center_front = add_vertex(0.0, 0.0, 0.0);
    for (int i = 0; i < shaft_segments; ++i) {
        const int j = (i + 1) % shaft_segments;
        add_tri(ring_back[i], ring_front[i], ring_front[j]);
        add_tri(ring_back[i], ring_front[j], ring_back[j]);
        add_tri(center_back, ring_back[j], ring_back[i]);
        add_tri(center_front, ring_front[i], ring_front[j]);
    }
    const std::size_t shaft_tris = mesh.triangles.size();

    // jaws: thin blades, slightly separated when closed
    auto add_box = [&](double x0, double x1, double y0, double y1, double z0, double z1) {
        const int v000 = add_vertex(x0, y0, z0), v100 = add_vertex(x1, y0, z0);
        const int v010 = add_vertex(x0, y1, z0), v110 = add_vertex(x1, y1, z0);
        const int v001 = add_vertex(x0, y0, z1), v101 = add_vertex(x1, y0, z1);
        const int v011 = add_vertex(x0, y1, z1), v111 = add_vertex(x1, y1, z1);
        add_tri(v000, v010, v110); add_tri(v000, v110, v100);
        add_tri(v001, v101, v111); add_tri(v001, v111, v011);
        add_tri(v000, v100, v101); add_tri(v000, v101, v001);
        add_tri(v010, v011, v111); add_tri(v010, v111, v110);
        add_tri(v000, v001, v011); add_tri(v000, v011, v010);
        add_tri(v100, v110, v111); add_tri(v100, v111, v101);
    };
    add_box(-1.2, 1.2, 0.05, 0.85, 0.0, jaw_length_mm);
    const std::size_t jaw_a_tris = mesh.triangles.size() - shaft_tris;
    add_box(-1.2, 1.2, -0.85, -0.05, 0.0, jaw_length_mm);
    const std::size_t jaw_b_tris = mesh.triangles.size() - shaft_tris - jaw_a_tris;

    mesh.parts = {
        {"shaft", 0, shaft_tris, RigidTransform::identity(), 0},
        {"jaw_a", shaft_tris, jaw_a_tris, RigidTransform::identity(), -1},
        {"jaw_b", shaft_tris + jaw_a_tris, jaw_b_tris, RigidTransform::identity(), +1},
    };
    mesh.joint = Hinge{{1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
    mesh.validate();
    return mesh;
}

}  // namespace endocal
