#pragma once

#include <cmath>
#include <optional>

#include "endocal/errors.hpp"
#include "endocal/geometry.hpp"
#include "endocal/mask.hpp"

namespace endocal {

/// Continuous image position in pixels. (0, 0) is the corner of the
/// top-left pixel; pixel (u, v) has its center at (u + 0.5, v + 0.5).
struct Pixel {
    double u = 0.0;
    double v = 0.0;
};

struct ViewCircle {
    double u = 0.0;  // center, pixels
    double v = 0.0;
    double r = 0.0;  // radius, pixels
};

/// Pinhole camera with two radial distortion terms and the circular
/// endoscopic view mask.
struct CameraIntrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    double k1 = 0.0;
    double k2 = 0.0;
    int width = 0;
    int height = 0;
    ViewCircle view_circle;

    bool is_valid() const {
        return fx > 0.0 && fy > 0.0 && width > 0 && height > 0 && view_circle.r > 0.0 &&
               view_circle.u - view_circle.r >= -1e-9 &&
               view_circle.v - view_circle.r >= -1e-9 &&
               view_circle.u + view_circle.r <= width + 1e-9 &&
               view_circle.v + view_circle.r <= height + 1e-9;
    }
};

inline constexpr double kNearPlaneMm = 1e-9;

/// Projects a camera-frame point (mm) to continuous pixel coordinates.
/// Returns nullopt for points at or behind the lens plane.
inline std::optional<Pixel> project_point(const CameraIntrinsics& cam, const Vec3& p) {
    if (p.z <= kNearPlaneMm) return std::nullopt;
    const double xn = p.x / p.z;
    const double yn = p.y / p.z;
    const double r2 = xn * xn + yn * yn;
    const double scale = 1.0 + cam.k1 * r2 + cam.k2 * r2 * r2;
    return Pixel{cam.fx * xn * scale + cam.cx, cam.fy * yn * scale + cam.cy};
}

/// Mask of pixels whose centers lie inside the circular endoscopic view.
inline BinaryMask view_mask(const CameraIntrinsics& cam) {
    BinaryMask m(cam.width, cam.height);
    const double r2 = cam.view_circle.r * cam.view_circle.r;
    for (int v = 0; v < cam.height; ++v) {
        const double dv = (v + 0.5) - cam.view_circle.v;
        for (int u = 0; u < cam.width; ++u) {
            const double du = (u + 0.5) - cam.view_circle.u;
            if (du * du + dv * dv <= r2) m.set(u, v);
        }
    }
    return m;
}

/// Symmetric pinhole from a horizontal field of view, distortion-free,
/// with the view circle inscribed in the image.
inline CameraIntrinsics default_intrinsics_for_fov(int width, int height, double fov_deg) {
    if (!(fov_deg > 0.0 && fov_deg < 180.0))
        throw BadFovError("field of view must be in (0, 180) degrees, got " +
                          std::to_string(fov_deg));
    CameraIntrinsics cam;
    cam.width = width;
    cam.height = height;
    cam.fx = cam.fy = (width / 2.0) / std::tan(deg_to_rad(fov_deg) / 2.0);
    cam.cx = width / 2.0;
    cam.cy = height / 2.0;
    cam.view_circle = {width / 2.0, height / 2.0, std::min(width, height) / 2.0};
    return cam;
}

/// 95 degree perspective at 299x299, the default experimental view.
inline CameraIntrinsics default_endoscope_intrinsics(int width = 299, int height = 299) {
    return default_intrinsics_for_fov(width, height, 95.0);
}

}  // namespace endocal
