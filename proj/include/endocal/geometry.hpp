#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "endocal/errors.hpp"

namespace endocal {

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline constexpr double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x, double y, double z) : x(x), y(y), z(z) {}

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }

    constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    constexpr Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        const double n = norm();
        return {x / n, y / n, z / n};
    }
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// 3x3 matrix, row-major.
struct Mat3 {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    static constexpr Mat3 identity() { return {}; }

    double& operator()(int r, int c) { return m[static_cast<std::size_t>(r * 3 + c)]; }
    double operator()(int r, int c) const { return m[static_cast<std::size_t>(r * 3 + c)]; }

    Mat3 operator*(const Mat3& o) const {
        Mat3 out;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                out(r, c) = (*this)(r, 0) * o(0, c) + (*this)(r, 1) * o(1, c) +
                            (*this)(r, 2) * o(2, c);
        return out;
    }

    Vec3 operator*(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }

    Mat3 transposed() const {
        Mat3 out;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) out(r, c) = (*this)(c, r);
        return out;
    }

    double determinant() const {
        return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
               m[2] * (m[3] * m[7] - m[4] * m[6]);
    }

    Vec3 row(int r) const { return {(*this)(r, 0), (*this)(r, 1), (*this)(r, 2)}; }
    Vec3 col(int c) const { return {(*this)(0, c), (*this)(1, c), (*this)(2, c)}; }

    void set_row(int r, const Vec3& v) {
        (*this)(r, 0) = v.x;
        (*this)(r, 1) = v.y;
        (*this)(r, 2) = v.z;
    }

    /// Max absolute entry of R^T R - I.
    double orthonormality_drift() const {
        const Mat3 g = transposed() * (*this);
        double worst = 0.0;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                const double target = (r == c) ? 1.0 : 0.0;
                worst = std::max(worst, std::abs(g(r, c) - target));
            }
        return worst;
    }

    /// Nearest well-conditioned rotation via cross-product re-orthonormalization.
    Mat3 orthonormalized() const {
        const Vec3 r0 = row(0).normalized();
        const Vec3 r2 = r0.cross(row(1)).normalized();
        const Vec3 r1 = r2.cross(r0);
        Mat3 out;
        out.set_row(0, r0);
        out.set_row(1, r1);
        out.set_row(2, r2);
        return out;
    }

    static Mat3 rotation_x(double rad) {
        const double c = std::cos(rad), s = std::sin(rad);
        Mat3 r;
        r.m = {1, 0, 0, 0, c, -s, 0, s, c};
        return r;
    }
    static Mat3 rotation_y(double rad) {
        const double c = std::cos(rad), s = std::sin(rad);
        Mat3 r;
        r.m = {c, 0, s, 0, 1, 0, -s, 0, c};
        return r;
    }
    static Mat3 rotation_z(double rad) {
        const double c = std::cos(rad), s = std::sin(rad);
        Mat3 r;
        r.m = {c, -s, 0, s, c, 0, 0, 0, 1};
        return r;
    }

    /// Rodrigues rotation about a unit axis.
    static Mat3 axis_angle(const Vec3& unit_axis, double rad) {
        const double c = std::cos(rad), s = std::sin(rad), t = 1.0 - c;
        const double ax = unit_axis.x, ay = unit_axis.y, az = unit_axis.z;
        Mat3 r;
        r.m = {t * ax * ax + c,      t * ax * ay - s * az, t * ax * az + s * ay,
               t * ax * ay + s * az, t * ay * ay + c,      t * ay * az - s * ax,
               t * ax * az - s * ay, t * ay * az + s * ax, t * az * az + c};
        return r;
    }
};

/// SE(3) element: rotation plus translation in millimeters.
///
/// Basis of every transform in the calibration chain (tracker poses,
/// marker-to-tip and marker-to-lens adapters, tip-in-camera results).
struct RigidTransform {
    Mat3 rotation;
    Vec3 translation;

    static RigidTransform identity() { return {}; }

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

    bool is_valid(double tol = 1e-9) const {
        return rotation.orthonormality_drift() <= tol && rotation.determinant() > 0.0;
    }

    void reorthonormalize() { rotation = rotation.orthonormalized(); }
};

/// a then b applied to child-frame coordinates (matrix product a*b).
/// Re-orthonormalizes the result when accumulated drift exceeds 1e-10.
inline RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
    RigidTransform out;
    out.rotation = a.rotation * b.rotation;
    out.translation = a.rotation * b.translation + a.translation;
    if (out.rotation.orthonormality_drift() > 1e-10) out.reorthonormalize();
    return out;
}

inline RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
    return compose(a, b);
}

inline RigidTransform invert(const RigidTransform& t) {
    RigidTransform out;
    out.rotation = t.rotation.transposed();
    out.translation = -(out.rotation * t.translation);
    return out;
}

/// Instrument pose as ranges-of-motion coordinates: translation in mm,
/// intrinsic Z-Y-X Euler angles (yaw, then pitch, then roll) in degrees,
/// plus the gripper opening angle. The convention tag is written into
/// every serialized pose so files stay self-describing.
struct EulerPose {
    double x_mm = 0.0;
    double y_mm = 0.0;
    double z_mm = 0.0;
    double roll_deg = 0.0;
    double pitch_deg = 0.0;
    double yaw_deg = 0.0;
    double gripper_deg = 0.0;
};

inline constexpr const char* kEulerConvention = "ZYX-intrinsic";

/// Rotation Rz(yaw) * Ry(pitch) * Rx(roll); translation (x, y, z).
/// The gripper angle is a joint value, not part of the rigid transform.
inline RigidTransform from_euler(const EulerPose& p) {
    RigidTransform t;
    t.rotation = Mat3::rotation_z(deg_to_rad(p.yaw_deg)) *
                 Mat3::rotation_y(deg_to_rad(p.pitch_deg)) *
                 Mat3::rotation_x(deg_to_rad(p.roll_deg));
    t.translation = {p.x_mm, p.y_mm, p.z_mm};
    return t;
}

inline RigidTransform from_euler(const Vec3& translation_mm, const Vec3& rpy_deg) {
    EulerPose p;
    p.x_mm = translation_mm.x;
    p.y_mm = translation_mm.y;
    p.z_mm = translation_mm.z;
    p.roll_deg = rpy_deg.x;
    p.pitch_deg = rpy_deg.y;
    p.yaw_deg = rpy_deg.z;
    return from_euler(p);
}

/// Inverse of from_euler away from gimbal lock (|pitch| < 90 deg).
/// The gripper channel of the result is zero.
inline EulerPose to_euler(const RigidTransform& t) {
    EulerPose p;
    const Mat3& r = t.rotation;
    p.pitch_deg = rad_to_deg(std::asin(std::clamp(-r(2, 0), -1.0, 1.0)));
    p.yaw_deg = rad_to_deg(std::atan2(r(1, 0), r(0, 0)));
    p.roll_deg = rad_to_deg(std::atan2(r(2, 1), r(2, 2)));
    p.x_mm = t.translation.x;
    p.y_mm = t.translation.y;
    p.z_mm = t.translation.z;
    return p;
}

/// Per-dimension [min, max] intervals for the seven pose channels.
/// Defaults are the instrument range of motion inside the endonasal
/// workspace as seen from the endoscope.
struct PoseRanges {
    std::array<std::array<double, 2>, 7> bounds{{{-20.0, 20.0},
                                                 {-20.0, 20.0},
                                                 {10.0, 35.0},
                                                 {50.0, 90.0},
                                                 {-40.0, 40.0},
                                                 {0.0, 360.0},
                                                 {0.0, 60.0}}};

    double min(int channel) const { return bounds[static_cast<std::size_t>(channel)][0]; }
    double max(int channel) const { return bounds[static_cast<std::size_t>(channel)][1]; }
};

/// Pose normalized channel-wise into [0, 1]:
/// (x, y, z, roll, pitch, yaw, gripper).
struct PoseVector7 {
    std::array<double, 7> channels{};

    double operator[](int i) const { return channels[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return channels[static_cast<std::size_t>(i)]; }
};

struct LossWeights {
    std::array<double, 7> w{1.0, 1.0, 1.5, 2.0, 2.0, 0.1, 0.1};
};

namespace detail {

inline std::array<double, 7> pose_channels(const EulerPose& p) {
    return {p.x_mm, p.y_mm, p.z_mm, p.roll_deg, p.pitch_deg, p.yaw_deg, p.gripper_deg};
}

inline constexpr const char* kChannelNames[7] = {"x",     "y",   "z",      "roll",
                                                 "pitch", "yaw", "gripper"};

}  // namespace detail

/// Normalizes each channel to (value - min) / (max - min). Yaw wraps
/// modulo 360 before the range check; all other channels must lie inside
/// their interval or OutOfRangeError is thrown.
inline PoseVector7 encode_pose7(const EulerPose& p, const PoseRanges& ranges = {}) {
    auto vals = detail::pose_channels(p);
    vals[5] = std::fmod(vals[5], 360.0);
    if (vals[5] < 0.0) vals[5] += 360.0;
    PoseVector7 out;
    for (int i = 0; i < 7; ++i) {
        const double lo = ranges.min(i), hi = ranges.max(i);
        const double v = vals[static_cast<std::size_t>(i)];
        if (v < lo || v > hi)
            throw OutOfRangeError(std::string(detail::kChannelNames[i]) + " = " +
                                  std::to_string(v) + " outside [" + std::to_string(lo) +
                                  ", " + std::to_string(hi) + "]");
        out[i] = (hi > lo) ? (v - lo) / (hi - lo) : 0.0;
    }
    return out;
}

inline EulerPose decode_pose7(const PoseVector7& v, const PoseRanges& ranges = {}) {
    std::array<double, 7> vals;
    for (int i = 0; i < 7; ++i)
        vals[static_cast<std::size_t>(i)] =
            ranges.min(i) + v[i] * (ranges.max(i) - ranges.min(i));
    EulerPose p;
    p.x_mm = vals[0];
    p.y_mm = vals[1];
    p.z_mm = vals[2];
    p.roll_deg = vals[3];
    p.pitch_deg = vals[4];
    p.yaw_deg = vals[5];
    p.gripper_deg = vals[6];
    return p;
}

/// Weighted squared error over the seven normalized channels.
inline double weighted_pose_loss(const PoseVector7& pred, const PoseVector7& gt,
                                 const LossWeights& w = {}) {
    double loss = 0.0;
    for (int i = 0; i < 7; ++i) {
        const double d = pred[i] - gt[i];
        loss += w.w[static_cast<std::size_t>(i)] * d * d;
    }
    return loss;
}

}  // namespace endocal
