#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace fwsim {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kDeg2Rad = kPi / 180.0;
inline constexpr double kRad2Deg = 180.0 / kPi;

/// Wraps an angle into (-pi, pi].
inline double wrap_pi(double a) {
  double r = std::remainder(a, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

/// Wraps an angle in degrees into (-180, 180].
inline double wrap_180(double deg) {
  double r = std::remainder(deg, 360.0);
  if (r <= -180.0) r += 360.0;
  return r;
}

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

/// SO(3) exponential map for unit quaternions: rotation vector -> quaternion.
inline Quat quat_exp(const Vec3& theta) {
  const double angle = theta.norm();
  const double half = 0.5 * angle;
  double k;  // sin(half) / angle
  if (angle < 1e-6) {
    const double a2 = angle * angle;
    k = 0.5 - a2 / 48.0 + a2 * a2 / 3840.0;
  } else {
    k = std::sin(half) / angle;
  }
  return Quat(std::cos(half), k * theta.x(), k * theta.y(), k * theta.z());
}

/// SO(3) logarithm map: unit quaternion -> rotation vector (shortest).
inline Vec3 quat_log(const Quat& q_in) {
  Quat q = q_in;
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const Vec3 v = q.vec();
  const double s = v.norm();
  if (s < 1e-12) return 2.0 * v / q.w();
  const double angle = 2.0 * std::atan2(s, q.w());
  return angle / s * v;
}

/// Inverse right Jacobian of SO(3) applied to w: the rate of the local
/// rotation vector theta given the body angular velocity w.
inline Vec3 so3_dexpinv(const Vec3& theta, const Vec3& w) {
  const double a = theta.norm();
  double c;
  if (a < 1e-4) {
    const double a2 = a * a;
    c = 1.0 / 12.0 + a2 / 720.0;
  } else {
    c = 1.0 / (a * a) - (1.0 + std::cos(a)) / (2.0 * a * std::sin(a));
  }
  const Vec3 tw = theta.cross(w);
  return w + 0.5 * tw + c * theta.cross(tw);
}

/// Yaw, pitch, roll (ZYX, radians) of the rotation carrying NED into body.
struct Euler {
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
};

inline Euler euler_from_quat(const Quat& q_nb) {
  const double w = q_nb.w(), x = q_nb.x(), y = q_nb.y(), z = q_nb.z();
  Euler e;
  e.yaw = std::atan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z));
  const double s = std::clamp(2.0 * (w * y - z * x), -1.0, 1.0);
  e.pitch = std::asin(s);
  e.roll = std::atan2(2.0 * (w * x + y * z), 1.0 - 2.0 * (x * x + y * y));
  return e;
}

inline Quat quat_from_euler(const Euler& e) {
  return Quat(Eigen::AngleAxisd(e.yaw, Vec3::UnitZ()) *
              Eigen::AngleAxisd(e.pitch, Vec3::UnitY()) *
              Eigen::AngleAxisd(e.roll, Vec3::UnitX()));
}

/// Angle of the rotation taking q1 into q2.
inline double attitude_distance(const Quat& q1, const Quat& q2) {
  return quat_log(q1.conjugate() * q2).norm();
}

}  // namespace fwsim
