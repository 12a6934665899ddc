#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>

#include "equivact/errors.hpp"
#include "equivact/rng.hpp"

namespace equivact {

using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Vec3 = Eigen::Vector3d;
using Rot6d = Eigen::Matrix<double, 6, 1>;

/// Rigid transform (rotation + translation), acting on points as R*p + t.
struct Pose {
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();

  static Pose identity() { return {}; }

  Mat4 matrix() const {
    Mat4 m = Mat4::Identity();
    m.topLeftCorner<3, 3>() = R;
    m.topRightCorner<3, 1>() = t;
    return m;
  }

  Vec3 apply(const Vec3& p) const { return R * p + t; }
};

inline Pose operator*(const Pose& a, const Pose& b) {
  return {a.R * b.R, a.R * b.t + a.t};
}

inline Pose inverse(const Pose& a) {
  Mat3 rt = a.R.transpose();
  return {rt, -(rt * a.t)};
}

/// Max deviation of R from the orthonormal det=+1 manifold. Drift is reported,
/// never repaired in place.
inline double rotation_drift(const Mat3& R) {
  const double ortho =
      (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff();
  const double det = std::abs(R.determinant() - 1.0);
  return std::max(ortho, det);
}

inline bool is_rotation(const Mat3& R, double tol = 1e-9) {
  return rotation_drift(R) < tol;
}

inline Mat3 rot_x(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 r;
  r << 1, 0, 0, 0, c, -s, 0, s, c;
  return r;
}

inline Mat3 rot_y(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 r;
  r << c, 0, s, 0, 1, 0, -s, 0, c;
  return r;
}

inline Mat3 rot_z(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 r;
  r << c, -s, 0, s, c, 0, 0, 0, 1;
  return r;
}

/// Rodrigues formula; axis need not be normalized (zero axis gives identity).
inline Mat3 axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (n < 1e-15) return Mat3::Identity();
  const Vec3 u = axis / n;
  Mat3 k;
  k << 0, -u.z(), u.y(), u.z(), 0, -u.x(), -u.y(), u.x(), 0;
  return Mat3::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * k * k;
}

/// Geodesic distance on SO(3) in radians, range [0, pi]. Equals
/// arccos((trace(a^T b) - 1) / 2) with the cosine clamped to [-1, 1], but is
/// evaluated through atan2 so angles near 0 keep full precision and the
/// boundary at pi cannot produce NaN.
inline double geodesic_angle(const Mat3& a, const Mat3& b) {
  const Mat3 m = a.transpose() * b;
  const Vec3 skew(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  const double s = 0.5 * skew.norm();
  const double c = std::clamp((m.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::atan2(s, c);
}

/// First two rotation columns, column-major concatenation.
inline Rot6d to_rot6d(const Mat3& r) {
  Rot6d v;
  v << r(0, 0), r(1, 0), r(2, 0), r(0, 1), r(1, 1), r(2, 1);
  return v;
}

/// Gram-Schmidt reconstruction: normalize the first column, orthogonalize and
/// normalize the second, complete with the cross product.
inline Mat3 from_rot6d(const Rot6d& v) {
  const Vec3 a = v.head<3>();
  const Vec3 b = v.tail<3>();
  const double na = a.norm();
  if (na <= 1e-8) {
    throw DegenerateRot6d("rot6d first column norm below 1e-8");
  }
  const Vec3 c1 = a / na;
  const Vec3 r = b - c1.dot(b) * c1;
  const double nr = r.norm();
  if (nr <= 1e-8) {
    throw DegenerateRot6d("rot6d columns nearly parallel (residual below 1e-8)");
  }
  const Vec3 c2 = r / nr;
  const Vec3 c3 = c1.cross(c2);
  Mat3 out;
  out.col(0) = c1;
  out.col(1) = c2;
  out.col(2) = c3;
  return out;
}

/// Unit quaternion (w, x, y, z) with canonical sign w >= 0.
inline std::array<double, 4> to_quaternion(const Mat3& r) {
  double w, x, y, z;
  const double tr = r.trace();
  if (tr > 0.0) {
    const double s = std::sqrt(tr + 1.0) * 2.0;
    w = 0.25 * s;
    x = (r(2, 1) - r(1, 2)) / s;
    y = (r(0, 2) - r(2, 0)) / s;
    z = (r(1, 0) - r(0, 1)) / s;
  } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
    const double s = std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2)) * 2.0;
    w = (r(2, 1) - r(1, 2)) / s;
    x = 0.25 * s;
    y = (r(0, 1) + r(1, 0)) / s;
    z = (r(0, 2) + r(2, 0)) / s;
  } else if (r(1, 1) > r(2, 2)) {
    const double s = std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2)) * 2.0;
    w = (r(0, 2) - r(2, 0)) / s;
    x = (r(0, 1) + r(1, 0)) / s;
    y = 0.25 * s;
    z = (r(1, 2) + r(2, 1)) / s;
  } else {
    const double s = std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1)) * 2.0;
    w = (r(1, 0) - r(0, 1)) / s;
    x = (r(0, 2) + r(2, 0)) / s;
    y = (r(1, 2) + r(2, 1)) / s;
    z = 0.25 * s;
  }
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  w /= n;
  x /= n;
  y /= n;
  z /= n;
  if (w < 0.0) {
    w = -w;
    x = -x;
    y = -y;
    z = -z;
  }
  return {w, x, y, z};
}

inline Mat3 from_quaternion(double w, double x, double y, double z) {
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

/// Uniform sample on SO(3): 4 iid standard normals normalized to a unit
/// quaternion.
inline Mat3 random_rotation(Rng& rng) {
  double q[4];
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (double& c : q) {
      c = rng.normal();
      n2 += c * c;
    }
  } while (n2 < 1e-12);
  const double n = std::sqrt(n2);
  return from_quaternion(q[0] / n, q[1] / n, q[2] / n, q[3] / n);
}

/// Uniform rotation + componentwise uniform translation in +-range meters.
inline Pose random_pose(Rng& rng, double translation_range) {
  Pose p;
  p.R = random_rotation(rng);
  for (int i = 0; i < 3; ++i) {
    p.t[i] = rng.uniform(-translation_range, translation_range);
  }
  return p;
}

/// Bounded rotation: isotropic axis, angle uniform in [0, max_angle].
inline Mat3 random_rotation_bounded(Rng& rng, double max_angle) {
  Vec3 axis;
  double n = 0.0;
  do {
    for (int i = 0; i < 3; ++i) axis[i] = rng.normal();
    n = axis.norm();
  } while (n < 1e-12);
  const double angle = rng.uniform(0.0, max_angle);
  return axis_angle(axis, angle);
}

inline double pose_translation_distance(const Pose& a, const Pose& b) {
  return (a.t - b.t).norm();
}

}  // namespace equivact
