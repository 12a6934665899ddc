#pragma once

// Plain-loop reference implementations kept deliberately independent of the
// library code paths they are used to check.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "equivact/se3.hpp"

namespace oracles {

using Mat4x4 = std::array<std::array<double, 4>, 4>;

inline Mat4x4 mat4_identity() {
  Mat4x4 m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

inline Mat4x4 mat4_from_pose(const equivact::Pose& p) {
  Mat4x4 m = mat4_identity();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m[i][j] = p.R(i, j);
    m[i][3] = p.t[i];
  }
  return m;
}

inline Mat4x4 mat4_mul(const Mat4x4& a, const Mat4x4& b) {
  Mat4x4 c{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += a[i][k] * b[k][j];
      c[i][j] = s;
    }
  }
  return c;
}

/// Gauss-Jordan with partial pivoting; general 4x4 numeric inverse.
inline Mat4x4 mat4_inverse(Mat4x4 a) {
  Mat4x4 inv = mat4_identity();
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    std::swap(inv[col], inv[pivot]);
    const double d = a[col][col];
    for (int j = 0; j < 4; ++j) {
      a[col][j] /= d;
      inv[col][j] /= d;
    }
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      for (int j = 0; j < 4; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

inline double mat4_max_abs_diff(const Mat4x4& a, const Mat4x4& b) {
  double m = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      m = std::max(m, std::fabs(a[i][j] - b[i][j]));
    }
  }
  return m;
}

inline double mat4_vs_pose_max_abs_diff(const Mat4x4& a,
                                        const equivact::Pose& p) {
  return mat4_max_abs_diff(a, mat4_from_pose(p));
}

/// Mean rotation angle of the uniform distribution on SO(3), computed by
/// Simpson quadrature of theta * (1 - cos theta) / pi over [0, pi].
inline double so3_mean_angle_by_quadrature(int intervals = 20000) {
  auto f = [](double th) { return th * (1.0 - std::cos(th)) / M_PI; };
  const double h = M_PI / intervals;
  double s = f(0.0) + f(M_PI);
  for (int i = 1; i < intervals; ++i) {
    s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  }
  return s * h / 3.0;
}

}  // namespace oracles
