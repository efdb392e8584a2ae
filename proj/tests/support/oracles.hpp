#pragma once

// Reference computations for tests. Written against plain matrices and
// brute-force integration, never against the library's own helpers.

#include <array>
#include <cmath>

namespace testing_oracle {

using Mat3 = std::array<std::array<double, 3>, 3>;

inline Mat3 homogeneous(double x, double y, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {{{c, -s, x}, {s, c, y}, {0.0, 0.0, 1.0}}};
}

inline Mat3 matmul(const Mat3& a, const Mat3& b) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) out[i][j] += a[i][k] * b[k][j];
  return out;
}

struct Planar {
  double x, y, theta;
};

inline Planar from_matrix(const Mat3& m) { return {m[0][2], m[1][2], std::atan2(m[1][0], m[0][0])}; }

/// Forward-Euler integration of a constant body twist with a tiny step.
inline Planar integrate_body_twist(double vx, double vy, double omega, double duration, double h = 1e-6) {
  double x = 0.0, y = 0.0, th = 0.0;
  const long n = std::lround(duration / h);
  for (long i = 0; i < n; ++i) {
    // Midpoint heading keeps the reference accurate to O(h^2) per step.
    const double tm = th + 0.5 * omega * h;
    x += (std::cos(tm) * vx - std::sin(tm) * vy) * h;
    y += (std::sin(tm) * vx + std::cos(tm) * vy) * h;
    th += omega * h;
  }
  return {x, y, th};
}

inline double angle_diff(double a, double b) { return std::remainder(a - b, 2.0 * M_PI); }

}  // namespace testing_oracle
