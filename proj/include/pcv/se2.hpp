#pragma once

#include <cmath>
#include <numbers>

namespace pcv {

inline constexpr double kPi = std::numbers::pi;

/// Wraps an angle to (-pi, pi]. An input of exactly -pi maps to +pi.
double wrap_angle(double angle);

/// Wraps an angle to [0, 2*pi).
double wrap_two_pi(double angle);

/// Planar pose (x, y, theta). Theta is kept in (-pi, pi].
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Pose2() = default;
  Pose2(double x_in, double y_in, double theta_in) : x(x_in), y(y_in), theta(wrap_angle(theta_in)) {}

  static Pose2 identity() { return {}; }

  friend bool operator==(const Pose2&, const Pose2&) = default;
};

enum class Frame { kBody, kWorld };

const char* to_string(Frame frame);

/// Planar velocity. The frame tag travels with the value so that consumers can
/// reject twists expressed in the wrong frame.
struct Twist2 {
  double vx = 0.0;
  double vy = 0.0;
  double omega = 0.0;
  Frame frame = Frame::kBody;

  Twist2() = default;
  Twist2(double vx_in, double vy_in, double omega_in, Frame frame_in = Frame::kBody)
      : vx(vx_in), vy(vy_in), omega(omega_in), frame(frame_in) {}

  double linear_speed() const { return std::hypot(vx, vy); }

  friend bool operator==(const Twist2&, const Twist2&) = default;
};

/// Throws FrameMismatch unless `twist` is tagged with `expected`.
void require_frame(const Twist2& twist, Frame expected, const char* operation);

Pose2 compose(const Pose2& a, const Pose2& b);
Pose2 inverse(const Pose2& p);

/// Pose reached after holding body twist `xi` for `dt` seconds (exact arc).
Pose2 exp(const Twist2& xi, double dt);

/// Body twist that reaches `p` from the identity in one second.
/// |theta| = pi is accepted and resolved on the +pi branch.
Twist2 log(const Pose2& p);

/// Rotates the linear part by `theta` and flips the frame tag.
Twist2 rotate_twist(const Twist2& xi, double theta);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Maps a point given in the frame of `p` into the parent frame.
Point2 transform_point(const Pose2& p, Point2 local);

}  // namespace pcv
