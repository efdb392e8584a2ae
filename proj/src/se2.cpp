#include "pcv/se2.hpp"

#include <string>

#include "pcv/errors.hpp"

namespace pcv {

double wrap_angle(double angle) {
  double r = std::remainder(angle, 2.0 * kPi);
  if (r <= -kPi) r = kPi;
  return r;
}

double wrap_two_pi(double angle) {
  double r = std::fmod(angle, 2.0 * kPi);
  if (r < 0.0) r += 2.0 * kPi;
  if (r >= 2.0 * kPi) r = 0.0;
  return r;
}

const char* to_string(Frame frame) { return frame == Frame::kBody ? "body" : "world"; }

void require_frame(const Twist2& twist, Frame expected, const char* operation) {
  if (twist.frame != expected) {
    throw FrameMismatch(std::string(operation) + " expects a " + to_string(expected) + "-frame twist, got " +
                        to_string(twist.frame));
  }
}

Pose2 compose(const Pose2& a, const Pose2& b) {
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  return {a.x + c * b.x - s * b.y, a.y + s * b.x + c * b.y, a.theta + b.theta};
}

Pose2 inverse(const Pose2& p) {
  const double c = std::cos(p.theta);
  const double s = std::sin(p.theta);
  return {-c * p.x - s * p.y, s * p.x - c * p.y, -p.theta};
}

Pose2 exp(const Twist2& xi, double dt) {
  require_frame(xi, Frame::kBody, "exp");
  const double theta = xi.omega * dt;
  double a = 0.0;  // sin(t)/t
  double b = 0.0;  // (1 - cos(t))/t
  if (std::abs(theta) < 1e-6) {
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0;
    b = theta * (0.5 - t2 / 24.0);
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta;
  }
  const double dx = xi.vx * dt;
  const double dy = xi.vy * dt;
  return {a * dx - b * dy, b * dx + a * dy, theta};
}

Twist2 log(const Pose2& p) {
  const double half = 0.5 * p.theta;
  double a = 0.0;  // half * cot(half)
  if (std::abs(p.theta) < 1e-6) {
    a = 1.0 - p.theta * p.theta / 12.0;
  } else {
    a = half * std::cos(half) / std::sin(half);
  }
  return {a * p.x + half * p.y, -half * p.x + a * p.y, p.theta, Frame::kBody};
}

Twist2 rotate_twist(const Twist2& xi, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c * xi.vx - s * xi.vy, s * xi.vx + c * xi.vy, xi.omega,
          xi.frame == Frame::kBody ? Frame::kWorld : Frame::kBody};
}

Point2 transform_point(const Pose2& p, Point2 local) {
  const double c = std::cos(p.theta);
  const double s = std::sin(p.theta);
  return {p.x + c * local.x - s * local.y, p.y + s * local.x + c * local.y};
}

}  // namespace pcv
