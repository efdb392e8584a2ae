#include "pcv/odometry.hpp"

#include <cmath>
#include <string>

#include "pcv/errors.hpp"

namespace pcv {

namespace {
constexpr double kRadToDeg = 180.0 / kPi;
constexpr double kTimestampTolerance = 1e-9;
}  // namespace

OdometryState update(const OdometryState& s, const Twist2& v, double dt) {
  require_frame(v, Frame::kBody, "odometry update");
  OdometryState out = s;
  out.pose = compose(s.pose, exp(v, dt));
  out.distance_traveled += v.linear_speed() * dt;
  out.rotation_traveled += std::abs(v.omega) * dt;
  return out;
}

DriftReport drift_metrics(std::span<const TimedPose> estimated, std::span<const TimedPose> truth) {
  if (estimated.size() != truth.size()) {
    throw TraceMismatch("trace lengths differ: " + std::to_string(estimated.size()) + " vs " +
                        std::to_string(truth.size()));
  }
  if (truth.size() < 2) throw TraceMismatch("traces need at least 2 samples");

  DriftReport r;
  double distance = 0.0;
  double rotation = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (std::abs(estimated[i].t - truth[i].t) > kTimestampTolerance) {
      throw TraceMismatch("timestamps disagree at sample " + std::to_string(i));
    }
    if (i > 0) {
      const Pose2& a = truth[i - 1].pose;
      const Pose2& b = truth[i].pose;
      distance += std::hypot(b.x - a.x, b.y - a.y);
      rotation += std::abs(wrap_angle(b.theta - a.theta));
    }
  }
  const Pose2& e = estimated.back().pose;
  const Pose2& g = truth.back().pose;
  r.final_position_error = std::hypot(e.x - g.x, e.y - g.y);
  r.final_heading_error = std::abs(wrap_angle(e.theta - g.theta)) * kRadToDeg;
  r.truth_distance = distance;
  r.truth_rotation = rotation * kRadToDeg;

  if (distance >= kMinDriftDistance) {
    r.translation_drift = 100.0 * r.final_position_error / distance;
  } else {
    r.translation_undefined = true;
  }
  if (r.truth_rotation >= kMinDriftRotationDeg) {
    r.rotation_drift = r.final_heading_error * 360.0 / r.truth_rotation;
  } else {
    r.rotation_undefined = true;
  }
  return r;
}

}  // namespace pcv
