#include "pcv/control.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pcv/errors.hpp"

namespace pcv {

namespace {

Twist2 saturate(const Twist2& v, const Limits& lim) {
  Twist2 out = v;
  const double speed = v.linear_speed();
  if (speed > lim.v_max) {
    const double scale = lim.v_max / speed;
    out.vx *= scale;
    out.vy *= scale;
  }
  out.omega = std::clamp(v.omega, -lim.omega_max, lim.omega_max);
  return out;
}

bool within_tolerance(const Pose2& rel, const ControllerGains& g) {
  return std::hypot(rel.x, rel.y) < g.pos_tol && std::abs(rel.theta) < g.theta_tol;
}

}  // namespace

void Limits::validate() const {
  if (!(v_max > 0.0 && omega_max > 0.0 && a_max > 0.0 && alpha_max > 0.0)) {
    throw ConfigInvalid("limits must all be strictly positive");
  }
}

Limits stopping_limits(const Limits& lim, double stop_time) {
  // 10% margin: exact division leaves a rounding crumb that costs one more tick
  const double t = 0.9 * stop_time;
  Limits out = lim;
  out.a_max = std::max(lim.a_max, lim.v_max / t);
  out.alpha_max = std::max(lim.alpha_max, lim.omega_max / t);
  return out;
}

std::string_view to_string(DriveMode mode) {
  return mode == DriveMode::kHolonomic ? "holonomic" : "differential";
}

DriveMode drive_mode_from_string(std::string_view name) {
  if (name == "holonomic") return DriveMode::kHolonomic;
  if (name == "differential") return DriveMode::kDifferential;
  throw ConfigInvalid("unknown drive mode '" + std::string(name) + "'");
}

void ControllerGains::validate() const {
  if (!(k_pos > 0.0 && k_theta > 0.0)) throw ConfigInvalid("gains.k_pos and gains.k_theta must be > 0");
  if (!(pos_tol > 0.0 && theta_tol > 0.0)) throw ConfigInvalid("gains tolerances must be > 0");
  if (!(k_rho > 0.0)) throw ConfigInvalid("gains.k_rho must be > 0");
  if (!(k_beta < 0.0)) throw ConfigInvalid("gains.k_beta must be < 0");
  if (!(k_alpha - k_rho > 0.0)) throw ConfigInvalid("gains.k_alpha must exceed gains.k_rho");
}

Twist2 limit_twist(const Twist2& prev, const Twist2& desired, double dt, const Limits& lim) {
  require_frame(desired, Frame::kBody, "limit_twist");
  require_frame(prev, Frame::kBody, "limit_twist");
  const Twist2 target = saturate(desired, lim);

  double dvx = target.vx - prev.vx;
  double dvy = target.vy - prev.vy;
  const double dv = std::hypot(dvx, dvy);
  const double dv_max = lim.a_max * dt;
  if (dv > dv_max) {
    dvx *= dv_max / dv;
    dvy *= dv_max / dv;
  }
  const double dw_max = lim.alpha_max * dt;
  const double dw = std::clamp(target.omega - prev.omega, -dw_max, dw_max);
  return {prev.vx + dvx, prev.vy + dvy, prev.omega + dw, Frame::kBody};
}

ControlOutput position_controller(const Pose2& current, const Pose2& target, const ControllerGains& g,
                                  const Limits& lim) {
  const Pose2 rel = compose(inverse(current), target);
  if (within_tolerance(rel, g)) return {Twist2{}, true};
  const Twist2 e = log(rel);
  return {saturate({g.k_pos * e.vx, g.k_pos * e.vy, g.k_theta * e.omega}, lim), false};
}

ControlOutput diff_drive_controller(const Pose2& current, const Pose2& target, const ControllerGains& g,
                                    const Limits& lim) {
  const Pose2 rel = compose(inverse(current), target);
  if (within_tolerance(rel, g)) return {Twist2{}, true};

  const double rho = std::hypot(rel.x, rel.y);
  if (rho < g.pos_tol) {
    return {saturate({0.0, 0.0, g.k_theta * rel.theta}, lim), false};
  }

  const double alpha = std::atan2(rel.y, rel.x);
  const bool reverse = std::abs(alpha) > kPi / 2.0;
  // When reversing, steer as if the rear were the front.
  const double a = reverse ? wrap_angle(alpha - kPi) : alpha;
  const double b = wrap_angle(rel.theta - a);
  const double v = g.k_rho * rho * std::cos(alpha);
  const double omega = g.k_alpha * a + g.k_beta * b;
  return {saturate({v, 0.0, omega}, lim), false};
}

Twist2 project_nonholonomic(const Twist2& v) { return {v.vx, 0.0, v.omega, v.frame}; }

}  // namespace pcv
