#pragma once

#include <string_view>

#include "pcv/se2.hpp"

namespace pcv {

struct Limits {
  double v_max = 1.0;      // m/s
  double omega_max = 2.0;  // rad/s
  double a_max = 1.0;      // m/s^2
  double alpha_max = 4.0;  // rad/s^2

  void validate() const;
};

/// Slew limits that bring a full-speed command to rest within `stop_time`
/// (never gentler than `lim`).
Limits stopping_limits(const Limits& lim, double stop_time = 0.1);

enum class DriveMode { kHolonomic, kDifferential };

std::string_view to_string(DriveMode mode);
/// Throws ConfigInvalid for anything other than "holonomic" / "differential".
DriveMode drive_mode_from_string(std::string_view name);

struct ControllerGains {
  double k_pos = 2.0;       // 1/s
  double k_theta = 2.0;     // 1/s
  double pos_tol = 0.005;   // m
  double theta_tol = 0.0087;  // rad
  double k_rho = 1.0;
  double k_alpha = 3.0;
  double k_beta = -1.0;

  /// Also enforces the unicycle stability conditions.
  void validate() const;
};

struct ControlOutput {
  Twist2 twist;
  bool goal_reached = false;
};

/// Clamps to the speed limits, then bounds the change from `prev` by the
/// acceleration limits over `dt`.
Twist2 limit_twist(const Twist2& prev, const Twist2& desired, double dt, const Limits& lim);

/// Proportional law on the body-frame SE(2) log error.
ControlOutput position_controller(const Pose2& current, const Pose2& target, const ControllerGains& g,
                                  const Limits& lim);

/// Polar-coordinate unicycle law. Never commands lateral velocity; reverses
/// when the target lies behind (|alpha| > pi/2). Within pos_tol of the target
/// position it only turns in place to fix the remaining heading error.
ControlOutput diff_drive_controller(const Pose2& current, const Pose2& target, const ControllerGains& g,
                                    const Limits& lim);

Twist2 project_nonholonomic(const Twist2& v);

}  // namespace pcv
