#pragma once

#include <cstdint>
#include <vector>

#include "pcv/caster_kinematics.hpp"
#include "pcv/control.hpp"
#include "pcv/odometry.hpp"
#include "pcv/sim.hpp"

namespace pcv {

/// What the loop does with the target this tick.
enum class ControlState {
  kTrack,  // drive toward the target
  kHalt,   // watchdog stop: decay to rest with stopping_limits, target follows odometry
  kEstop,  // latched emergency stop: zero command immediately
};

std::string_view to_string(ControlState state);
ControlState control_state_from_string(std::string_view name);

struct TickInput {
  Pose2 target;
  DriveMode mode = DriveMode::kHolonomic;
  ControlState state = ControlState::kTrack;
};

/// Everything observable about one control tick, after the sim step.
struct TickRecord {
  std::uint64_t tick = 0;
  double t = 0.0;
  Pose2 odom_pose;
  Pose2 truth_pose;
  Pose2 target_pose;
  Twist2 commanded;
  std::vector<CasterJointState> joint_states;  // measured
  DriveMode mode = DriveMode::kHolonomic;
  ControlState state = ControlState::kTrack;
  bool goal_reached = false;
  bool clutch_engaged = false;
  double fk_residual = 0.0;  // residual of the odometry solve
};

/// Full loop state; enough to resume a run bit-for-bit (minus the noise RNG).
struct LoopSnapshot {
  SimState sim;
  OdometryState odom;
  std::vector<CasterJointState> measured;
  Twist2 prev_command;
};

/// Fixed-rate closed loop: controller -> slew limiter -> inverse kinematics ->
/// simulator -> encoders -> forward kinematics -> odometry.
///
/// Odometry for a step uses the steer angles measured at the start of that
/// step together with the rates measured over it, matching the simulator.
class ControlLoop {
 public:
  ControlLoop(BaseConfig base, SimConfig sim_cfg, Limits limits, ControllerGains gains, const Pose2& start = {});
  ControlLoop(BaseConfig base, SimConfig sim_cfg, Limits limits, ControllerGains gains, LoopSnapshot snapshot);

  TickRecord step(const TickInput& in);

  const OdometryState& odometry() const noexcept { return odom_; }
  const SimState& sim() const noexcept { return sim_; }
  const Twist2& last_command() const noexcept { return prev_command_; }
  const std::vector<CasterJointState>& measured() const noexcept { return measured_; }
  const BaseConfig& base() const noexcept { return base_; }
  const SimConfig& sim_config() const noexcept { return sim_cfg_; }
  const Limits& limits() const noexcept { return limits_; }
  const ControllerGains& gains() const noexcept { return gains_; }
  double dt() const noexcept { return sim_cfg_.dt; }

  LoopSnapshot snapshot() const;

 private:
  void measure();

  BaseConfig base_;
  SimConfig sim_cfg_;
  Limits limits_;
  ControllerGains gains_;
  SimState sim_;
  OdometryState odom_;
  std::vector<CasterJointState> measured_;
  Twist2 prev_command_;
};

}  // namespace pcv
