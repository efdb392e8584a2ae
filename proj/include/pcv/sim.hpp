#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "pcv/caster_kinematics.hpp"
#include "pcv/se2.hpp"

namespace pcv {

struct SimConfig {
  double dt = 0.004;              // s, 250 Hz
  double slip_noise_std = 0.01;   // fraction of wheel roll rate
  double steer_noise_std = 0.002; // rad/s
  int encoder_counts_per_motor_rev = 4096;
  int abs_encoder_counts_per_rev = 4096;
  bool quantize = true;           // floor encoder readings to counts
  std::uint64_t seed = 0;

  /// All noise and quantization disabled.
  static SimConfig noise_free();

  /// Throws ConfigInvalid when an invariant is violated.
  void validate() const;
};

/// Ground truth plus the continuous motor state behind the encoders.
struct SimState {
  Pose2 truth_pose;
  std::vector<CasterJointState> casters;
  std::vector<MotorState> motors;
  std::vector<MotorState> motors_prev;  // motor state one step earlier
  std::uint64_t tick = 0;
  double time = 0.0;
  double fk_residual = 0.0;  // scrub residual of the last step
  Twist2 truth_twist;        // body twist applied during the last step
  std::mt19937_64 rng;

  static SimState initial(const BaseConfig& base, const SimConfig& cfg, const Pose2& start = {},
                          std::span<const double> steer_angles = {});
};

/// Advances one fixed step. Commands are (steer motor, drive motor) velocities
/// per caster. Throws CommandLengthMismatch if their count differs from the
/// number of casters.
void step_in_place(SimState& state, std::span<const MotorVelocities> motor_cmds, const SimConfig& cfg,
                   const BaseConfig& base);

SimState step(const SimState& state, std::span<const MotorVelocities> motor_cmds, const SimConfig& cfg,
              const BaseConfig& base);

/// Quantized encoder view of the motors. Velocities are first differences of
/// the quantized positions over one step.
std::vector<MotorState> read_encoders(const SimState& state, const SimConfig& cfg);

/// Floors `value` to a multiple of 2*pi/counts_per_rev.
double quantize_angle(double value, int counts_per_rev);

}  // namespace pcv
