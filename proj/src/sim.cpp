#include "pcv/sim.hpp"

#include <cmath>
#include <string>

#include "pcv/errors.hpp"

namespace pcv {

SimConfig SimConfig::noise_free() {
  SimConfig cfg;
  cfg.slip_noise_std = 0.0;
  cfg.steer_noise_std = 0.0;
  cfg.quantize = false;
  return cfg;
}

void SimConfig::validate() const {
  if (!(dt > 0.0 && dt <= 0.1)) throw ConfigInvalid("sim.dt must be in (0, 0.1], got " + std::to_string(dt));
  if (!(slip_noise_std >= 0.0) || !(steer_noise_std >= 0.0)) {
    throw ConfigInvalid("sim noise standard deviations must be >= 0");
  }
  if (encoder_counts_per_motor_rev < 1 || abs_encoder_counts_per_rev < 1) {
    throw ConfigInvalid("sim encoder counts must be >= 1");
  }
}

SimState SimState::initial(const BaseConfig& base, const SimConfig& cfg, const Pose2& start,
                           std::span<const double> steer_angles) {
  SimState s;
  s.truth_pose = start;
  s.casters.resize(base.size());
  s.motors.resize(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double phi = steer_angles.empty() ? 0.0 : wrap_angle(steer_angles[i]);
    s.casters[i].phi = phi;
    s.motors[i].abs_steer_reading = wrap_two_pi(phi + base[i].steer_encoder_offset);
  }
  s.motors_prev = s.motors;
  s.rng.seed(cfg.seed);
  return s;
}

void step_in_place(SimState& state, std::span<const MotorVelocities> motor_cmds, const SimConfig& cfg,
                   const BaseConfig& base) {
  if (motor_cmds.size() != base.size()) throw CommandLengthMismatch(motor_cmds.size(), base.size());

  std::normal_distribution<double> unit_normal(0.0, 1.0);
  const std::size_t n = base.size();

  // Joint rates implied by the motor commands, perturbed at the wheel.
  std::vector<CasterJointState> actual(n);
  for (std::size_t i = 0; i < n; ++i) {
    const CasterGeometry& g = base[i];
    const double phi_dot = motor_cmds[i].steer / g.steer_ratio;
    const double rho_dot = motor_cmds[i].drive / g.drive_ratio - g.couple_ratio * phi_dot;
    double slip = 0.0;
    double jitter = 0.0;
    if (cfg.slip_noise_std > 0.0) slip = cfg.slip_noise_std * unit_normal(state.rng);
    if (cfg.steer_noise_std > 0.0) jitter = cfg.steer_noise_std * unit_normal(state.rng);
    actual[i] = state.casters[i];
    actual[i].phi_dot = phi_dot + jitter;
    actual[i].rho_dot = rho_dot * (1.0 + slip);
  }

  const FkResult fk = base_fk(base, actual);
  state.truth_pose = compose(state.truth_pose, exp(fk.twist, cfg.dt));
  state.truth_twist = fk.twist;
  state.fk_residual = fk.residual;

  state.motors_prev = state.motors;
  for (std::size_t i = 0; i < n; ++i) {
    CasterJointState& j = state.casters[i];
    j.phi = wrap_angle(j.phi + actual[i].phi_dot * cfg.dt);
    j.rho += actual[i].rho_dot * cfg.dt;
    j.phi_dot = actual[i].phi_dot;
    j.rho_dot = actual[i].rho_dot;

    MotorState& m = state.motors[i];
    m.steer_motor_vel = motor_cmds[i].steer;
    m.drive_motor_vel = motor_cmds[i].drive;
    m.steer_motor_pos += motor_cmds[i].steer * cfg.dt;
    m.drive_motor_pos += motor_cmds[i].drive * cfg.dt;
    m.abs_steer_reading = wrap_two_pi(j.phi + base[i].steer_encoder_offset);
  }

  ++state.tick;
  state.time = static_cast<double>(state.tick) * cfg.dt;
}

SimState step(const SimState& state, std::span<const MotorVelocities> motor_cmds, const SimConfig& cfg,
              const BaseConfig& base) {
  SimState next = state;
  step_in_place(next, motor_cmds, cfg, base);
  return next;
}

double quantize_angle(double value, int counts_per_rev) {
  const double resolution = 2.0 * kPi / static_cast<double>(counts_per_rev);
  // The epsilon keeps exact multiples from flooring down after division round-off.
  return std::floor(value / resolution + 1e-9) * resolution;
}

std::vector<MotorState> read_encoders(const SimState& state, const SimConfig& cfg) {
  std::vector<MotorState> out(state.motors.size());
  const auto motor_q = [&](double v) {
    return cfg.quantize ? quantize_angle(v, cfg.encoder_counts_per_motor_rev) : v;
  };
  for (std::size_t i = 0; i < out.size(); ++i) {
    const MotorState& now = state.motors[i];
    const MotorState& prev = state.motors_prev[i];
    MotorState& m = out[i];
    m.steer_motor_pos = motor_q(now.steer_motor_pos);
    m.drive_motor_pos = motor_q(now.drive_motor_pos);
    m.steer_motor_vel = (m.steer_motor_pos - motor_q(prev.steer_motor_pos)) / cfg.dt;
    m.drive_motor_vel = (m.drive_motor_pos - motor_q(prev.drive_motor_pos)) / cfg.dt;
    m.abs_steer_reading =
        cfg.quantize ? quantize_angle(now.abs_steer_reading, cfg.abs_encoder_counts_per_rev) : now.abs_steer_reading;
  }
  return out;
}

}  // namespace pcv
