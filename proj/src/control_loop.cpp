#include "pcv/control_loop.hpp"

#include <string>

#include "pcv/errors.hpp"

namespace pcv {

std::string_view to_string(ControlState state) {
  switch (state) {
    case ControlState::kTrack:
      return "track";
    case ControlState::kHalt:
      return "halt";
    case ControlState::kEstop:
      return "estop";
  }
  return "track";
}

ControlState control_state_from_string(std::string_view name) {
  if (name == "track") return ControlState::kTrack;
  if (name == "halt") return ControlState::kHalt;
  if (name == "estop") return ControlState::kEstop;
  throw ConfigInvalid("unknown control state '" + std::string(name) + "'");
}

ControlLoop::ControlLoop(BaseConfig base, SimConfig sim_cfg, Limits limits, ControllerGains gains,
                         const Pose2& start)
    : base_(std::move(base)), sim_cfg_(sim_cfg), limits_(limits), gains_(gains) {
  sim_cfg_.validate();
  limits_.validate();
  gains_.validate();
  sim_ = SimState::initial(base_, sim_cfg_, start);
  odom_.pose = start;
  measure();
}

ControlLoop::ControlLoop(BaseConfig base, SimConfig sim_cfg, Limits limits, ControllerGains gains,
                         LoopSnapshot snapshot)
    : base_(std::move(base)),
      sim_cfg_(sim_cfg),
      limits_(limits),
      gains_(gains),
      sim_(std::move(snapshot.sim)),
      odom_(snapshot.odom),
      measured_(std::move(snapshot.measured)),
      prev_command_(snapshot.prev_command) {
  sim_cfg_.validate();
  limits_.validate();
  gains_.validate();
  if (sim_.casters.size() != base_.size() || sim_.motors.size() != base_.size() ||
      sim_.motors_prev.size() != base_.size() || measured_.size() != base_.size()) {
    throw ConfigInvalid("loop snapshot does not match the caster count of the base config");
  }
  sim_.rng.seed(sim_cfg_.seed);
}

void ControlLoop::measure() {
  const std::vector<MotorState> enc = read_encoders(sim_, sim_cfg_);
  measured_.resize(enc.size());
  for (std::size_t i = 0; i < enc.size(); ++i) measured_[i] = joints_from_motors(base_[i], enc[i]);
}

TickRecord ControlLoop::step(const TickInput& in) {
  const double dt = sim_cfg_.dt;

  Twist2 command;
  switch (in.state) {
    case ControlState::kTrack: {
      const ControlOutput out = in.mode == DriveMode::kHolonomic
                                    ? position_controller(odom_.pose, in.target, gains_, limits_)
                                    : diff_drive_controller(odom_.pose, in.target, gains_, limits_);
      command = limit_twist(prev_command_, out.twist, dt, limits_);
      break;
    }
    case ControlState::kHalt:
      command = limit_twist(prev_command_, Twist2{}, dt, stopping_limits(limits_));
      break;
    case ControlState::kEstop:
      command = Twist2{};
      break;
  }
  if (in.mode == DriveMode::kDifferential) command = project_nonholonomic(command);

  std::vector<double> phis(measured_.size());
  for (std::size_t i = 0; i < phis.size(); ++i) phis[i] = measured_[i].phi;
  const std::vector<JointRates> rates = base_ik(base_, phis, command);
  std::vector<MotorVelocities> motor_cmds(rates.size());
  for (std::size_t i = 0; i < rates.size(); ++i) {
    motor_cmds[i] = motors_from_joint_rates(base_[i], rates[i].phi_dot, rates[i].rho_dot);
  }

  step_in_place(sim_, motor_cmds, sim_cfg_, base_);

  // Rates measured over the step, paired with the steer angles at its start.
  std::vector<CasterJointState> interval = measured_;
  measure();
  for (std::size_t i = 0; i < interval.size(); ++i) {
    interval[i].phi_dot = measured_[i].phi_dot;
    interval[i].rho_dot = measured_[i].rho_dot;
  }
  const FkResult fk = base_fk(base_, interval);
  odom_ = update(odom_, fk.twist, dt);
  prev_command_ = command;

  TickRecord rec;
  rec.tick = sim_.tick;
  rec.t = sim_.time;
  rec.odom_pose = odom_.pose;
  rec.truth_pose = sim_.truth_pose;
  rec.target_pose = in.target;
  rec.commanded = command;
  rec.joint_states = measured_;
  rec.mode = in.mode;
  rec.state = in.state;
  rec.fk_residual = fk.residual;
  if (in.state == ControlState::kTrack) {
    const Pose2 rel = compose(inverse(odom_.pose), in.target);
    rec.goal_reached = std::hypot(rel.x, rel.y) < gains_.pos_tol && std::abs(rel.theta) < gains_.theta_tol;
  }
  return rec;
}

LoopSnapshot ControlLoop::snapshot() const { return {sim_, odom_, measured_, prev_command_}; }

}  // namespace pcv
