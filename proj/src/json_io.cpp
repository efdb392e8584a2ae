#include "pcv/json_io.hpp"

#include <string>

namespace pcv {

using nlohmann::json;

void to_json(json& j, const Pose2& p) { j = json{{"x", p.x}, {"y", p.y}, {"theta", p.theta}}; }

void from_json(const json& j, Pose2& p) {
  p = Pose2{j.at("x").get<double>(), j.at("y").get<double>(), j.at("theta").get<double>()};
}

void to_json(json& j, const Twist2& v) {
  j = json{{"vx", v.vx}, {"vy", v.vy}, {"omega", v.omega}, {"frame", to_string(v.frame)}};
}

void from_json(const json& j, Twist2& v) {
  v.vx = j.at("vx").get<double>();
  v.vy = j.at("vy").get<double>();
  v.omega = j.at("omega").get<double>();
  v.frame = j.value("frame", std::string("body")) == "world" ? Frame::kWorld : Frame::kBody;
}

void to_json(json& j, const CasterGeometry& g) {
  j = json{{"h", g.h},
           {"beta", g.beta},
           {"b_x", g.b_x},
           {"b_y", g.b_y},
           {"r", g.r},
           {"steer_ratio", g.steer_ratio},
           {"drive_ratio", g.drive_ratio},
           {"couple_ratio", g.couple_ratio},
           {"steer_encoder_offset", g.steer_encoder_offset}};
}

void to_json(json& j, const CasterJointState& s) {
  j = json{{"phi", s.phi}, {"rho", s.rho}, {"phi_dot", s.phi_dot}, {"rho_dot", s.rho_dot}};
}

void from_json(const json& j, CasterJointState& s) {
  s.phi = j.at("phi").get<double>();
  s.rho = j.at("rho").get<double>();
  s.phi_dot = j.at("phi_dot").get<double>();
  s.rho_dot = j.at("rho_dot").get<double>();
}

void to_json(json& j, const MotorState& m) {
  j = json{{"steer_motor_pos", m.steer_motor_pos},
           {"steer_motor_vel", m.steer_motor_vel},
           {"drive_motor_pos", m.drive_motor_pos},
           {"drive_motor_vel", m.drive_motor_vel},
           {"abs_steer_reading", m.abs_steer_reading}};
}

void from_json(const json& j, MotorState& m) {
  m.steer_motor_pos = j.at("steer_motor_pos").get<double>();
  m.steer_motor_vel = j.at("steer_motor_vel").get<double>();
  m.drive_motor_pos = j.at("drive_motor_pos").get<double>();
  m.drive_motor_vel = j.at("drive_motor_vel").get<double>();
  m.abs_steer_reading = j.at("abs_steer_reading").get<double>();
}

void to_json(json& j, const OdometryState& s) {
  j = json{{"pose", s.pose}, {"distance_traveled", s.distance_traveled}, {"rotation_traveled", s.rotation_traveled}};
}

void from_json(const json& j, OdometryState& s) {
  s.pose = j.at("pose").get<Pose2>();
  s.distance_traveled = j.at("distance_traveled").get<double>();
  s.rotation_traveled = j.at("rotation_traveled").get<double>();
}

void to_json(json& j, const DriftReport& r) {
  j = json{{"translation_drift_cm_per_m", r.translation_drift},
           {"rotation_drift_deg_per_360", r.rotation_drift},
           {"final_position_error_m", r.final_position_error},
           {"final_heading_error_deg", r.final_heading_error},
           {"truth_distance_m", r.truth_distance},
           {"truth_rotation_deg", r.truth_rotation},
           {"translation_undefined", r.translation_undefined},
           {"rotation_undefined", r.rotation_undefined}};
}

void to_json(json& j, const SimConfig& c) {
  j = json{{"dt", c.dt},
           {"slip_noise_std", c.slip_noise_std},
           {"steer_noise_std", c.steer_noise_std},
           {"encoder_counts_per_motor_rev", c.encoder_counts_per_motor_rev},
           {"abs_encoder_counts_per_rev", c.abs_encoder_counts_per_rev},
           {"quantize", c.quantize},
           {"seed", c.seed}};
}

void to_json(json& j, const Limits& l) {
  j = json{{"v_max", l.v_max}, {"omega_max", l.omega_max}, {"a_max", l.a_max}, {"alpha_max", l.alpha_max}};
}

void to_json(json& j, const ControllerGains& g) {
  j = json{{"k_pos", g.k_pos},     {"k_theta", g.k_theta}, {"pos_tol", g.pos_tol}, {"theta_tol", g.theta_tol},
           {"k_rho", g.k_rho},     {"k_alpha", g.k_alpha}, {"k_beta", g.k_beta}};
}

void to_json(json& j, const SimState& s) {
  j = json{{"truth_pose", s.truth_pose},   {"casters", s.casters},         {"motors", s.motors},
           {"motors_prev", s.motors_prev}, {"tick", s.tick},               {"time", s.time},
           {"fk_residual", s.fk_residual}, {"truth_twist", s.truth_twist}};
}

void from_json(const json& j, SimState& s) {
  s.truth_pose = j.at("truth_pose").get<Pose2>();
  s.casters = j.at("casters").get<std::vector<CasterJointState>>();
  s.motors = j.at("motors").get<std::vector<MotorState>>();
  s.motors_prev = j.at("motors_prev").get<std::vector<MotorState>>();
  s.tick = j.at("tick").get<std::uint64_t>();
  s.time = j.at("time").get<double>();
  s.fk_residual = j.value("fk_residual", 0.0);
  if (j.contains("truth_twist")) s.truth_twist = j.at("truth_twist").get<Twist2>();
}

void to_json(json& j, const LoopSnapshot& s) {
  j = json{{"sim", s.sim}, {"odom", s.odom}, {"measured", s.measured}, {"prev_command", s.prev_command}};
}

void from_json(const json& j, LoopSnapshot& s) {
  s.sim = j.at("sim").get<SimState>();
  s.odom = j.at("odom").get<OdometryState>();
  s.measured = j.at("measured").get<std::vector<CasterJointState>>();
  s.prev_command = j.at("prev_command").get<Twist2>();
}

void to_json(json& j, const TickRecord& r) {
  j = json{{"tick", r.tick},
           {"t", r.t},
           {"odom_pose", r.odom_pose},
           {"truth_pose", r.truth_pose},
           {"target_pose", r.target_pose},
           {"commanded_twist", r.commanded},
           {"joint_states", r.joint_states},
           {"mode", to_string(r.mode)},
           {"control_state", to_string(r.state)},
           {"clutch_engaged", r.clutch_engaged},
           {"goal_reached", r.goal_reached},
           {"fk_residual", r.fk_residual}};
}

void from_json(const json& j, TickRecord& r) {
  r.tick = j.at("tick").get<std::uint64_t>();
  r.t = j.at("t").get<double>();
  r.odom_pose = j.at("odom_pose").get<Pose2>();
  r.truth_pose = j.at("truth_pose").get<Pose2>();
  r.target_pose = j.at("target_pose").get<Pose2>();
  r.commanded = j.at("commanded_twist").get<Twist2>();
  r.joint_states = j.at("joint_states").get<std::vector<CasterJointState>>();
  r.mode = drive_mode_from_string(j.at("mode").get<std::string>());
  r.state = control_state_from_string(j.value("control_state", std::string("track")));
  r.clutch_engaged = j.value("clutch_engaged", false);
  r.goal_reached = j.value("goal_reached", false);
  r.fk_residual = j.value("fk_residual", 0.0);
}

}  // namespace pcv
