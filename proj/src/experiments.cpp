#include "pcv/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "pcv/errors.hpp"
#include "pcv/json_io.hpp"
#include "pcv/oracle/no_slip.hpp"

namespace pcv {

using nlohmann::json;

namespace {

bool is_zero(const Twist2& v) { return v.vx == 0.0 && v.vy == 0.0 && v.omega == 0.0; }

bool within_goal(const Pose2& current, const Pose2& target, const ControllerGains& g) {
  const Pose2 rel = compose(inverse(current), target);
  return std::hypot(rel.x, rel.y) < g.pos_tol && std::abs(rel.theta) < g.theta_tol;
}

DriftReport mean_of(const std::vector<DriftReport>& reports) {
  DriftReport m;
  if (reports.empty()) return m;
  m.translation_undefined = true;
  m.rotation_undefined = true;
  for (const DriftReport& r : reports) {
    m.translation_drift += r.translation_drift;
    m.rotation_drift += r.rotation_drift;
    m.final_position_error += r.final_position_error;
    m.final_heading_error += r.final_heading_error;
    m.truth_distance += r.truth_distance;
    m.truth_rotation += r.truth_rotation;
    m.translation_undefined = m.translation_undefined && r.translation_undefined;
    m.rotation_undefined = m.rotation_undefined && r.rotation_undefined;
  }
  const double n = static_cast<double>(reports.size());
  m.translation_drift /= n;
  m.rotation_drift /= n;
  m.final_position_error /= n;
  m.final_heading_error /= n;
  m.truth_distance /= n;
  m.truth_rotation /= n;
  return m;
}

}  // namespace

RunResult drive_waypoints(ControlLoop& loop, std::span<const Pose2> waypoints, DriveMode mode, double timeout_s,
                          double settle_s) {
  RunResult result;
  const Pose2 start = loop.sim().truth_pose;
  const double t0 = loop.sim().time;
  const auto max_ticks = static_cast<std::uint64_t>(std::ceil(timeout_s / loop.dt()));

  std::size_t idx = 0;
  while (idx < waypoints.size() && within_goal(loop.odometry().pose, waypoints[idx], loop.gains())) ++idx;

  if (idx == waypoints.size()) {
    result.reached = true;
  } else {
    for (std::uint64_t k = 0; k < max_ticks; ++k) {
      TickRecord rec = loop.step({waypoints[idx], mode, ControlState::kTrack});
      const bool hit = rec.goal_reached;
      result.log.push_back(std::move(rec));
      if (!hit) continue;
      if (++idx == waypoints.size()) {
        result.reached = true;
        result.duration = result.log.back().t - t0;
        break;
      }
    }
  }

  if (result.reached && !waypoints.empty()) {
    const auto settle_ticks = static_cast<std::uint64_t>(std::ceil(settle_s / loop.dt()));
    for (std::uint64_t k = 0; k < settle_ticks && !is_zero(loop.last_command()); ++k) {
      result.log.push_back(loop.step({waypoints.back(), mode, ControlState::kTrack}));
    }
  }
  result.truth_path_length = truth_path_length(result.log, start);
  return result;
}

double truth_path_length(std::span<const TickRecord> log, const Pose2& start) {
  double length = 0.0;
  Pose2 prev = start;
  for (const TickRecord& r : log) {
    length += std::hypot(r.truth_pose.x - prev.x, r.truth_pose.y - prev.y);
    prev = r.truth_pose;
  }
  return length;
}

PathShape path_shape_from_string(const std::string& name) {
  if (name == "square") return PathShape::kSquare;
  if (name == "circle") return PathShape::kCircle;
  if (name == "spin") return PathShape::kSpin;
  throw ConfigInvalid("unknown path shape '" + name + "' (expected square, circle or spin)");
}

std::string to_string(PathShape shape) {
  switch (shape) {
    case PathShape::kSquare:
      return "square";
    case PathShape::kCircle:
      return "circle";
    case PathShape::kSpin:
      return "spin";
  }
  return "square";
}

std::vector<Pose2> make_path(PathShape shape, double length_scale, int revolutions) {
  std::vector<Pose2> path;
  const double l = length_scale;
  switch (shape) {
    case PathShape::kSquare:
      path = {{l, 0.0, 0.0}, {l, l, 0.0}, {0.0, l, 0.0}, {0.0, 0.0, 0.0}};
      break;
    case PathShape::kCircle: {
      constexpr int kPoints = 16;
      for (int k = 1; k <= kPoints; ++k) {
        const double a = 2.0 * kPi * k / kPoints;
        path.emplace_back(l * std::sin(a), l * (1.0 - std::cos(a)), a);  // facing along the tangent
      }
      break;
    }
    case PathShape::kSpin:
      for (int k = 1; k <= 4 * revolutions; ++k) path.emplace_back(0.0, 0.0, k * kPi / 2.0);
      break;
  }
  return path;
}

BenchReport bench_odometry(const AppConfig& cfg, PathShape shape, double length_scale, int seeds,
                           std::uint64_t base_seed, int revolutions, double timeout_s) {
  if (seeds < 1) throw ConfigInvalid("bench_odometry needs at least one seed");
  if (!(length_scale > 0.0)) throw ConfigInvalid("length_scale must be > 0");

  BenchReport report;
  report.shape = shape;
  report.length_scale = length_scale;
  report.revolutions = revolutions;
  report.sim = cfg.sim;
  const std::vector<Pose2> path = make_path(shape, length_scale, revolutions);

  for (int k = 0; k < seeds; ++k) {
    SimConfig sim = cfg.sim;
    sim.seed = base_seed + static_cast<std::uint64_t>(k);
    ControlLoop loop(cfg.base, sim, cfg.limits, cfg.gains);
    const RunResult run = drive_waypoints(loop, path, DriveMode::kHolonomic, timeout_s);

    std::vector<TimedPose> estimated{{0.0, Pose2{}}};
    std::vector<TimedPose> truth{{0.0, Pose2{}}};
    for (const TickRecord& r : run.log) {
      estimated.push_back({r.t, r.odom_pose});
      truth.push_back({r.t, r.truth_pose});
      report.max_commanded_speed = std::max(report.max_commanded_speed, r.commanded.linear_speed());
    }
    report.seeds.push_back(sim.seed);
    report.per_seed.push_back(drift_metrics(estimated, truth));
    report.all_reached = report.all_reached && run.reached;
  }
  report.mean = mean_of(report.per_seed);
  return report;
}

json to_json(const BenchReport& r) {
  json per_seed = json::array();
  for (std::size_t i = 0; i < r.per_seed.size(); ++i) {
    json entry = r.per_seed[i];
    entry["seed"] = r.seeds[i];
    per_seed.push_back(entry);
  }
  return json{{"command", "bench-odometry"},
              {"shape", to_string(r.shape)},
              {"length_scale_m", r.length_scale},
              {"revolutions", r.revolutions},
              {"drift_measure", "final_pose"},
              {"sim", r.sim},
              {"all_goals_reached", r.all_reached},
              {"max_commanded_speed_mps", r.max_commanded_speed},
              {"mean", r.mean},
              {"per_seed", per_seed}};
}

CompareReport compare_drive(const AppConfig& cfg, const Pose2& goal, double timeout_s) {
  SimConfig sim = SimConfig::noise_free();
  sim.dt = cfg.sim.dt;
  sim.seed = cfg.sim.seed;
  const Pose2 targets[] = {goal};

  CompareReport report;
  report.goal = goal;
  for (const DriveMode mode : {DriveMode::kHolonomic, DriveMode::kDifferential}) {
    ControlLoop loop(cfg.base, sim, cfg.limits, cfg.gains);
    RunResult run = drive_waypoints(loop, targets, mode, timeout_s);
    if (!run.reached) {
      throw Timeout(std::string(to_string(mode)) + " drive did not reach the goal within " +
                    std::to_string(timeout_s) + " s");
    }
    (mode == DriveMode::kHolonomic ? report.holonomic : report.differential) = std::move(run);
  }
  report.holonomic_path_m = report.holonomic.truth_path_length;
  report.diff_path_m = report.differential.truth_path_length;
  report.holonomic_time_s = report.holonomic.duration;
  report.diff_time_s = report.differential.duration;
  constexpr double kEmptyPath = 1e-12;
  if (report.holonomic_path_m > kEmptyPath) {
    report.ratio = report.diff_path_m / report.holonomic_path_m;
  } else {
    report.ratio = report.diff_path_m > kEmptyPath ? std::numeric_limits<double>::infinity() : 1.0;
  }
  return report;
}

json to_json(const CompareReport& r) {
  return json{{"command", "compare-drive"},
              {"goal", r.goal},
              {"holonomic_path_m", r.holonomic_path_m},
              {"diff_path_m", r.diff_path_m},
              {"ratio", std::isfinite(r.ratio) ? json(r.ratio) : json(nullptr)},
              {"holonomic_time_s", r.holonomic_time_s},
              {"diff_time_s", r.diff_time_s}};
}

KinematicsCheckReport check_kinematics(const BaseConfig& base, int samples, std::uint64_t seed) {
  if (samples < 1) throw ConfigInvalid("check_kinematics needs n_samples >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> spin(-2.0, 2.0);

  KinematicsCheckReport report;
  report.samples = samples;
  std::vector<double> phis(base.size());
  std::vector<CasterJointState> states(base.size());
  for (int k = 0; k < samples; ++k) {
    for (double& phi : phis) phi = angle(rng);
    const double heading = angle(rng);
    const double speed = unit(rng);
    const Twist2 v{speed * std::cos(heading), speed * std::sin(heading), spin(rng)};

    const std::vector<JointRates> rates = base_ik(base, phis, v);
    for (std::size_t i = 0; i < base.size(); ++i) {
      states[i] = {phis[i], 0.0, rates[i].phi_dot, rates[i].rho_dot};
      const oracle::SlipCheck slip =
          oracle::finite_difference_slip(base[i], phis[i], v, rates[i].phi_dot, rates[i].rho_dot);
      report.max_normalized_slip = std::max(report.max_normalized_slip, slip.normalized);
    }
    const FkResult fk = base_fk(base, states);
    const double err = std::max({std::abs(fk.twist.vx - v.vx), std::abs(fk.twist.vy - v.vy),
                                 std::abs(fk.twist.omega - v.omega)});
    report.max_round_trip_error = std::max(report.max_round_trip_error, err);
    report.max_residual = std::max(report.max_residual, fk.residual);
  }
  report.pass = report.max_round_trip_error < kRoundTripTolerance && report.max_residual < kResidualTolerance &&
                report.max_normalized_slip < kNormalizedSlipTolerance;
  return report;
}

json to_json(const KinematicsCheckReport& r) {
  return json{{"command", "check-kinematics"},
              {"samples", r.samples},
              {"max_round_trip_error", r.max_round_trip_error},
              {"max_residual", r.max_residual},
              {"max_normalized_slip", r.max_normalized_slip},
              {"tolerances",
               {{"round_trip", kRoundTripTolerance},
                {"residual", kResidualTolerance},
                {"normalized_slip", kNormalizedSlipTolerance}}},
              {"pass", r.pass}};
}

}  // namespace pcv
