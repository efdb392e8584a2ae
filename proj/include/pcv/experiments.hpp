#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pcv/config.hpp"
#include "pcv/control_loop.hpp"

namespace pcv {

struct RunResult {
  std::vector<TickRecord> log;
  bool reached = false;
  double duration = 0.0;            // s until the final waypoint was first reached
  double truth_path_length = 0.0;   // m
};

/// Drives through `waypoints` in order, advancing when the controller reports
/// the current goal reached. After the last goal the loop keeps running until
/// the command has decayed to zero (bounded by `settle_s`).
RunResult drive_waypoints(ControlLoop& loop, std::span<const Pose2> waypoints, DriveMode mode, double timeout_s,
                          double settle_s = 2.0);

double truth_path_length(std::span<const TickRecord> log, const Pose2& start = {});

enum class PathShape { kSquare, kCircle, kSpin };

PathShape path_shape_from_string(const std::string& name);
std::string to_string(PathShape shape);

/// Square: four sides of `length_scale`. Circle: 16 points on a circle of radius
/// `length_scale`, heading along the tangent. Spin: quarter turns in place for `revolutions` turns.
std::vector<Pose2> make_path(PathShape shape, double length_scale, int revolutions = 5);

struct BenchReport {
  PathShape shape = PathShape::kSquare;
  double length_scale = 1.0;
  int revolutions = 5;
  std::vector<std::uint64_t> seeds;
  std::vector<DriftReport> per_seed;
  DriftReport mean;
  bool all_reached = true;
  double max_commanded_speed = 0.0;
  SimConfig sim;
};

BenchReport bench_odometry(const AppConfig& cfg, PathShape shape, double length_scale, int seeds,
                           std::uint64_t base_seed, int revolutions = 5, double timeout_s = 120.0);

nlohmann::json to_json(const BenchReport& r);

struct CompareReport {
  Pose2 goal;
  double holonomic_path_m = 0.0;
  double diff_path_m = 0.0;
  double ratio = 1.0;  // diff / holonomic; 1 when both paths are empty
  double holonomic_time_s = 0.0;
  double diff_time_s = 0.0;
  RunResult holonomic;
  RunResult differential;
};

/// Runs both drive modes from the identity to `goal` without noise.
/// Throws Timeout if either mode misses the goal within `timeout_s`.
CompareReport compare_drive(const AppConfig& cfg, const Pose2& goal, double timeout_s = 60.0);

nlohmann::json to_json(const CompareReport& r);

struct KinematicsCheckReport {
  int samples = 0;
  double max_round_trip_error = 0.0;
  double max_residual = 0.0;
  double max_normalized_slip = 0.0;  // |slip| / delta from the finite-difference check
  bool pass = false;
};

inline constexpr double kRoundTripTolerance = 1e-9;
inline constexpr double kResidualTolerance = 1e-12;
inline constexpr double kNormalizedSlipTolerance = 1e-5;

/// IK/FK round trip and the finite-difference no-slip check over random
/// steer angles and twists (|v| <= 1 m/s, |omega| <= 2 rad/s).
KinematicsCheckReport check_kinematics(const BaseConfig& base, int samples, std::uint64_t seed);

nlohmann::json to_json(const KinematicsCheckReport& r);

}  // namespace pcv
