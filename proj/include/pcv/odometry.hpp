#pragma once

#include <span>
#include <vector>

#include "pcv/se2.hpp"

namespace pcv {

struct OdometryState {
  Pose2 pose;                      // world-frame estimate
  double distance_traveled = 0.0;  // m
  double rotation_traveled = 0.0;  // rad
};

/// Integrates a body twist held for `dt` with the exact SE(2) exponential.
OdometryState update(const OdometryState& s, const Twist2& v, double dt);

struct TimedPose {
  double t = 0.0;
  Pose2 pose;
};

/// Final-pose drift of an estimated trace against ground truth.
///
/// Drift is measured at the last sample, not as a worst case along the path.
/// When the truth trace travels no distance (or no rotation) the corresponding
/// drift is reported as 0 and the matching `*_undefined` flag is set.
struct DriftReport {
  double translation_drift = 0.0;     // cm per m traveled
  double rotation_drift = 0.0;        // deg per 360 deg rotated
  double final_position_error = 0.0;  // m
  double final_heading_error = 0.0;   // deg
  double truth_distance = 0.0;        // m
  double truth_rotation = 0.0;        // deg
  bool translation_undefined = false;
  bool rotation_undefined = false;
};

/// Truth travel below these floors leaves the matching drift ratio undefined
/// (reported as 0 with a flag).
inline constexpr double kMinDriftDistance = 1e-3;     // m
inline constexpr double kMinDriftRotationDeg = 1.0;   // deg

/// Throws TraceMismatch if the traces differ in length, have fewer than two
/// samples, or disagree on timestamps.
DriftReport drift_metrics(std::span<const TimedPose> estimated, std::span<const TimedPose> truth);

}  // namespace pcv
