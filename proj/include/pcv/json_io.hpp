#pragma once

#include <nlohmann/json.hpp>

#include "pcv/caster_kinematics.hpp"
#include "pcv/control.hpp"
#include "pcv/control_loop.hpp"
#include "pcv/odometry.hpp"
#include "pcv/se2.hpp"
#include "pcv/sim.hpp"

// JSON mappings for the value types that cross file and wire boundaries.
// Poses are {"x","y","theta"}; twists add a "frame" tag.

namespace pcv {

void to_json(nlohmann::json& j, const Pose2& p);
void from_json(const nlohmann::json& j, Pose2& p);

void to_json(nlohmann::json& j, const Twist2& v);
void from_json(const nlohmann::json& j, Twist2& v);

void to_json(nlohmann::json& j, const CasterGeometry& g);

void to_json(nlohmann::json& j, const CasterJointState& s);
void from_json(const nlohmann::json& j, CasterJointState& s);

void to_json(nlohmann::json& j, const MotorState& m);
void from_json(const nlohmann::json& j, MotorState& m);

void to_json(nlohmann::json& j, const OdometryState& s);
void from_json(const nlohmann::json& j, OdometryState& s);

void to_json(nlohmann::json& j, const DriftReport& r);

void to_json(nlohmann::json& j, const SimConfig& c);
void to_json(nlohmann::json& j, const Limits& l);
void to_json(nlohmann::json& j, const ControllerGains& g);

/// Sim state without the RNG.
void to_json(nlohmann::json& j, const SimState& s);
void from_json(const nlohmann::json& j, SimState& s);

void to_json(nlohmann::json& j, const LoopSnapshot& s);
void from_json(const nlohmann::json& j, LoopSnapshot& s);

/// One episode line.
void to_json(nlohmann::json& j, const TickRecord& r);
void from_json(const nlohmann::json& j, TickRecord& r);

}  // namespace pcv
