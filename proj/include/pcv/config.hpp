#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "pcv/caster_kinematics.hpp"
#include "pcv/control.hpp"
#include "pcv/sim.hpp"

namespace pcv {

/// How operator displacement is applied to the base target.
enum class MappingFrame {
  kBody,   // relative phone motion replayed in the target's own frame
  kWorld,  // phone translation applied along world axes
};

struct TeleopConfig {
  std::uint16_t port = 8765;
  double gain = 1.0;
  int watchdog_ms = 250;
  MappingFrame frame = MappingFrame::kBody;
};

struct PathsConfig {
  std::string episode_dir = "episodes";
  std::string report_dir = "reports";
  std::string ui_dir = "ui/dist";
};

struct AppConfig {
  BaseConfig base = BaseConfig::make_default();
  SimConfig sim;
  Limits limits;
  ControllerGains gains;
  TeleopConfig teleop;
  PathsConfig paths;
};

/// Strict parse: unknown keys are rejected, missing keys keep their defaults,
/// and every module invariant is checked. Throws ConfigInvalid or
/// SingularOffset.
AppConfig config_from_json(const nlohmann::json& j);

/// Reads a JSON config file. Comments are permitted.
AppConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const AppConfig& cfg);

}  // namespace pcv
