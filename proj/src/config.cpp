#include "pcv/config.hpp"

#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string_view>

#include "pcv/errors.hpp"
#include "pcv/json_io.hpp"

namespace pcv {

using nlohmann::json;

namespace {

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigInvalid(where + " must be a JSON object");
}

void reject_unknown(const json& j, const std::string& where, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (std::string_view a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigInvalid("unknown key '" + where + "." + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigInvalid("'" + where + "." + key + "' has the wrong type");
  }
}

CasterGeometry caster_from_json(const json& j, std::size_t index) {
  const std::string where = "base.casters[" + std::to_string(index) + "]";
  require_object(j, where);
  reject_unknown(j, where,
                 {"h", "beta", "b_x", "b_y", "r", "steer_ratio", "drive_ratio", "couple_ratio",
                  "steer_encoder_offset"});
  CasterGeometry g;
  read(j, "h", g.h, where);
  read(j, "beta", g.beta, where);
  read(j, "b_x", g.b_x, where);
  read(j, "b_y", g.b_y, where);
  read(j, "r", g.r, where);
  read(j, "steer_ratio", g.steer_ratio, where);
  read(j, "drive_ratio", g.drive_ratio, where);
  read(j, "couple_ratio", g.couple_ratio, where);
  read(j, "steer_encoder_offset", g.steer_encoder_offset, where);
  return g;
}

}  // namespace

AppConfig config_from_json(const json& j) {
  require_object(j, "config");
  reject_unknown(j, "config", {"base", "sim", "limits", "gains", "teleop", "paths"});
  AppConfig cfg;

  if (j.contains("base")) {
    const json& b = j.at("base");
    require_object(b, "base");
    reject_unknown(b, "base", {"casters"});
    if (b.contains("casters")) {
      const json& list = b.at("casters");
      if (!list.is_array()) throw ConfigInvalid("base.casters must be an array");
      std::vector<CasterGeometry> casters;
      for (std::size_t i = 0; i < list.size(); ++i) casters.push_back(caster_from_json(list[i], i));
      cfg.base = BaseConfig(std::move(casters));
    }
  }

  if (j.contains("sim")) {
    const json& s = j.at("sim");
    require_object(s, "sim");
    reject_unknown(s, "sim",
                   {"dt", "slip_noise_std", "steer_noise_std", "encoder_counts_per_motor_rev",
                    "abs_encoder_counts_per_rev", "quantize", "seed"});
    read(s, "dt", cfg.sim.dt, "sim");
    read(s, "slip_noise_std", cfg.sim.slip_noise_std, "sim");
    read(s, "steer_noise_std", cfg.sim.steer_noise_std, "sim");
    read(s, "encoder_counts_per_motor_rev", cfg.sim.encoder_counts_per_motor_rev, "sim");
    read(s, "abs_encoder_counts_per_rev", cfg.sim.abs_encoder_counts_per_rev, "sim");
    read(s, "quantize", cfg.sim.quantize, "sim");
    read(s, "seed", cfg.sim.seed, "sim");
  }
  cfg.sim.validate();

  if (j.contains("limits")) {
    const json& l = j.at("limits");
    require_object(l, "limits");
    reject_unknown(l, "limits", {"v_max", "omega_max", "a_max", "alpha_max"});
    read(l, "v_max", cfg.limits.v_max, "limits");
    read(l, "omega_max", cfg.limits.omega_max, "limits");
    read(l, "a_max", cfg.limits.a_max, "limits");
    read(l, "alpha_max", cfg.limits.alpha_max, "limits");
  }
  cfg.limits.validate();

  if (j.contains("gains")) {
    const json& g = j.at("gains");
    require_object(g, "gains");
    reject_unknown(g, "gains", {"k_pos", "k_theta", "pos_tol", "theta_tol", "k_rho", "k_alpha", "k_beta"});
    read(g, "k_pos", cfg.gains.k_pos, "gains");
    read(g, "k_theta", cfg.gains.k_theta, "gains");
    read(g, "pos_tol", cfg.gains.pos_tol, "gains");
    read(g, "theta_tol", cfg.gains.theta_tol, "gains");
    read(g, "k_rho", cfg.gains.k_rho, "gains");
    read(g, "k_alpha", cfg.gains.k_alpha, "gains");
    read(g, "k_beta", cfg.gains.k_beta, "gains");
  }
  cfg.gains.validate();

  if (j.contains("teleop")) {
    const json& t = j.at("teleop");
    require_object(t, "teleop");
    reject_unknown(t, "teleop", {"port", "gain", "watchdog_ms", "frame"});
    int port = cfg.teleop.port;
    read(t, "port", port, "teleop");
    if (port < 0 || port > std::numeric_limits<std::uint16_t>::max()) {
      throw ConfigInvalid("teleop.port out of range");
    }
    cfg.teleop.port = static_cast<std::uint16_t>(port);
    read(t, "gain", cfg.teleop.gain, "teleop");
    read(t, "watchdog_ms", cfg.teleop.watchdog_ms, "teleop");
    std::string frame = "body";
    read(t, "frame", frame, "teleop");
    if (frame == "body") {
      cfg.teleop.frame = MappingFrame::kBody;
    } else if (frame == "world") {
      cfg.teleop.frame = MappingFrame::kWorld;
    } else {
      throw ConfigInvalid("teleop.frame must be 'body' or 'world'");
    }
    if (!(cfg.teleop.gain > 0.0)) throw ConfigInvalid("teleop.gain must be > 0");
    if (cfg.teleop.watchdog_ms <= 0) throw ConfigInvalid("teleop.watchdog_ms must be > 0");
  }

  if (j.contains("paths")) {
    const json& p = j.at("paths");
    require_object(p, "paths");
    reject_unknown(p, "paths", {"episode_dir", "report_dir", "ui_dir"});
    read(p, "episode_dir", cfg.paths.episode_dir, "paths");
    read(p, "report_dir", cfg.paths.report_dir, "paths");
    read(p, "ui_dir", cfg.paths.ui_dir, "paths");
  }
  return cfg;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot open config file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigInvalid("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

json to_json(const AppConfig& cfg) {
  json casters = json::array();
  for (const CasterGeometry& g : cfg.base.casters()) casters.push_back(g);
  return json{{"base", {{"casters", casters}}},
              {"sim", cfg.sim},
              {"limits", cfg.limits},
              {"gains", cfg.gains},
              {"teleop",
               {{"port", cfg.teleop.port},
                {"gain", cfg.teleop.gain},
                {"watchdog_ms", cfg.teleop.watchdog_ms},
                {"frame", cfg.teleop.frame == MappingFrame::kBody ? "body" : "world"}}},
              {"paths",
               {{"episode_dir", cfg.paths.episode_dir},
                {"report_dir", cfg.paths.report_dir},
                {"ui_dir", cfg.paths.ui_dir}}}};
}

}  // namespace pcv
