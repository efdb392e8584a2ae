// pcvkit: simulator, benchmarks and teleoperation service for a powered-caster base.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pcv/config.hpp"
#include "pcv/episode.hpp"
#include "pcv/errors.hpp"
#include "pcv/experiments.hpp"
#include "pcv/server.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint16_t> port;
  std::string out;
  std::string noise = "default";
};

/// off: no noise or quantization. default: the configured noise.
/// <std>: slip std as given, steer jitter at a fifth of it, quantized encoders.
void apply_noise(pcv::SimConfig& sim, const std::string& noise) {
  if (noise == "default") return;
  if (noise == "off") {
    pcv::SimConfig quiet = pcv::SimConfig::noise_free();
    sim.slip_noise_std = quiet.slip_noise_std;
    sim.steer_noise_std = quiet.steer_noise_std;
    sim.quantize = quiet.quantize;
    return;
  }
  std::size_t used = 0;
  double std_dev = 0.0;
  try {
    std_dev = std::stod(noise, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != noise.size() || !(std_dev >= 0.0)) {
    throw pcv::ConfigInvalid("--noise expects off, default or a non-negative number, got '" + noise + "'");
  }
  sim.slip_noise_std = std_dev;
  sim.steer_noise_std = 0.2 * std_dev;
  sim.quantize = std_dev > 0.0;
}

pcv::AppConfig resolve_config(const GlobalOptions& g) {
  pcv::AppConfig cfg = g.config.empty() ? pcv::AppConfig{} : pcv::load_config(g.config);
  if (g.seed) cfg.sim.seed = *g.seed;
  if (g.port) cfg.teleop.port = *g.port;
  apply_noise(cfg.sim, g.noise);
  cfg.sim.validate();
  return cfg;
}

fs::path write_report(const GlobalOptions& g, const pcv::AppConfig& cfg, const std::string& file, const json& j) {
  const fs::path dir = g.out.empty() ? fs::path(cfg.paths.report_dir) : fs::path(g.out);
  fs::create_directories(dir);
  const fs::path path = dir / file;
  std::ofstream out(path, std::ios::trunc);
  out << j.dump(2) << '\n';
  if (!out) throw pcv::Error("cannot write report '" + path.string() + "'");
  return path;
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream ss;
  ss << std::setprecision(precision) << v;
  return ss.str();
}

int run_serve(const GlobalOptions& g, const std::string& ui_dir) {
  const pcv::AppConfig cfg = resolve_config(g);
  pcv::ServerOptions opt;
  opt.port = cfg.teleop.port;
  opt.ui_dir = ui_dir.empty() ? fs::path(cfg.paths.ui_dir) : fs::path(ui_dir);
  opt.episode_dir = cfg.paths.episode_dir;
  pcv::Server server(cfg, opt);
  std::cout << "serving on http://0.0.0.0:" << server.port() << "/ (websocket on the same port)\n"
            << "ui: " << opt.ui_dir.string() << (fs::exists(opt.ui_dir / "index.html") ? "" : " (missing, placeholder)")
            << "\nepisodes: " << opt.episode_dir.string() << std::endl;
  server.run();
  std::cout << "stopped" << std::endl;
  return 0;
}

int run_bench(const GlobalOptions& g, const std::string& shape_name, double length, int seeds, int revolutions) {
  const pcv::AppConfig cfg = resolve_config(g);
  const pcv::PathShape shape = pcv::path_shape_from_string(shape_name);
  const pcv::BenchReport r = pcv::bench_odometry(cfg, shape, length, seeds, cfg.sim.seed, revolutions);
  const fs::path path = write_report(g, cfg, "bench-odometry-" + shape_name + ".json", pcv::to_json(r));
  std::cout << "bench-odometry " << shape_name << ": " << seeds << " seeds, final-pose drift\n"
            << "  translation drift  " << fmt(r.mean.translation_drift) << " cm/m"
            << (r.mean.translation_undefined ? " (undefined: no travel)" : "") << '\n'
            << "  rotation drift     " << fmt(r.mean.rotation_drift) << " deg/360"
            << (r.mean.rotation_undefined ? " (undefined: no rotation)" : "") << '\n'
            << "  all goals reached  " << (r.all_reached ? "yes" : "no") << '\n'
            << "report: " << path.string() << '\n';
  return r.all_reached ? 0 : static_cast<int>(pcv::ExitCode::kTimeout);
}

int run_compare(const GlobalOptions& g, const std::vector<double>& goal) {
  const pcv::AppConfig cfg = resolve_config(g);
  const pcv::CompareReport r = pcv::compare_drive(cfg, pcv::Pose2(goal[0], goal[1], goal[2]));
  const fs::path path = write_report(g, cfg, "compare-drive.json", pcv::to_json(r));
  std::cout << "compare-drive to (" << goal[0] << ", " << goal[1] << ", " << goal[2] << ")\n"
            << "  holonomic     " << fmt(r.holonomic_path_m) << " m in " << fmt(r.holonomic_time_s) << " s\n"
            << "  differential  " << fmt(r.diff_path_m) << " m in " << fmt(r.diff_time_s) << " s\n"
            << "  path ratio    " << fmt(r.ratio) << '\n'
            << "report: " << path.string() << '\n';
  return 0;
}

int run_replay(const GlobalOptions& g, const std::string& file) {
  std::optional<pcv::AppConfig> fallback;
  if (!g.config.empty()) fallback = resolve_config(g);
  const pcv::ReplayReport r = pcv::replay_episode(file, fallback);
  const bool pass = r.max_deviation < 1e-9;
  json j = pcv::to_json(r);
  j["episode"] = fs::path(file).filename().string();
  j["tolerance"] = 1e-9;
  j["pass"] = pass;
  const pcv::AppConfig report_cfg = fallback.value_or(pcv::AppConfig{});
  const fs::path path = write_report(g, report_cfg, "replay.json", j);
  std::cout << "replay " << file << ": " << r.ticks << " ticks, max deviation " << fmt(r.max_deviation, 3)
            << (r.meta_found ? "" : " (no sidecar; default config, identity start)") << " -> "
            << (pass ? "PASS" : "FAIL") << '\n'
            << "report: " << path.string() << '\n';
  return pass ? 0 : static_cast<int>(pcv::ExitCode::kGeneric);
}

int run_check(const GlobalOptions& g, int samples) {
  const pcv::AppConfig cfg = resolve_config(g);
  const pcv::KinematicsCheckReport r = pcv::check_kinematics(cfg.base, samples, cfg.sim.seed);
  const fs::path path = write_report(g, cfg, "check-kinematics.json", pcv::to_json(r));
  std::cout << "check-kinematics: " << r.samples << " samples\n"
            << "  max round-trip error  " << fmt(r.max_round_trip_error, 3) << '\n'
            << "  max FK residual       " << fmt(r.max_residual, 3) << '\n'
            << "  max normalized slip   " << fmt(r.max_normalized_slip, 3) << '\n'
            << (r.pass ? "PASS" : "FAIL") << '\n'
            << "report: " << path.string() << '\n';
  return r.pass ? 0 : static_cast<int>(pcv::ExitCode::kGeneric);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Powered-caster vehicle simulator, benchmarks and teleoperation service"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "pcvkit 0.1.0");

  GlobalOptions g;
  app.add_option("--config", g.config, "JSON config file (comments allowed)")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "RNG seed (overrides sim.seed)");
  app.add_option("--port", g.port, "Service port (overrides teleop.port)");
  app.add_option("--out", g.out, "Report directory (overrides paths.report_dir)");
  app.add_option("--noise", g.noise, "off | default | <slip std>")->capture_default_str();

  std::string ui_dir;
  CLI::App* serve = app.add_subcommand("serve", "Run the sim, control loop and teleop service");
  serve->add_option("--ui-dir", ui_dir, "Static UI bundle (overrides paths.ui_dir)");

  std::string shape = "square";
  double length = 1.0;
  int seeds = 20;
  int revolutions = 5;
  CLI::App* bench = app.add_subcommand("bench-odometry", "Drive a closed path and report odometry drift");
  bench->add_option("--shape", shape, "square | circle | spin")
      ->check(CLI::IsMember({"square", "circle", "spin"}))
      ->capture_default_str();
  bench->add_option("--length", length, "Path length scale in m")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--seeds", seeds, "Number of seeds")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--revolutions", revolutions, "Turns for the spin path")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::vector<double> goal{1.0, 0.0, 0.0};
  CLI::App* compare = app.add_subcommand("compare-drive", "Holonomic vs differential drive to one goal");
  compare->add_option("--goal", goal, "x y theta")->expected(3)->capture_default_str();

  std::string episode;
  CLI::App* replay = app.add_subcommand("replay", "Re-run a recorded episode without noise");
  replay->add_option("episode", episode, "Episode .jsonl file")->required()->check(CLI::ExistingFile);

  int samples = 10000;
  CLI::App* check = app.add_subcommand("check-kinematics", "IK/FK round trip and no-slip oracle");
  check->add_option("--samples", samples, "Random draws")->check(CLI::PositiveNumber)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(pcv::ExitCode::kUsage);
  }

  try {
    if (*serve) return run_serve(g, ui_dir);
    if (*bench) return run_bench(g, shape, length, seeds, revolutions);
    if (*compare) return run_compare(g, goal);
    if (*replay) return run_replay(g, episode);
    if (*check) return run_check(g, samples);
  } catch (const pcv::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(pcv::ExitCode::kGeneric);
  }
  return static_cast<int>(pcv::ExitCode::kUsage);
}
