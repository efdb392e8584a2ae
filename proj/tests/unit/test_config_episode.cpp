#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "pcv/config.hpp"
#include "pcv/episode.hpp"
#include "pcv/errors.hpp"
#include "pcv/json_io.hpp"

using namespace pcv;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pcvkit-test-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

fs::path record(const fs::path& dir, const AppConfig& cfg, int ticks) {
  ControlLoop loop(cfg.base, cfg.sim, cfg.limits, cfg.gains);
  for (int k = 0; k < 50; ++k) loop.step({Pose2(0.3, 0.1, 0.2), DriveMode::kHolonomic, ControlState::kTrack});
  EpisodeRecorder rec(dir, "demo run", cfg, loop.snapshot(), "20260101T000000Z");
  for (int k = 0; k < ticks; ++k) {
    const double s = 0.002 * k;
    const ControlState st = k < ticks * 3 / 4 ? ControlState::kTrack : ControlState::kHalt;
    const DriveMode mode = k < ticks / 2 ? DriveMode::kHolonomic : DriveMode::kDifferential;
    rec.write(loop.step({Pose2(0.5 + s, -0.2 + s, 0.8 - s), mode, st}));
  }
  rec.close();
  return rec.jsonl_path();
}

}  // namespace

TEST_CASE("default config round trips through JSON") {
  const AppConfig a;
  const AppConfig b = config_from_json(to_json(a));
  CHECK(to_json(a) == to_json(b));
  CHECK(b.teleop.port == 8765);
  CHECK(b.base.size() == 4);
}

TEST_CASE("missing keys keep their defaults") {
  const AppConfig c = config_from_json(json::parse(R"({"sim":{"seed":5},"teleop":{"gain":0.5}})"));
  CHECK(c.sim.seed == 5);
  CHECK(c.sim.dt == 0.004);
  CHECK(c.teleop.gain == 0.5);
  CHECK(c.limits.v_max == 1.0);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"simm":{}})")), ConfigInvalid);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"sim":{"dt":0.5}})")), ConfigInvalid);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"sim":{"dt":"fast"}})")), ConfigInvalid);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"gains":{"k_beta":1.0}})")), ConfigInvalid);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"limits":{"v_max":0}})")), ConfigInvalid);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"teleop":{"frame":"sideways"}})")), ConfigInvalid);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"base":{"casters":[{"h":0.2},{"h":0.3}]}})")), ConfigInvalid);
}

TEST_CASE("singular caster is rejected at load, naming the caster") {
  json j = to_json(AppConfig{});
  j["base"]["casters"][1]["b_x"] = 0.0;
  try {
    config_from_json(j);
    FAIL("expected SingularOffset");
  } catch (const SingularOffset& e) {
    CHECK(e.caster_index() == 1);
    CHECK(e.code() == ExitCode::kSingularOffset);
  }
}

TEST_CASE("load_config accepts comments") {
  const fs::path dir = scratch_dir("cfg");
  write_text(dir / "c.jsonc", "// sample\n{\n  /* seed */ \"sim\": {\"seed\": 11}\n}\n");
  CHECK(load_config(dir / "c.jsonc").sim.seed == 11);
  write_text(dir / "bad.json", "{\"sim\": ");
  CHECK_THROWS_AS(load_config(dir / "bad.json"), ConfigInvalid);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigInvalid);
  fs::remove_all(dir);
}

TEST_CASE("episode file layout and integrity") {
  const fs::path dir = scratch_dir("ep");
  AppConfig cfg;
  cfg.sim = SimConfig::noise_free();
  const fs::path path = record(dir, cfg, 200);
  CHECK(path.filename().string() == "demo_run-20260101T000000Z.jsonl");
  CHECK(fs::exists(episode_meta_path(path)));

  std::ifstream meta_in(episode_meta_path(path));
  const json meta = json::parse(meta_in);
  CHECK(meta.at("ticks") == 200);
  CHECK(meta.at("closed") == true);
  CHECK(meta.contains("config"));
  CHECK(meta.contains("initial_state"));

  const auto records = read_episode(path);
  REQUIRE(records.size() == 200);
  for (std::size_t i = 1; i < records.size(); ++i) {
    REQUIRE(records[i].tick == records[i - 1].tick + 1);
    REQUIRE(records[i].t - records[i - 1].t == doctest::Approx(cfg.sim.dt).epsilon(1e-12));
  }
  std::ifstream raw(path);
  std::string first;
  std::getline(raw, first);
  const json line = json::parse(first);
  for (const char* key : {"t", "odom_pose", "truth_pose", "target_pose", "commanded_twist", "joint_states", "mode",
                          "clutch_engaged"}) {
    CHECK(line.contains(key));
  }

  // A second recording in the same second gets its own file.
  const fs::path again = record(dir, cfg, 3);
  CHECK(again != path);
  fs::remove_all(dir);
}

TEST_CASE("noise-free episode replays exactly") {
  const fs::path dir = scratch_dir("replay");
  AppConfig cfg;
  cfg.sim = SimConfig::noise_free();
  const fs::path path = record(dir, cfg, 400);
  const ReplayReport r = replay_episode(path);
  CHECK(r.meta_found);
  CHECK(r.ticks == 400);
  CHECK(r.max_deviation < 1e-9);
  fs::remove_all(dir);
}

TEST_CASE("replay edge cases") {
  const fs::path dir = scratch_dir("edge");
  write_text(dir / "empty.jsonl", "");
  const ReplayReport empty = replay_episode(dir / "empty.jsonl");
  CHECK(empty.ticks == 0);
  CHECK(!empty.meta_found);

  AppConfig cfg;
  cfg.sim = SimConfig::noise_free();
  const fs::path good = record(dir, cfg, 5);
  std::ifstream in(good);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  text.resize(text.size() - 20);  // cut the last line short
  write_text(dir / "cut.jsonl", text);
  try {
    read_episode(dir / "cut.jsonl");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
    CHECK(std::string(e.what()).find("line 5") != std::string::npos);
  }

  write_text(dir / "garbage.jsonl", "{\"tick\": 1}\n");
  CHECK_THROWS_AS(read_episode(dir / "garbage.jsonl"), ParseError);
  fs::remove_all(dir);
}

TEST_CASE("episode names are sanitized") {
  CHECK(sanitize_episode_name("pick/place 1") == "pick_place_1");
  CHECK(sanitize_episode_name("") == "episode");
  CHECK(sanitize_episode_name("..") == "episode");
}
