#include <doctest.h>

#include <filesystem>

#include <nlohmann/json.hpp>

#include "pcv/episode.hpp"
#include "pcv/hub.hpp"
#include "pcv/runtime.hpp"

using namespace pcv;
using namespace pcv::teleop;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string pose_text(std::int64_t t_ms, double x, double y, double yaw = 0.0) {
  return json{{"type", "pose"},
              {"t_ms", t_ms},
              {"position", {x, y, 1.0}},
              {"quaternion", {std::cos(yaw / 2), 0.0, 0.0, std::sin(yaw / 2)}}}
      .dump();
}

AppConfig quiet_config() {
  AppConfig cfg;
  cfg.sim = SimConfig::noise_free();
  return cfg;
}

/// Headless operator driving a Runtime on simulated time.
struct Rig {
  explicit Rig(AppConfig c, fs::path episodes = fs::temp_directory_path())
      : cfg(std::move(c)), hub(cfg), runtime(cfg, hub, std::move(episodes), [] { return std::string("T0"); }) {
    id = hub.connect(0.0).id;
  }

  double now() const { return static_cast<double>(runtime.loop().sim().tick) * cfg.sim.dt; }
  TickRecord tick() { return runtime.tick(now()); }
  std::vector<std::string> send(const std::string& text) { return hub.on_text(id, text, now()); }
  std::vector<std::string> send_json(const json& j) { return send(j.dump()); }

  AppConfig cfg;
  Hub hub;
  Runtime runtime;
  std::uint64_t id = 0;
};

}  // namespace

TEST_CASE("first session is authoritative, later ones observe") {
  Hub hub(quiet_config());
  const auto a = hub.connect(0.0);
  const auto b = hub.connect(0.0);
  CHECK(a.authoritative);
  CHECK(!b.authoritative);
  CHECK(json::parse(a.welcome).at("type") == "welcome");
  CHECK(hub.authoritative_session() == a.id);

  const auto replies = hub.on_text(b.id, R"({"type":"clutch","engaged":true})", 0.1);
  REQUIRE(replies.size() == 1);
  CHECK(json::parse(replies[0]).at("type") == "error");
  CHECK(hub.drain().events.empty());

  const auto cfg_reply = hub.on_text(b.id, R"({"type":"config_request"})", 0.1);
  REQUIRE(cfg_reply.size() == 1);
  CHECK(json::parse(cfg_reply[0]).at("type") == "config");

  hub.disconnect(a.id, 0.2);
  CHECK(hub.authoritative_session() == b.id);
  CHECK(hub.session_count() == 1);
}

TEST_CASE("malformed and out-of-order messages are dropped and counted") {
  Hub hub(quiet_config());
  const auto a = hub.connect(0.0);
  CHECK(json::parse(hub.on_text(a.id, "{oops", 0.0).at(0)).at("type") == "error");
  CHECK(hub.on_text(a.id, pose_text(5, 0, 0), 0.01).empty());
  CHECK(json::parse(hub.on_text(a.id, pose_text(4, 0, 0), 0.02).at(0)).at("type") == "error");
  CHECK(hub.protocol_errors() == 2);
  CHECK(hub.session(a.id)->protocol_errors == 2);
  // Session survives.
  CHECK(hub.on_text(a.id, pose_text(6, 0, 0), 0.03).empty());
}

TEST_CASE("hello is acknowledged") {
  Hub hub(quiet_config());
  const auto a = hub.connect(0.0);
  const auto r = hub.on_text(a.id, R"({"type":"hello","client_name":"t","protocol":1})", 0.0);
  REQUIRE(r.size() == 1);
  CHECK(json::parse(r[0]).at("type") == "hello_ack");
  CHECK(hub.on_text(a.id, R"({"type":"hello","protocol":9})", 0.0).size() == 2);
}

TEST_CASE("poses without clutch leave the target untouched") {
  Rig rig(quiet_config());
  const Pose2 before = rig.runtime.target();
  for (int i = 1; i <= 1000; ++i) {
    rig.send(pose_text(i * 20, 0.001 * i, -0.002 * i, 0.001 * i));
    rig.tick();
    REQUIRE(rig.runtime.target() == before);
  }
}

TEST_CASE("clutch drag of 0.1 m forward moves the target 0.1 m") {
  Rig rig(quiet_config());
  for (int i = 0; i < 10; ++i) rig.tick();
  const Pose2 start = rig.runtime.target();
  rig.send(pose_text(10, 0.3, 0.2, 0.5));
  rig.send_json({{"type", "clutch"}, {"engaged", true}});
  rig.tick();
  // 0.1 m along the phone's own forward axis (yaw 0.5).
  rig.send(pose_text(30, 0.3 + 0.1 * std::cos(0.5), 0.2 + 0.1 * std::sin(0.5), 0.5));
  rig.tick();
  const Pose2 t = rig.runtime.target();
  const Pose2 expected = compose(start, Pose2(0.1, 0, 0));
  CHECK(std::abs(t.x - expected.x) < 1e-12);
  CHECK(std::abs(t.y - expected.y) < 1e-12);
  CHECK(std::abs(t.theta - expected.theta) < 1e-12);
  CHECK(rig.runtime.clutch_engaged());
}

TEST_CASE("a pose gap while clutched stops the base within 0.1 s") {
  Rig rig(quiet_config());
  rig.send(pose_text(0, 0, 0));
  rig.send_json({{"type", "clutch"}, {"engaged", true}});
  // Drag forward 1 m over 1 s at 50 Hz so the base is moving.
  std::int64_t t_ms = 0;
  double last_msg = 0.0;
  for (int k = 0; k < 250; ++k) {
    if (k % 5 == 0) {
      t_ms += 20;
      rig.send(pose_text(t_ms, t_ms / 1000.0, 0));
      last_msg = rig.now();
    }
    rig.tick();
  }
  CHECK(rig.runtime.loop().last_command().linear_speed() > 0.5);

  // Silence: keep ticking until the watchdog fires, then time the decay.
  std::optional<double> tripped;
  std::optional<double> stopped;
  for (int k = 0; k < 200 && !stopped; ++k) {
    const TickRecord rec = rig.tick();
    if (!tripped && rec.state == ControlState::kHalt) tripped = rec.t - rig.cfg.sim.dt;
    if (tripped && rec.commanded.linear_speed() == 0.0 && rec.commanded.omega == 0.0) stopped = rec.t;
  }
  REQUIRE(tripped.has_value());
  REQUIRE(stopped.has_value());
  CHECK(*tripped - last_msg > 0.25);
  CHECK(*tripped - last_msg <= 0.25 + 2 * rig.cfg.sim.dt);
  CHECK(*stopped - *tripped <= 0.1 + 1e-9);
  CHECK(json::parse(rig.hub.telemetry_frame()).at("watchdog") == "tripped");

  // Resuming the stream re-captures the reference: no jump.
  const Pose2 held = rig.runtime.target();
  t_ms += 500;
  rig.send(pose_text(t_ms, 5.0, 5.0));
  rig.tick();
  const Pose2 after = rig.runtime.target();
  CHECK(std::hypot(after.x - held.x, after.y - held.y) < 0.01);
}

TEST_CASE("estop latches until released") {
  Rig rig(quiet_config());
  rig.send(pose_text(0, 0, 0));
  rig.send_json({{"type", "clutch"}, {"engaged", true}});
  rig.tick();
  rig.send(pose_text(20, 0.5, 0));
  rig.tick();
  rig.send_json({{"type", "estop"}});
  const TickRecord e = rig.tick();
  CHECK(e.state == ControlState::kEstop);
  CHECK(e.commanded == Twist2{});
  for (int k = 0; k < 50; ++k) {
    rig.send(pose_text(40 + 20 * k, 1.0 + 0.01 * k, 0));
    REQUIRE(rig.tick().commanded == Twist2{});
  }
  rig.send_json({{"type", "estop_release"}});
  const TickRecord r = rig.tick();
  CHECK(r.state == ControlState::kTrack);
  const Pose2 odom = rig.runtime.loop().odometry().pose;
  CHECK(std::hypot(rig.runtime.target().x - odom.x, rig.runtime.target().y - odom.y) < 1e-3);
}

TEST_CASE("disconnecting while clutched halts the base") {
  Rig rig(quiet_config());
  rig.send(pose_text(0, 0, 0));
  rig.send_json({{"type", "clutch"}, {"engaged", true}});
  rig.send(pose_text(20, 0.5, 0));
  for (int k = 0; k < 100; ++k) rig.tick();
  rig.hub.disconnect(rig.id, rig.now());
  CHECK(rig.tick().state == ControlState::kHalt);
  CHECK(!rig.runtime.clutch_engaged());
}

TEST_CASE("mode switch reaches the loop") {
  Rig rig(quiet_config());
  rig.send_json({{"type", "mode"}, {"drive_mode", "differential"}});
  CHECK(rig.tick().mode == DriveMode::kDifferential);
  CHECK(json::parse(rig.hub.telemetry_frame()).at("mode") == "differential");
}

TEST_CASE("recorded teleop episode replays within 1e-9") {
  const fs::path dir = fs::temp_directory_path() / ("pcvkit-rt-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  Rig rig(quiet_config(), dir);
  for (int k = 0; k < 20; ++k) rig.tick();
  rig.send_json({{"type", "episode"}, {"action", "start"}, {"name", "drag"}});
  rig.send(pose_text(0, 0, 0));
  rig.send_json({{"type", "clutch"}, {"engaged", true}});
  std::int64_t t_ms = 0;
  for (int k = 0; k < 500; ++k) {
    if (k % 6 == 0 && k < 400) {
      t_ms += 24;
      rig.send(pose_text(t_ms, 0.4 * std::sin(t_ms / 400.0), 0.2 * (t_ms / 1000.0), 0.3 * (t_ms / 1000.0)));
    }
    if (k == 200) rig.send_json({{"type", "mode"}, {"drive_mode", "differential"}});
    rig.tick();  // the gap after k = 400 trips the watchdog mid-episode
  }
  REQUIRE(rig.runtime.recorder() != nullptr);
  CHECK(json::parse(rig.hub.telemetry_frame()).at("episode").at("recording") == true);
  rig.send_json({{"type", "episode"}, {"action", "stop"}});
  rig.tick();
  CHECK(rig.runtime.recorder() == nullptr);

  const fs::path file = rig.runtime.last_episode();
  CHECK(file.filename() == "drag-T0.jsonl");
  const auto records = read_episode(file);
  CHECK(records.size() == 500);
  bool halted = false;
  for (const auto& r : records) halted |= r.state == ControlState::kHalt;
  CHECK(halted);
  const ReplayReport rep = replay_episode(file);
  CHECK(rep.ticks == 500);
  CHECK(rep.max_deviation < 1e-9);
  fs::remove_all(dir);
}
