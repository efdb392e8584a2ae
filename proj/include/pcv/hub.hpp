#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "pcv/config.hpp"
#include "pcv/control_loop.hpp"
#include "pcv/teleop.hpp"

namespace pcv::teleop {

/// Events the control loop drains once per tick, in arrival order.
using LoopEvent = std::variant<SetMode, EstopLatch, EstopClear, StartEpisode, StopEpisode, ClutchChanged, StopAction>;

/// Snapshot published by the control loop after every tick.
struct Telemetry {
  std::uint64_t tick = 0;
  double t = 0.0;
  Pose2 odom_pose;
  Pose2 truth_pose;
  Pose2 target_pose;
  Twist2 commanded;
  std::vector<double> steer_angles;
  DriveMode mode = DriveMode::kHolonomic;
  ControlState state = ControlState::kTrack;
  bool clutch_engaged = false;
  bool watchdog_tripped = false;
  double fk_residual = 0.0;
  std::optional<std::string> episode;  // name of the episode being recorded
};

nlohmann::json to_json(const Telemetry& t);

/// Session registry and the only state shared between the network side and the
/// control loop: a latest-wins operator target plus an ordered event queue.
/// All members are safe to call from any thread.
class Hub {
 public:
  explicit Hub(const AppConfig& cfg);

  struct Connection {
    std::uint64_t id = 0;
    bool authoritative = false;
    std::string welcome;  // JSON greeting for the client
  };

  /// The first live session is authoritative; later ones observe until it leaves.
  Connection connect(double now);
  void disconnect(std::uint64_t id, double now);

  /// Handles one text frame and returns the replies for that session.
  /// Malformed or out-of-order messages are dropped and counted.
  std::vector<std::string> on_text(std::uint64_t id, std::string_view text, double now);

  /// Runs the dead-man check for the authoritative session.
  void poll_watchdog(double now);

  struct Drained {
    std::optional<Pose2> target;
    std::vector<LoopEvent> events;
  };
  Drained drain();

  void publish(const Telemetry& t);
  std::optional<Telemetry> latest_telemetry() const;
  /// Latest telemetry as a JSON text frame, or empty before the first tick.
  std::string telemetry_frame() const;

  std::optional<SessionState> session(std::uint64_t id) const;
  std::optional<std::uint64_t> authoritative_session() const;
  std::uint64_t protocol_errors() const;
  std::size_t session_count() const;

 private:
  std::optional<std::uint64_t> authority_locked() const;
  void apply_action_locked(const ControlAction& action);

  mutable std::mutex mu_;
  std::string config_json_;
  double gain_;
  MappingFrame frame_;
  double watchdog_s_;
  std::map<std::uint64_t, SessionState> sessions_;
  std::uint64_t next_id_ = 1;
  std::uint64_t protocol_errors_ = 0;

  std::optional<Pose2> pending_target_;
  Pose2 current_target_;
  std::vector<LoopEvent> events_;
  std::optional<Telemetry> telemetry_;
};

}  // namespace pcv::teleop
