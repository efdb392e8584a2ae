#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "pcv/config.hpp"
#include "pcv/control.hpp"
#include "pcv/se2.hpp"

namespace pcv::teleop {

inline constexpr int kProtocolVersion = 1;

// Operator -> service messages. On the wire each is a JSON object whose
// "type" field names the alternative.

struct Hello {
  std::string client_name;
  int protocol = kProtocolVersion;
};

/// Device pose in a z-up tracking frame; the device's forward axis is +x.
struct PoseMsg {
  std::int64_t t_ms = 0;
  std::array<double, 3> position{};
  std::array<double, 4> quaternion{1.0, 0.0, 0.0, 0.0};  // w, x, y, z
};

struct Clutch {
  bool engaged = false;
};

struct ModeMsg {
  DriveMode mode = DriveMode::kHolonomic;
};

struct Estop {};
struct EstopRelease {};

struct EpisodeMsg {
  enum class Action { kStart, kStop };
  Action action = Action::kStart;
  std::string name;
};

struct ConfigRequest {};

using Message = std::variant<Hello, PoseMsg, Clutch, ModeMsg, Estop, EstopRelease, EpisodeMsg, ConfigRequest>;

/// Throws ProtocolError on malformed JSON, unknown types, missing fields or a
/// quaternion whose norm is off by more than 1e-3. Quaternions are returned
/// renormalized.
Message parse_message(std::string_view text);
nlohmann::json to_json(const Message& msg);

/// Planar projection of a device pose: (x, y) from the horizontal position,
/// theta from the device forward axis. Throws DegenerateYaw when the forward
/// axis is within 1e-6 of vertical.
Pose2 pose_to_planar(const std::array<double, 3>& position, const std::array<double, 4>& quaternion);

struct SessionState {
  std::uint64_t session_id = 0;
  bool clutch_engaged = false;
  bool reference_valid = false;  // ref_phone/ref_target captured for this engagement
  Pose2 ref_phone;
  Pose2 ref_target;
  double gain = 1.0;
  MappingFrame frame = MappingFrame::kBody;
  DriveMode mode = DriveMode::kHolonomic;
  double last_msg_time = 0.0;  // s, service clock
  bool authoritative = false;
  bool watchdog_tripped = false;
  std::optional<std::int64_t> last_t_ms;
  std::optional<Pose2> last_phone;  // latest planar device pose
  std::uint64_t protocol_errors = 0;
};

/// Base target for the current device pose while clutched: the device's
/// displacement since clutch-down, scaled by `gain` in the log domain, applied
/// to the target captured at clutch-down.
Pose2 clutch_delta(const SessionState& s, const Pose2& phone_now);

struct SetTarget {
  Pose2 target;
};
struct SetMode {
  DriveMode mode;
};
struct EstopLatch {};
struct EstopClear {};
struct StartEpisode {
  std::string name;
};
struct StopEpisode {};
struct ClutchChanged {
  bool engaged;
};

using ControlAction =
    std::variant<SetTarget, SetMode, EstopLatch, EstopClear, StartEpisode, StopEpisode, ClutchChanged>;

struct HandleResult {
  SessionState state;
  std::optional<ControlAction> action;
};

/// Applies one message from the authoritative session. `current_target` is the
/// base target at the time of the message, captured as the reference when the
/// clutch engages. Throws ProtocolError for out-of-order t_ms; the caller keeps
/// the previous state in that case.
HandleResult handle_message(const SessionState& s, const Message& msg, double now, const Pose2& current_target);

struct StopAction {
  double tripped_at = 0.0;
};

struct WatchdogResult {
  SessionState state;
  std::optional<StopAction> stop;
};

/// Emits a stop once per silence longer than `timeout_s` while clutched. After
/// a stop the next pose re-captures the clutch reference.
WatchdogResult watchdog(const SessionState& s, double now, double timeout_s = 0.25);

}  // namespace pcv::teleop
