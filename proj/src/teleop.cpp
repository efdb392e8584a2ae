#include "pcv/teleop.hpp"

#include <cmath>

#include "pcv/errors.hpp"
#include "pcv/json_io.hpp"

namespace pcv::teleop {

using nlohmann::json;

namespace {

constexpr double kQuaternionNormTolerance = 1e-3;
constexpr double kVerticalAxisTolerance = 1e-6;

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw ProtocolError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ProtocolError(std::string("field '") + key + "' has the wrong type");
  }
}

std::array<double, 4> normalized_quaternion(std::array<double, 4> q) {
  const double norm = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > kQuaternionNormTolerance) {
    throw ProtocolError("quaternion norm " + std::to_string(norm) + " is not within 1e-3 of 1");
  }
  for (double& c : q) c /= norm;
  return q;
}

}  // namespace

Message parse_message(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ProtocolError("message must be a JSON object");
  const auto type = field<std::string>(j, "type");

  if (type == "hello") {
    Hello h;
    h.client_name = j.value("client_name", std::string{});
    h.protocol = j.value("protocol", kProtocolVersion);
    return h;
  }
  if (type == "pose") {
    PoseMsg p;
    p.t_ms = field<std::int64_t>(j, "t_ms");
    p.position = field<std::array<double, 3>>(j, "position");
    for (double c : p.position) {
      if (!std::isfinite(c)) throw ProtocolError("non-finite position");
    }
    p.quaternion = normalized_quaternion(field<std::array<double, 4>>(j, "quaternion"));
    return p;
  }
  if (type == "clutch") return Clutch{field<bool>(j, "engaged")};
  if (type == "mode") {
    try {
      return ModeMsg{drive_mode_from_string(field<std::string>(j, "drive_mode"))};
    } catch (const ConfigInvalid& e) {
      throw ProtocolError(e.what());
    }
  }
  if (type == "estop") return Estop{};
  if (type == "estop_release") return EstopRelease{};
  if (type == "episode") {
    EpisodeMsg e;
    const auto action = field<std::string>(j, "action");
    if (action == "start") {
      e.action = EpisodeMsg::Action::kStart;
    } else if (action == "stop") {
      e.action = EpisodeMsg::Action::kStop;
    } else {
      throw ProtocolError("episode action must be 'start' or 'stop'");
    }
    e.name = j.value("name", std::string("episode"));
    return e;
  }
  if (type == "config_request") return ConfigRequest{};
  throw ProtocolError("unknown message type '" + type + "'");
}

json to_json(const Message& msg) {
  struct Visitor {
    json operator()(const Hello& h) const {
      return {{"type", "hello"}, {"client_name", h.client_name}, {"protocol", h.protocol}};
    }
    json operator()(const PoseMsg& p) const {
      return {{"type", "pose"}, {"t_ms", p.t_ms}, {"position", p.position}, {"quaternion", p.quaternion}};
    }
    json operator()(const Clutch& c) const { return {{"type", "clutch"}, {"engaged", c.engaged}}; }
    json operator()(const ModeMsg& m) const { return {{"type", "mode"}, {"drive_mode", to_string(m.mode)}}; }
    json operator()(const Estop&) const { return {{"type", "estop"}}; }
    json operator()(const EstopRelease&) const { return {{"type", "estop_release"}}; }
    json operator()(const EpisodeMsg& e) const {
      return {{"type", "episode"},
              {"action", e.action == EpisodeMsg::Action::kStart ? "start" : "stop"},
              {"name", e.name}};
    }
    json operator()(const ConfigRequest&) const { return {{"type", "config_request"}}; }
  };
  return std::visit(Visitor{}, msg);
}

Pose2 pose_to_planar(const std::array<double, 3>& position, const std::array<double, 4>& quaternion) {
  const auto [w, x, y, z] = quaternion;
  // First column of the rotation matrix: the device forward axis.
  const double fx = 1.0 - 2.0 * (y * y + z * z);
  const double fy = 2.0 * (x * y + w * z);
  if (std::hypot(fx, fy) < kVerticalAxisTolerance) throw DegenerateYaw();
  return {position[0], position[1], std::atan2(fy, fx)};
}

Pose2 clutch_delta(const SessionState& s, const Pose2& phone_now) {
  if (s.frame == MappingFrame::kWorld) {
    return {s.ref_target.x + s.gain * (phone_now.x - s.ref_phone.x),
            s.ref_target.y + s.gain * (phone_now.y - s.ref_phone.y),
            s.ref_target.theta + s.gain * wrap_angle(phone_now.theta - s.ref_phone.theta)};
  }
  const Pose2 rel = compose(inverse(s.ref_phone), phone_now);
  if (s.gain == 1.0) return compose(s.ref_target, rel);
  const Twist2 xi = log(rel);
  return compose(s.ref_target, exp(Twist2{s.gain * xi.vx, s.gain * xi.vy, s.gain * xi.omega}, 1.0));
}

HandleResult handle_message(const SessionState& s, const Message& msg, double now, const Pose2& current_target) {
  HandleResult out{s, std::nullopt};
  SessionState& st = out.state;

  const auto capture = [&](const Pose2& phone) {
    st.ref_phone = phone;
    st.ref_target = current_target;
    st.reference_valid = true;
  };

  if (const auto* pose = std::get_if<PoseMsg>(&msg)) {
    if (s.last_t_ms && pose->t_ms <= *s.last_t_ms) {
      throw ProtocolError("out-of-order t_ms " + std::to_string(pose->t_ms) + " after " +
                          std::to_string(*s.last_t_ms));
    }
    Pose2 planar;
    try {
      planar = pose_to_planar(pose->position, pose->quaternion);
    } catch (const DegenerateYaw&) {
      planar = Pose2{pose->position[0], pose->position[1], s.last_phone ? s.last_phone->theta : 0.0};
    }
    st.last_t_ms = pose->t_ms;
    st.last_phone = planar;
    if (st.clutch_engaged) {
      if (!st.reference_valid) {
        capture(planar);
      } else {
        out.action = SetTarget{clutch_delta(st, planar)};
      }
    }
  } else if (const auto* clutch = std::get_if<Clutch>(&msg)) {
    if (clutch->engaged && !s.clutch_engaged) {
      st.clutch_engaged = true;
      st.reference_valid = false;
      if (st.last_phone) capture(*st.last_phone);
      out.action = ClutchChanged{true};
    } else if (!clutch->engaged && s.clutch_engaged) {
      st.clutch_engaged = false;
      st.reference_valid = false;
      out.action = ClutchChanged{false};
    }
  } else if (const auto* mode = std::get_if<ModeMsg>(&msg)) {
    st.mode = mode->mode;
    out.action = SetMode{mode->mode};
  } else if (std::holds_alternative<Estop>(msg)) {
    st.reference_valid = false;
    out.action = EstopLatch{};
  } else if (std::holds_alternative<EstopRelease>(msg)) {
    st.reference_valid = false;
    out.action = EstopClear{};
  } else if (const auto* episode = std::get_if<EpisodeMsg>(&msg)) {
    if (episode->action == EpisodeMsg::Action::kStart) {
      out.action = StartEpisode{episode->name};
    } else {
      out.action = StopEpisode{};
    }
  }

  st.last_msg_time = now;
  st.watchdog_tripped = false;
  return out;
}

WatchdogResult watchdog(const SessionState& s, double now, double timeout_s) {
  WatchdogResult out{s, std::nullopt};
  if (s.clutch_engaged && !s.watchdog_tripped && now - s.last_msg_time > timeout_s) {
    out.state.watchdog_tripped = true;
    out.state.reference_valid = false;
    out.stop = StopAction{now};
  }
  return out;
}

}  // namespace pcv::teleop
