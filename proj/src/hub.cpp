#include "pcv/hub.hpp"

#include "pcv/errors.hpp"
#include "pcv/json_io.hpp"

namespace pcv::teleop {

using nlohmann::json;

namespace {

std::string error_frame(const std::string& what) { return json{{"type", "error"}, {"message", what}}.dump(); }

}  // namespace

json to_json(const Telemetry& t) {
  return json{{"type", "telemetry"},
              {"tick", t.tick},
              {"t", t.t},
              {"odom_pose", t.odom_pose},
              {"truth_pose", t.truth_pose},
              {"target_pose", t.target_pose},
              {"commanded_twist", t.commanded},
              {"speed", t.commanded.linear_speed()},
              {"steer_angles", t.steer_angles},
              {"mode", to_string(t.mode)},
              {"control_state", to_string(t.state)},
              {"estop", t.state == ControlState::kEstop},
              {"clutch", t.clutch_engaged},
              {"watchdog", t.watchdog_tripped ? "tripped" : "ok"},
              {"fk_residual", t.fk_residual},
              {"episode", {{"recording", t.episode.has_value()}, {"name", t.episode.value_or("")}}}};
}

Hub::Hub(const AppConfig& cfg)
    : config_json_(json{{"type", "config"}, {"config", to_json(cfg)}}.dump()),
      gain_(cfg.teleop.gain),
      frame_(cfg.teleop.frame),
      watchdog_s_(cfg.teleop.watchdog_ms / 1000.0) {}

Hub::Connection Hub::connect(double now) {
  std::lock_guard lock(mu_);
  SessionState s;
  s.session_id = next_id_++;
  s.gain = gain_;
  s.frame = frame_;
  s.last_msg_time = now;
  s.authoritative = !authority_locked().has_value();
  if (telemetry_) s.mode = telemetry_->mode;
  sessions_.emplace(s.session_id, s);

  Connection c;
  c.id = s.session_id;
  c.authoritative = s.authoritative;
  c.welcome = json{{"type", "welcome"},
                   {"protocol", kProtocolVersion},
                   {"session_id", c.id},
                   {"authoritative", c.authoritative},
                   {"watchdog_ms", static_cast<int>(watchdog_s_ * 1000.0 + 0.5)}}
                  .dump();
  return c;
}

void Hub::disconnect(std::uint64_t id, double now) {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) return;
  const bool was_authority = it->second.authoritative;
  const bool was_clutched = it->second.clutch_engaged;
  sessions_.erase(it);
  if (!was_authority) return;
  if (was_clutched) {
    events_.emplace_back(ClutchChanged{false});
    events_.emplace_back(StopAction{now});
  }
  if (!sessions_.empty()) sessions_.begin()->second.authoritative = true;
}

std::vector<std::string> Hub::on_text(std::uint64_t id, std::string_view text, double now) {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) return {};
  SessionState& s = it->second;

  Message msg;
  try {
    msg = parse_message(text);
  } catch (const ProtocolError& e) {
    ++protocol_errors_;
    ++s.protocol_errors;
    return {error_frame(e.what())};
  }

  if (const auto* hello = std::get_if<Hello>(&msg)) {
    std::vector<std::string> replies{json{{"type", "hello_ack"},
                                          {"protocol", kProtocolVersion},
                                          {"session_id", id},
                                          {"authoritative", s.authoritative}}
                                         .dump()};
    if (hello->protocol != kProtocolVersion) {
      replies.push_back(error_frame("protocol " + std::to_string(hello->protocol) + " not supported; speaking " +
                                    std::to_string(kProtocolVersion)));
    }
    if (s.authoritative) s.last_msg_time = now;
    return replies;
  }
  if (std::holds_alternative<ConfigRequest>(msg)) return {config_json_};
  if (!s.authoritative) return {error_frame("observer session is read-only")};

  // A late message must not sneak past an expired dead-man timer.
  WatchdogResult wd = watchdog(s, now, watchdog_s_);
  s = wd.state;
  if (wd.stop) events_.emplace_back(*wd.stop);

  try {
    HandleResult r = handle_message(s, msg, now, current_target_);
    s = r.state;
    if (r.action) apply_action_locked(*r.action);
  } catch (const ProtocolError& e) {
    ++protocol_errors_;
    ++s.protocol_errors;
    return {error_frame(e.what())};
  }
  return {};
}

void Hub::apply_action_locked(const ControlAction& action) {
  if (const auto* set = std::get_if<SetTarget>(&action)) {
    pending_target_ = set->target;
    current_target_ = set->target;
    return;
  }
  std::visit(
      [this](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (!std::is_same_v<T, SetTarget>) events_.emplace_back(a);
      },
      action);
}

void Hub::poll_watchdog(double now) {
  std::lock_guard lock(mu_);
  const auto auth = authority_locked();
  if (!auth) return;
  SessionState& s = sessions_.at(*auth);
  WatchdogResult wd = watchdog(s, now, watchdog_s_);
  s = wd.state;
  if (wd.stop) events_.emplace_back(*wd.stop);
}

Hub::Drained Hub::drain() {
  std::lock_guard lock(mu_);
  Drained d;
  d.target = std::exchange(pending_target_, std::nullopt);
  d.events = std::exchange(events_, {});
  return d;
}

void Hub::publish(const Telemetry& t) {
  std::lock_guard lock(mu_);
  telemetry_ = t;
  if (!pending_target_) current_target_ = t.target_pose;
}

std::optional<Telemetry> Hub::latest_telemetry() const {
  std::lock_guard lock(mu_);
  return telemetry_;
}

std::string Hub::telemetry_frame() const {
  std::lock_guard lock(mu_);
  if (!telemetry_) return {};
  json j = to_json(*telemetry_);
  const auto auth = authority_locked();
  j["authoritative_session"] = auth ? json(*auth) : json(nullptr);
  j["sessions"] = sessions_.size();
  j["protocol_errors"] = protocol_errors_;
  return j.dump();
}

std::optional<SessionState> Hub::session(std::uint64_t id) const {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint64_t> Hub::authoritative_session() const {
  std::lock_guard lock(mu_);
  return authority_locked();
}

std::uint64_t Hub::protocol_errors() const {
  std::lock_guard lock(mu_);
  return protocol_errors_;
}

std::size_t Hub::session_count() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

std::optional<std::uint64_t> Hub::authority_locked() const {
  for (const auto& [id, s] : sessions_) {
    if (s.authoritative) return id;
  }
  return std::nullopt;
}

}  // namespace pcv::teleop
