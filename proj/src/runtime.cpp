#include "pcv/runtime.hpp"

namespace pcv::teleop {

Runtime::Runtime(AppConfig cfg, Hub& hub, std::filesystem::path episode_dir, Clock timestamp)
    : cfg_(std::move(cfg)),
      hub_(hub),
      episode_dir_(std::move(episode_dir)),
      timestamp_(std::move(timestamp)),
      loop_(cfg_.base, cfg_.sim, cfg_.limits, cfg_.gains) {
  target_ = loop_.odometry().pose;
}

void Runtime::apply(const LoopEvent& ev) {
  if (const auto* m = std::get_if<SetMode>(&ev)) {
    mode_ = m->mode;
  } else if (std::holds_alternative<EstopLatch>(ev)) {
    state_ = ControlState::kEstop;
  } else if (std::holds_alternative<EstopClear>(ev)) {
    if (state_ == ControlState::kEstop) {
      state_ = ControlState::kTrack;
      target_ = loop_.odometry().pose;
    }
  } else if (std::holds_alternative<StopAction>(ev)) {
    if (state_ != ControlState::kEstop) state_ = ControlState::kHalt;
  } else if (const auto* c = std::get_if<ClutchChanged>(&ev)) {
    clutch_ = c->engaged;
  } else if (const auto* start = std::get_if<StartEpisode>(&ev)) {
    if (recorder_) recorder_->close();
    recorder_ = std::make_unique<EpisodeRecorder>(episode_dir_, start->name, cfg_, loop_.snapshot(), timestamp_());
    last_episode_ = recorder_->jsonl_path();
  } else if (std::holds_alternative<StopEpisode>(ev)) {
    if (recorder_) recorder_->close();
    recorder_.reset();
  }
}

TickRecord Runtime::tick(double now) {
  hub_.poll_watchdog(now);
  Hub::Drained in = hub_.drain();
  for (const LoopEvent& ev : in.events) apply(ev);
  if (in.target && state_ != ControlState::kEstop) {
    target_ = *in.target;
    state_ = ControlState::kTrack;
  }
  if (state_ != ControlState::kTrack) target_ = loop_.odometry().pose;

  TickRecord rec = loop_.step({target_, mode_, state_});
  rec.clutch_engaged = clutch_;
  if (recorder_) recorder_->write(rec);

  Telemetry t;
  t.tick = rec.tick;
  t.t = rec.t;
  t.odom_pose = rec.odom_pose;
  t.truth_pose = rec.truth_pose;
  t.target_pose = state_ == ControlState::kTrack ? target_ : loop_.odometry().pose;
  t.commanded = rec.commanded;
  for (const CasterJointState& j : rec.joint_states) t.steer_angles.push_back(j.phi);
  t.mode = mode_;
  t.state = state_;
  t.clutch_engaged = clutch_;
  t.watchdog_tripped = state_ == ControlState::kHalt;
  t.fk_residual = rec.fk_residual;
  if (recorder_) t.episode = recorder_->name();
  hub_.publish(t);
  return rec;
}

void Runtime::shutdown() {
  if (recorder_) recorder_->close();
  recorder_.reset();
}

}  // namespace pcv::teleop
