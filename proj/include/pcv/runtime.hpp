#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>

#include "pcv/config.hpp"
#include "pcv/control_loop.hpp"
#include "pcv/episode.hpp"
#include "pcv/hub.hpp"

namespace pcv::teleop {

/// The teleoperated control loop: drains the hub once per tick, applies mode,
/// stop and episode events, steps the closed loop and publishes telemetry.
/// Not thread-safe itself; only the control thread calls tick().
class Runtime {
 public:
  using Clock = std::function<std::string()>;

  Runtime(AppConfig cfg, Hub& hub, std::filesystem::path episode_dir, Clock timestamp = utc_timestamp);

  /// One control tick at service time `now` (seconds).
  TickRecord tick(double now);

  /// Closes any open episode.
  void shutdown();

  const ControlLoop& loop() const noexcept { return loop_; }
  ControlState state() const noexcept { return state_; }
  DriveMode mode() const noexcept { return mode_; }
  const Pose2& target() const noexcept { return target_; }
  bool clutch_engaged() const noexcept { return clutch_; }
  const EpisodeRecorder* recorder() const noexcept { return recorder_.get(); }
  /// Path of the most recently finished (or current) episode file.
  const std::filesystem::path& last_episode() const noexcept { return last_episode_; }

 private:
  void apply(const LoopEvent& ev);

  AppConfig cfg_;
  Hub& hub_;
  std::filesystem::path episode_dir_;
  Clock timestamp_;
  ControlLoop loop_;
  ControlState state_ = ControlState::kTrack;
  DriveMode mode_ = DriveMode::kHolonomic;
  Pose2 target_;
  bool clutch_ = false;
  std::unique_ptr<EpisodeRecorder> recorder_;
  std::filesystem::path last_episode_;
};

}  // namespace pcv::teleop
