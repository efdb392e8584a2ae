#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pcv/config.hpp"
#include "pcv/control_loop.hpp"

namespace pcv {

/// Demonstration log: one JSON object per control tick in
/// `<dir>/<name>-<timestamp>.jsonl`, plus a `.meta.json` sidecar holding the
/// config and the loop state just before the first recorded tick.
///
/// Every line is handed to the OS in a single flushed write, so an interrupted
/// process leaves only complete lines behind.
class EpisodeRecorder {
 public:
  EpisodeRecorder(const std::filesystem::path& dir, std::string_view name, const AppConfig& cfg,
                  const LoopSnapshot& initial, std::string_view timestamp);
  ~EpisodeRecorder();

  EpisodeRecorder(const EpisodeRecorder&) = delete;
  EpisodeRecorder& operator=(const EpisodeRecorder&) = delete;

  void write(const TickRecord& rec);
  /// Finalizes the sidecar. Idempotent.
  void close();

  const std::filesystem::path& jsonl_path() const noexcept { return jsonl_path_; }
  const std::filesystem::path& meta_path() const noexcept { return meta_path_; }
  const std::string& name() const noexcept { return name_; }
  std::uint64_t ticks() const noexcept { return ticks_; }

 private:
  void write_meta(bool closed);

  std::string name_;
  std::filesystem::path jsonl_path_;
  std::filesystem::path meta_path_;
  nlohmann::json meta_;
  std::FILE* file_ = nullptr;
  std::uint64_t ticks_ = 0;
};

/// Compact UTC timestamp, e.g. 20261015T214455Z.
std::string utc_timestamp();

/// Keeps [A-Za-z0-9._-]; everything else becomes '_'. Empty names become "episode".
std::string sanitize_episode_name(std::string_view name);

/// Sidecar path for an episode file (`x.jsonl` -> `x.meta.json`).
std::filesystem::path episode_meta_path(const std::filesystem::path& jsonl);

/// Parses an episode file. Throws ParseError naming the 1-based line on
/// malformed or truncated lines and on non-consecutive ticks.
std::vector<TickRecord> read_episode(const std::filesystem::path& jsonl);

struct ReplayReport {
  std::size_t ticks = 0;
  double max_position_deviation = 0.0;  // m
  double max_heading_deviation = 0.0;   // rad
  double max_deviation = 0.0;           // max of the two
  bool meta_found = false;
};

/// Re-executes the recorded targets, modes and control states through a fresh
/// noise-free simulator started from the sidecar state and compares against
/// the recorded truth poses. Without a sidecar the run starts from the
/// identity with `fallback` (or the default config).
ReplayReport replay_episode(const std::filesystem::path& jsonl, const std::optional<AppConfig>& fallback = {});

nlohmann::json to_json(const ReplayReport& r);

}  // namespace pcv
