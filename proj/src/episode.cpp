#include "pcv/episode.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>

#include "pcv/errors.hpp"
#include "pcv/json_io.hpp"

namespace pcv {

using nlohmann::json;

EpisodeRecorder::EpisodeRecorder(const std::filesystem::path& dir, std::string_view name, const AppConfig& cfg,
                                 const LoopSnapshot& initial, std::string_view timestamp)
    : name_(sanitize_episode_name(name)) {
  std::filesystem::create_directories(dir);
  const std::string stem = name_ + "-" + std::string(timestamp);
  jsonl_path_ = dir / (stem + ".jsonl");
  meta_path_ = dir / (stem + ".meta.json");
  // Never clobber an earlier episode recorded within the same second.
  for (int n = 1; std::filesystem::exists(jsonl_path_); ++n) {
    jsonl_path_ = dir / (stem + "-" + std::to_string(n) + ".jsonl");
    meta_path_ = dir / (stem + "-" + std::to_string(n) + ".meta.json");
  }

  file_ = std::fopen(jsonl_path_.c_str(), "wb");
  if (file_ == nullptr) throw Error("cannot open episode file '" + jsonl_path_.string() + "'");

  meta_ = json{{"format", "pcvkit-episode"},
               {"version", 1},
               {"name", name_},
               {"started_utc", std::string(timestamp)},
               {"config", to_json(cfg)},
               {"initial_state", initial}};
  write_meta(false);
}

EpisodeRecorder::~EpisodeRecorder() { close(); }

void EpisodeRecorder::write(const TickRecord& rec) {
  if (file_ == nullptr) return;
  std::string line = json(rec).dump();
  line.push_back('\n');
  std::fwrite(line.data(), 1, line.size(), file_);
  std::fflush(file_);
  ++ticks_;
}

void EpisodeRecorder::close() {
  if (file_ == nullptr) return;
  std::fflush(file_);
  std::fclose(file_);
  file_ = nullptr;
  write_meta(true);
}

void EpisodeRecorder::write_meta(bool closed) {
  meta_["ticks"] = ticks_;
  meta_["closed"] = closed;
  std::ofstream out(meta_path_, std::ios::trunc);
  out << meta_.dump(2) << '\n';
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

std::string sanitize_episode_name(std::string_view name) {
  std::string out;
  for (char c : name) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  if (out.empty() || out.find_first_not_of('.') == std::string::npos) out = "episode";
  return out;
}

std::filesystem::path episode_meta_path(const std::filesystem::path& jsonl) {
  std::filesystem::path meta = jsonl;
  meta.replace_extension(".meta.json");
  return meta;
}

std::vector<TickRecord> read_episode(const std::filesystem::path& jsonl) {
  std::ifstream in(jsonl, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open '" + jsonl.string() + "'");

  std::vector<TickRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const bool terminated = !in.eof();
    if (line.empty() && !terminated) break;
    if (!terminated) throw ParseError(line_no, "truncated line (no trailing newline)");
    TickRecord rec;
    try {
      rec = json::parse(line).get<TickRecord>();
    } catch (const std::exception& e) {
      throw ParseError(line_no, e.what());
    }
    if (!records.empty() && rec.tick != records.back().tick + 1) {
      throw ParseError(line_no, "tick " + std::to_string(rec.tick) + " does not follow " +
                                    std::to_string(records.back().tick));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

ReplayReport replay_episode(const std::filesystem::path& jsonl, const std::optional<AppConfig>& fallback) {
  const std::vector<TickRecord> records = read_episode(jsonl);

  ReplayReport report;
  AppConfig cfg = fallback.value_or(AppConfig{});
  std::optional<LoopSnapshot> initial;
  const std::filesystem::path meta_path = episode_meta_path(jsonl);
  if (std::filesystem::exists(meta_path)) {
    std::ifstream in(meta_path);
    json meta;
    try {
      meta = json::parse(in);
      cfg = config_from_json(meta.at("config"));
      initial = meta.at("initial_state").get<LoopSnapshot>();
    } catch (const json::exception& e) {
      throw ParseError(0, "sidecar '" + meta_path.string() + "': " + e.what());
    }
    report.meta_found = true;
  }

  SimConfig sim = SimConfig::noise_free();
  sim.dt = cfg.sim.dt;
  ControlLoop loop = initial ? ControlLoop(cfg.base, sim, cfg.limits, cfg.gains, *initial)
                             : ControlLoop(cfg.base, sim, cfg.limits, cfg.gains);

  for (const TickRecord& rec : records) {
    const TickRecord out = loop.step({rec.target_pose, rec.mode, rec.state});
    const double dp = std::hypot(out.truth_pose.x - rec.truth_pose.x, out.truth_pose.y - rec.truth_pose.y);
    const double dh = std::abs(wrap_angle(out.truth_pose.theta - rec.truth_pose.theta));
    report.max_position_deviation = std::max(report.max_position_deviation, dp);
    report.max_heading_deviation = std::max(report.max_heading_deviation, dh);
  }
  report.ticks = records.size();
  report.max_deviation = std::max(report.max_position_deviation, report.max_heading_deviation);
  return report;
}

json to_json(const ReplayReport& r) {
  return json{{"command", "replay"},
              {"ticks", r.ticks},
              {"max_position_deviation_m", r.max_position_deviation},
              {"max_heading_deviation_rad", r.max_heading_deviation},
              {"max_deviation", r.max_deviation},
              {"meta_found", r.meta_found}};
}

}  // namespace pcv
