#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "pcv/config.hpp"
#include "pcv/hub.hpp"

namespace pcv {

struct ServerOptions {
  std::string address = "0.0.0.0";
  std::uint16_t port = 8765;           // 0 picks a free port
  std::filesystem::path ui_dir;        // static bundle; a placeholder page is served when absent
  std::filesystem::path episode_dir;
  bool handle_signals = true;          // stop on SIGINT / SIGTERM
  double telemetry_period_s = 0.05;
};

/// HTTP + websocket front end for the teleoperated sim. One network thread
/// serves the UI bundle, `/api/*` and the websocket protocol; a control thread
/// ticks the loop at the sim dt.
class Server {
 public:
  /// Binds immediately. Throws PortInUse.
  Server(AppConfig cfg, ServerOptions opt);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const noexcept;

  /// Blocks until stop() or a signal; open episodes are closed before return.
  void run();
  /// Thread-safe.
  void stop();

  teleop::Hub& hub() noexcept;
  /// Seconds on the service clock.
  double now() const;

  struct Impl;  // defined in server.cpp

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace pcv
