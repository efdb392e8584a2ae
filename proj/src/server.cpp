#include "pcv/server.hpp"

#include <chrono>
#include <deque>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "pcv/errors.hpp"
#include "pcv/runtime.hpp"

namespace pcv {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

namespace {

constexpr std::size_t kMaxQueuedFrames = 8;

constexpr const char* kPlaceholderPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>pcvkit</title></head>
<body>
<h1>pcvkit teleop service</h1>
<p>No operator UI bundle was found. The websocket endpoint is live on this port;
<a href="/api/telemetry">/api/telemetry</a> shows the latest snapshot.</p>
</body></html>
)";

std::string mime_type(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  if (ext == ".wasm") return "application/wasm";
  if (ext == ".map") return "application/json";
  return "application/octet-stream";
}

std::optional<std::string> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class WsSession;

}  // namespace

struct Server::Impl {
  Impl(AppConfig c, ServerOptions o)
      : cfg(std::move(c)),
        opt(std::move(o)),
        hub(cfg),
        runtime(cfg, hub, opt.episode_dir),
        start(std::chrono::steady_clock::now()),
        acceptor(io),
        telemetry_timer(io),
        signals(io) {}

  double now() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  void bind();
  void do_accept();
  void schedule_telemetry();
  void control_thread();
  void shutdown_network();

  AppConfig cfg;
  ServerOptions opt;
  teleop::Hub hub;
  teleop::Runtime runtime;
  std::chrono::steady_clock::time_point start;

  // Declared after the hub so pending sessions are destroyed first.
  asio::io_context io;
  tcp::acceptor acceptor;
  asio::steady_timer telemetry_timer;
  asio::signal_set signals;
  std::vector<std::weak_ptr<WsSession>> sessions;  // network thread only
  std::atomic<bool> running{false};
  std::atomic<bool> stopping{false};
  std::uint16_t bound_port = 0;
};

namespace {

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, Server::Impl& srv) : ws_(std::move(socket)), srv_(srv) {}

  ~WsSession() {
    if (id_ != 0) srv_.hub.disconnect(id_, srv_.now());
  }

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.text(true);
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

  /// Telemetry is dropped for clients that fall behind; replies are not.
  void send(std::shared_ptr<const std::string> frame, bool droppable) {
    if (closed_) return;
    if (droppable && queue_.size() > kMaxQueuedFrames) return;
    queue_.push_back(std::move(frame));
    if (queue_.size() == 1) write_next();
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().shutdown(tcp::socket::shutdown_both, ec);
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    const teleop::Hub::Connection c = srv_.hub.connect(srv_.now());
    id_ = c.id;
    send(std::make_shared<const std::string>(c.welcome), false);
    do_read();
  }

  void do_read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      closed_ = true;
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    for (std::string& reply : srv_.hub.on_text(id_, text, srv_.now())) {
      send(std::make_shared<const std::string>(std::move(reply)), false);
    }
    do_read();
  }

  void write_next() {
    ws_.async_write(asio::buffer(*queue_.front()),
                    beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      closed_ = true;
      queue_.clear();
      return;
    }
    queue_.pop_front();
    if (!queue_.empty()) write_next();
  }

  websocket::stream<beast::tcp_stream> ws_;
  Server::Impl& srv_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> queue_;
  std::uint64_t id_ = 0;
  bool closed_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, Server::Impl& srv) : stream_(std::move(socket)), srv_(srv) {}

  void run() { do_read(); }

 private:
  void do_read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return;
    if (websocket::is_upgrade(req_)) {
      stream_.expires_never();
      auto ws = std::make_shared<WsSession>(stream_.release_socket(), srv_);
      srv_.sessions.push_back(ws);
      ws->run(std::move(req_));
      return;
    }
    respond();
  }

  void respond() {
    auto res = std::make_shared<http::response<http::string_body>>(handle());
    res->version(req_.version());
    res->keep_alive(req_.keep_alive());
    res->set(http::field::server, "pcvkit");
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (!res->keep_alive()) {
        beast::error_code ignored;
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        return;
      }
      self->do_read();
    });
  }

  http::response<http::string_body> reply(http::status status, std::string body, const std::string& type) {
    http::response<http::string_body> res{status, req_.version()};
    res.set(http::field::content_type, type);
    res.set(http::field::cache_control, "no-store");
    res.body() = std::move(body);
    return res;
  }

  http::response<http::string_body> handle() {
    if (req_.method() != http::verb::get && req_.method() != http::verb::head) {
      return reply(http::status::method_not_allowed, "method not allowed\n", "text/plain");
    }
    std::string target(req_.target());
    if (const auto q = target.find('?'); q != std::string::npos) target.resize(q);

    if (target == "/api/telemetry") {
      std::string frame = srv_.hub.telemetry_frame();
      return reply(http::status::ok, frame.empty() ? "{}" : std::move(frame), "application/json");
    }
    if (target == "/api/config") {
      return reply(http::status::ok, to_json(srv_.cfg).dump(2), "application/json");
    }

    if (target.empty() || target.front() != '/' || target.find("..") != std::string::npos) {
      return reply(http::status::bad_request, "bad path\n", "text/plain");
    }
    if (target.back() == '/') target += "index.html";
    const std::filesystem::path file = srv_.opt.ui_dir / target.substr(1);
    if (auto body = read_file(file)) return reply(http::status::ok, std::move(*body), mime_type(file));
    if (target == "/index.html") return reply(http::status::ok, kPlaceholderPage, "text/html; charset=utf-8");
    return reply(http::status::not_found, "not found\n", "text/plain");
  }

  beast::tcp_stream stream_;
  Server::Impl& srv_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

}  // namespace

void Server::Impl::bind() {
  beast::error_code ec;
  const tcp::endpoint ep(asio::ip::make_address(opt.address), opt.port);
  acceptor.open(ep.protocol(), ec);
  if (!ec) acceptor.set_option(asio::socket_base::reuse_address(true), ec);
  if (!ec) acceptor.bind(ep, ec);
  if (ec == asio::error::address_in_use || ec == asio::error::access_denied) throw PortInUse(opt.port);
  if (!ec) acceptor.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) throw Error("cannot listen on " + opt.address + ":" + std::to_string(opt.port) + ": " + ec.message());
  bound_port = acceptor.local_endpoint().port();
}

void Server::Impl::do_accept() {
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    std::make_shared<HttpSession>(std::move(socket), *this)->run();
    do_accept();
  });
}

void Server::Impl::schedule_telemetry() {
  telemetry_timer.expires_after(std::chrono::duration_cast<asio::steady_timer::duration>(
      std::chrono::duration<double>(opt.telemetry_period_s)));
  telemetry_timer.async_wait([this](beast::error_code ec) {
    if (ec) return;
    std::string frame = hub.telemetry_frame();
    if (!frame.empty()) {
      auto shared = std::make_shared<const std::string>(std::move(frame));
      std::erase_if(sessions, [](const std::weak_ptr<WsSession>& w) { return w.expired(); });
      for (const auto& w : sessions) {
        if (auto s = w.lock()) s->send(shared, true);
      }
    }
    schedule_telemetry();
  });
}

void Server::Impl::control_thread() {
  using clock = std::chrono::steady_clock;
  const auto period = std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(cfg.sim.dt));
  auto next = clock::now();
  while (!stopping.load()) {
    try {
      runtime.tick(now());
    } catch (const std::exception& e) {
      std::cerr << "control tick failed: " << e.what() << '\n';
    }
    next += period;
    const auto t = clock::now();
    if (next < t - 10 * period) next = t;  // fell far behind; do not burst
    std::this_thread::sleep_until(next);
  }
}

void Server::Impl::shutdown_network() {
  beast::error_code ec;
  acceptor.close(ec);
  telemetry_timer.cancel();
  signals.cancel(ec);
  for (const auto& w : sessions) {
    if (auto s = w.lock()) s->close();
  }
  io.stop();
}

Server::Server(AppConfig cfg, ServerOptions opt) : impl_(std::make_unique<Impl>(std::move(cfg), std::move(opt))) {
  impl_->bind();
}

Server::~Server() { stop(); }

std::uint16_t Server::port() const noexcept { return impl_->bound_port; }

teleop::Hub& Server::hub() noexcept { return impl_->hub; }

double Server::now() const { return impl_->now(); }

void Server::run() {
  Impl& s = *impl_;
  if (s.stopping.load()) return;
  s.running = true;
  if (s.opt.handle_signals) {
    s.signals.add(SIGINT);
    s.signals.add(SIGTERM);
    s.signals.async_wait([this](beast::error_code ec, int) {
      if (!ec) stop();
    });
  }
  s.do_accept();
  s.schedule_telemetry();
  std::thread control([&s] { s.control_thread(); });
  s.io.run();
  s.stopping = true;
  control.join();
  s.runtime.shutdown();
  s.running = false;
}

void Server::stop() {
  Impl& s = *impl_;
  if (s.stopping.exchange(true)) return;
  asio::post(s.io, [&s] { s.shutdown_network(); });
  // Before run() the io_context has no worker; stop it directly.
  if (!s.running.load()) s.io.stop();
}

}  // namespace pcv
