#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <nlohmann/json.hpp>

#include "pcv/caster_kinematics.hpp"
#include "pcv/config.hpp"
#include "pcv/episode.hpp"
#include "pcv/errors.hpp"
#include "pcv/experiments.hpp"
#include "pcv/json_io.hpp"
#include "pcv/se2.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

using Triple = std::tuple<double, double, double>;

// Configs cross the boundary as JSON text; "" means defaults.
pcv::AppConfig config_of(const std::string& text) {
  if (text.empty()) return pcv::AppConfig{};
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::exception& e) {
    throw pcv::ConfigInvalid(std::string("config is not valid JSON: ") + e.what());
  }
  return pcv::config_from_json(j);
}

pcv::Twist2 twist_of(const Triple& t) { return {std::get<0>(t), std::get<1>(t), std::get<2>(t)}; }
Triple triple(const pcv::Twist2& t) { return {t.vx, t.vy, t.omega}; }
pcv::Pose2 pose_of(const Triple& p) { return {std::get<0>(p), std::get<1>(p), std::get<2>(p)}; }
Triple triple(const pcv::Pose2& p) { return {p.x, p.y, p.theta}; }

pcv::DriveMode mode_of(const std::string& s) { return pcv::drive_mode_from_string(s); }

}  // namespace

PYBIND11_MODULE(_pcvkit, m) {
  m.doc() = "powered-caster base kinematics, odometry and sim";

  auto base = py::register_exception<pcv::Error>(m, "PcvError", PyExc_RuntimeError);
  py::register_exception<pcv::ConfigInvalid>(m, "ConfigInvalid", base);
  py::register_exception<pcv::SingularOffset>(m, "SingularOffset", base);
  py::register_exception<pcv::RankDeficient>(m, "RankDeficient", base);
  py::register_exception<pcv::FrameMismatch>(m, "FrameMismatch", base);
  py::register_exception<pcv::TraceMismatch>(m, "TraceMismatch", base);
  py::register_exception<pcv::CommandLengthMismatch>(m, "CommandLengthMismatch", base);
  py::register_exception<pcv::ParseError>(m, "ParseError", base);
  py::register_exception<pcv::Timeout>(m, "Timeout", base);

  m.def("default_config", [] { return pcv::to_json(pcv::AppConfig{}).dump(); });
  m.def("normalize_config", [](const std::string& text) { return pcv::to_json(config_of(text)).dump(); },
        py::arg("config"));

  m.def("se2_compose", [](const Triple& a, const Triple& b) { return triple(pcv::compose(pose_of(a), pose_of(b))); });
  m.def("se2_inverse", [](const Triple& a) { return triple(pcv::inverse(pose_of(a))); });
  m.def("se2_exp", [](const Triple& xi, double dt) { return triple(pcv::exp(twist_of(xi), dt)); }, py::arg("twist"),
        py::arg("dt") = 1.0);
  m.def("se2_log", [](const Triple& p) { return triple(pcv::log(pose_of(p))); });
  m.def("wrap_angle", &pcv::wrap_angle);

  m.def(
      "caster_ik",
      [](const std::string& cfg, std::size_t index, double phi, const Triple& v) {
        const pcv::BaseConfig b = config_of(cfg).base;
        if (index >= b.size()) throw py::index_error("caster index out of range");
        const pcv::JointRates q = pcv::caster_ik(b[index], phi, twist_of(v));
        return std::pair{q.phi_dot, q.rho_dot};
      },
      py::arg("config"), py::arg("index"), py::arg("phi"), py::arg("twist"));

  m.def(
      "base_ik",
      [](const std::string& cfg, const std::vector<double>& phis, const Triple& v) {
        std::vector<std::pair<double, double>> out;
        for (const pcv::JointRates& q : pcv::base_ik(config_of(cfg).base, phis, twist_of(v))) {
          out.emplace_back(q.phi_dot, q.rho_dot);
        }
        return out;
      },
      py::arg("config"), py::arg("phis"), py::arg("twist"));

  m.def(
      "base_fk",
      [](const std::string& cfg, const std::vector<double>& phis, const std::vector<double>& phi_dots,
         const std::vector<double>& rho_dots) {
        if (phi_dots.size() != phis.size() || rho_dots.size() != phis.size()) {
          throw pcv::CommandLengthMismatch(phi_dots.size() != phis.size() ? phi_dots.size() : rho_dots.size(),
                                           phis.size());
        }
        std::vector<pcv::CasterJointState> states(phis.size());
        for (std::size_t i = 0; i < phis.size(); ++i) states[i] = {phis[i], 0.0, phi_dots[i], rho_dots[i]};
        const pcv::FkResult r = pcv::base_fk(config_of(cfg).base, states);
        return std::pair{triple(r.twist), r.residual};
      },
      py::arg("config"), py::arg("phis"), py::arg("phi_dots"), py::arg("rho_dots"));

  m.def(
      "check_kinematics",
      [](const std::string& cfg, int samples, std::uint64_t seed) {
        py::gil_scoped_release nogil;
        return pcv::to_json(pcv::check_kinematics(config_of(cfg).base, samples, seed)).dump();
      },
      py::arg("config"), py::arg("samples") = 10000, py::arg("seed") = 0);

  m.def(
      "bench_odometry",
      [](const std::string& cfg, const std::string& shape, double length, int seeds, std::uint64_t seed,
         int revolutions) {
        const pcv::AppConfig c = config_of(cfg);
        const pcv::PathShape s = pcv::path_shape_from_string(shape);
        py::gil_scoped_release nogil;
        return pcv::to_json(pcv::bench_odometry(c, s, length, seeds, seed, revolutions)).dump();
      },
      py::arg("config"), py::arg("shape") = "square", py::arg("length") = 1.0, py::arg("seeds") = 20,
      py::arg("seed") = 0, py::arg("revolutions") = 5);

  m.def(
      "compare_drive",
      [](const std::string& cfg, const Triple& goal, double timeout) {
        const pcv::AppConfig c = config_of(cfg);
        py::gil_scoped_release nogil;
        return pcv::to_json(pcv::compare_drive(c, pose_of(goal), timeout)).dump();
      },
      py::arg("config"), py::arg("goal"), py::arg("timeout") = 60.0);

  m.def(
      "drive",
      [](const std::string& cfg, const std::vector<Triple>& waypoints, const std::string& mode, double timeout) {
        const pcv::AppConfig c = config_of(cfg);
        std::vector<pcv::Pose2> path;
        for (const Triple& w : waypoints) path.push_back(pose_of(w));
        const pcv::DriveMode dm = mode_of(mode);
        py::gil_scoped_release nogil;
        pcv::ControlLoop loop(c.base, c.sim, c.limits, c.gains);
        const pcv::RunResult r = pcv::drive_waypoints(loop, path, dm, timeout);
        json log = json::array();
        for (const pcv::TickRecord& rec : r.log) log.push_back(json(rec));
        return json{{"reached", r.reached},
                    {"duration_s", r.duration},
                    {"truth_path_m", r.truth_path_length},
                    {"odom_pose", loop.odometry().pose},
                    {"truth_pose", loop.sim().truth_pose},
                    {"log", log}}
            .dump();
      },
      py::arg("config"), py::arg("waypoints"), py::arg("mode") = "holonomic", py::arg("timeout") = 60.0);

  m.def(
      "replay_episode",
      [](const std::filesystem::path& path) {
        py::gil_scoped_release nogil;
        return pcv::to_json(pcv::replay_episode(path)).dump();
      },
      py::arg("path"));
}
