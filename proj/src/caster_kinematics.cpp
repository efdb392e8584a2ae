#include "pcv/caster_kinematics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "pcv/errors.hpp"

namespace pcv {

namespace {

constexpr double kNormalEquationCondLimit = 1e12;
constexpr double kRankTolerance = 1e-12;

// Two rows of the stacked constraint system contributed by one caster.
// Row 0 is the rolling direction, row 1 the lateral (no-slip) direction.
void fill_rows(const CasterGeometry& g, const CasterJointState& s, Eigen::Ref<Eigen::Matrix<double, 2, 3>> rows,
               Eigen::Ref<Eigen::Vector2d> rhs) {
  const Point2 c = contact_point(g, s.phi);
  const double cp = std::cos(s.phi);
  const double sp = std::sin(s.phi);
  rows << cp, sp, -c.y * cp + c.x * sp,  //
      -sp, cp, c.y * sp + c.x * cp;
  rhs << g.r * s.rho_dot + g.b_y * s.phi_dot, -g.b_x * s.phi_dot;
}

struct StackedSystem {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
};

StackedSystem stack(const BaseConfig& cfg, std::span<const CasterJointState> states) {
  const auto n = static_cast<Eigen::Index>(states.size());
  StackedSystem sys{Eigen::MatrixXd(2 * n, 3), Eigen::VectorXd(2 * n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Matrix<double, 2, 3> rows;
    Eigen::Vector2d rhs;
    fill_rows(cfg[static_cast<std::size_t>(i)], states[static_cast<std::size_t>(i)], rows, rhs);
    sys.a.middleRows<2>(2 * i) = rows;
    sys.b.segment<2>(2 * i) = rhs;
  }
  return sys;
}

}  // namespace

CasterGeometry CasterGeometry::at(double x, double y) {
  CasterGeometry g;
  g.h = std::hypot(x, y);
  g.beta = std::atan2(y, x);
  return g;
}

Point2 CasterGeometry::steer_axis() const { return {h * std::cos(beta), h * std::sin(beta)}; }

void validate_caster(const CasterGeometry& g, std::size_t index) {
  const auto fail = [index](const std::string& what) {
    throw ConfigInvalid("caster " + std::to_string(index) + ": " + what);
  };
  if (!std::isfinite(g.b_x) || std::abs(g.b_x) <= kMinLongitudinalOffset) throw SingularOffset(index, g.b_x);
  if (!(g.r > 0.0)) fail("wheel radius r must be > 0");
  if (!(g.h >= 0.0)) fail("h must be >= 0");
  if (!(g.steer_ratio > 0.0)) fail("steer_ratio must be > 0");
  if (!(g.drive_ratio > 0.0)) fail("drive_ratio must be > 0");
  for (double v : {g.beta, g.b_y, g.couple_ratio, g.steer_encoder_offset}) {
    if (!std::isfinite(v)) fail("non-finite parameter");
  }
}

BaseConfig::BaseConfig(std::vector<CasterGeometry> casters) : casters_(std::move(casters)) {
  if (casters_.size() < 3) {
    throw ConfigInvalid("base needs at least 3 casters, got " + std::to_string(casters_.size()));
  }
  for (std::size_t i = 0; i < casters_.size(); ++i) validate_caster(casters_[i], i);

  // Full rank at an arbitrary, non-symmetric steer configuration.
  std::vector<CasterJointState> probe(casters_.size());
  for (std::size_t i = 0; i < probe.size(); ++i) probe[i].phi = wrap_angle(0.37 + 1.13 * static_cast<double>(i));
  const StackedSystem sys = stack(*this, probe);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.a);
  const auto& sv = svd.singularValues();
  if (sv(2) <= kRankTolerance * sv(0)) {
    throw ConfigInvalid("caster contact points coincide; base rotation is unobservable");
  }
}

BaseConfig BaseConfig::make_default() {
  constexpr double kHalfLength = 0.20;
  constexpr double kHalfWidth = 0.18;
  return BaseConfig({CasterGeometry::at(kHalfLength, kHalfWidth), CasterGeometry::at(kHalfLength, -kHalfWidth),
                     CasterGeometry::at(-kHalfLength, kHalfWidth), CasterGeometry::at(-kHalfLength, -kHalfWidth)});
}

Point2 contact_point(const CasterGeometry& g, double phi) {
  const Point2 s = g.steer_axis();
  const double c = std::cos(phi);
  const double sn = std::sin(phi);
  return {s.x + c * g.b_x - sn * g.b_y, s.y + sn * g.b_x + c * g.b_y};
}

JointRates caster_ik(const CasterGeometry& g, double phi, const Twist2& v) {
  require_frame(v, Frame::kBody, "caster_ik");
  if (std::abs(g.b_x) <= kMinLongitudinalOffset) throw SingularOffset(0, g.b_x);

  // Velocity of the base-fixed point under the contact point.
  const Point2 c = contact_point(g, phi);
  const double ux = v.vx - v.omega * c.y;
  const double uy = v.vy + v.omega * c.x;
  const double cp = std::cos(phi);
  const double sp = std::sin(phi);
  const double u_par = cp * ux + sp * uy;
  const double u_perp = -sp * ux + cp * uy;

  JointRates out;
  out.phi_dot = -u_perp / g.b_x;
  out.rho_dot = (u_par + (g.b_y / g.b_x) * u_perp) / g.r;
  return out;
}

std::vector<JointRates> base_ik(const BaseConfig& cfg, std::span<const double> phis, const Twist2& v) {
  if (phis.size() != cfg.size()) {
    throw CommandLengthMismatch(phis.size(), cfg.size());
  }
  std::vector<JointRates> out;
  out.reserve(cfg.size());
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    if (std::abs(cfg[i].b_x) <= kMinLongitudinalOffset) throw SingularOffset(i, cfg[i].b_x);
    out.push_back(caster_ik(cfg[i], phis[i], v));
  }
  return out;
}

FkResult base_fk(const BaseConfig& cfg, std::span<const CasterJointState> states) {
  if (states.size() != cfg.size()) {
    throw ConfigInvalid("base_fk: " + std::to_string(states.size()) + " joint states for " +
                        std::to_string(cfg.size()) + " casters");
  }
  const StackedSystem sys = stack(cfg, states);

  const Eigen::Matrix3d normal = sys.a.transpose() * sys.a;
  const Eigen::Vector3d moment = sys.a.transpose() * sys.b;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(normal, Eigen::EigenvaluesOnly);
  const Eigen::Vector3d lambda = eig.eigenvalues();  // ascending

  Eigen::Vector3d x;
  if (lambda(2) > 0.0 && lambda(0) * kNormalEquationCondLimit >= lambda(2)) {
    x = normal.ldlt().solve(moment);
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(kRankTolerance);
    if (svd.rank() < 3) {
      throw RankDeficient("base_fk: stacked constraint matrix has rank " + std::to_string(svd.rank()) +
                          " < 3 at the given steer angles");
    }
    x = svd.solve(sys.b);
  }

  const Eigen::VectorXd err = sys.a * x - sys.b;
  FkResult out;
  out.twist = Twist2{x(0), x(1), x(2), Frame::kBody};
  out.residual = std::sqrt(err.squaredNorm() / static_cast<double>(err.size()));
  return out;
}

CasterJointState joints_from_motors(const CasterGeometry& g, const MotorState& m) {
  CasterJointState j;
  j.phi = wrap_angle(m.abs_steer_reading - g.steer_encoder_offset);
  j.phi_dot = m.steer_motor_vel / g.steer_ratio;
  j.rho_dot = m.drive_motor_vel / g.drive_ratio - g.couple_ratio * j.phi_dot;
  j.rho = m.drive_motor_pos / g.drive_ratio - g.couple_ratio * (m.steer_motor_pos / g.steer_ratio);
  return j;
}

MotorVelocities motors_from_joint_rates(const CasterGeometry& g, double phi_dot, double rho_dot) {
  return {g.steer_ratio * phi_dot, g.drive_ratio * (rho_dot + g.couple_ratio * phi_dot)};
}

}  // namespace pcv
