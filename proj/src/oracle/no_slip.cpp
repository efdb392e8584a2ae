#include "pcv/oracle/no_slip.hpp"

#include <cmath>

namespace pcv::oracle {

namespace {

struct Vec {
  double x;
  double y;
};

Vec rotate(Vec p, double angle) {
  return {std::cos(angle) * p.x - std::sin(angle) * p.y, std::sin(angle) * p.x + std::cos(angle) * p.y};
}

// Contact point in the base frame, straight from the caster drawing.
Vec contact(const CasterGeometry& g, double steer) {
  const Vec axis{g.h * std::cos(g.beta), g.h * std::sin(g.beta)};
  const Vec offset = rotate({g.b_x, g.b_y}, steer);
  return {axis.x + offset.x, axis.y + offset.y};
}

// Contact point after time `t`, expressed in the starting base frame.
Vec displaced_contact(const CasterGeometry& g, double phi, const Twist2& v, double phi_dot, double t) {
  const double heading = v.omega * t;
  Vec origin{v.vx * t, v.vy * t};
  if (std::abs(v.omega) > 1e-12) {
    const double s = std::sin(heading);
    const double c = 1.0 - std::cos(heading);
    origin = {(s * v.vx - c * v.vy) / v.omega, (c * v.vx + s * v.vy) / v.omega};
  }
  const Vec local = rotate(contact(g, phi + phi_dot * t), heading);
  return {origin.x + local.x, origin.y + local.y};
}

}  // namespace

SlipCheck finite_difference_slip(const CasterGeometry& g, double phi, const Twist2& v, double phi_dot,
                                 double rho_dot, double delta) {
  const Vec ahead = displaced_contact(g, phi, v, phi_dot, delta);
  const Vec behind = displaced_contact(g, phi, v, phi_dot, -delta);
  const Vec velocity{(ahead.x - behind.x) / (2.0 * delta), (ahead.y - behind.y) / (2.0 * delta)};

  const Vec heading{std::cos(phi), std::sin(phi)};
  const double roll_speed = rho_dot * g.r;
  const Vec slip{velocity.x - roll_speed * heading.x, velocity.y - roll_speed * heading.y};

  SlipCheck out;
  out.rolling = slip.x * heading.x + slip.y * heading.y;
  out.lateral = -slip.x * heading.y + slip.y * heading.x;
  out.normalized = std::hypot(slip.x, slip.y);
  return out;
}

}  // namespace pcv::oracle
