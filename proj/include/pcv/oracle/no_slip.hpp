#pragma once

#include "pcv/caster_kinematics.hpp"
#include "pcv/se2.hpp"

// Independent geometric check of caster rates. Nothing here calls into the
// kinematics implementation: the contact point is re-derived from the raw
// geometry and moved by finite displacements of the base and the joints.

namespace pcv::oracle {

struct SlipCheck {
  double lateral = 0.0;     // slip velocity across the wheel, m/s
  double rolling = 0.0;     // rolling-speed mismatch along the wheel, m/s
  double normalized = 0.0;  // slip displacement per unit delta, m/s
};

/// Moves the base by exp(+-v*delta) and the steer joint by +-phi_dot*delta,
/// differentiates the resulting contact point and compares it with the
/// rolling velocity rho_dot * r along the wheel heading.
SlipCheck finite_difference_slip(const CasterGeometry& g, double phi, const Twist2& v, double phi_dot,
                                 double rho_dot, double delta = 1e-7);

}  // namespace pcv::oracle
