#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pcv/se2.hpp"

namespace pcv {

/// Smallest |b_x| for which a caster still makes the base holonomic.
inline constexpr double kMinLongitudinalOffset = 1e-4;

/// Placement, offsets and gearing of one powered caster.
///
/// (h, beta) locates the steer axis in the base frame. (b_x, b_y) is the vector
/// from the steer axis to the wheel contact point, expressed in the wheel frame
/// (x along the rolling direction). A trailing caster has b_x < 0.
struct CasterGeometry {
  double h = 0.0;
  double beta = 0.0;
  double b_x = -0.014;
  double b_y = 0.005;
  double r = 0.0508;
  double steer_ratio = 12.8;   // motor rad per steer joint rad
  double drive_ratio = 6.75;   // motor rad per wheel rad
  double couple_ratio = 0.0;   // wheel rad induced per steer joint rad
  double steer_encoder_offset = 0.0;

  /// Builds a caster whose steer axis sits at (x, y) in the base frame.
  static CasterGeometry at(double x, double y);

  Point2 steer_axis() const;
};

/// Throws SingularOffset for |b_x| <= 1e-4 and ConfigInvalid for the other
/// geometric invariants. `index` is reported in the diagnostic.
void validate_caster(const CasterGeometry& g, std::size_t index);

struct CasterJointState {
  double phi = 0.0;  // steer position, wrapped to (-pi, pi]
  double rho = 0.0;  // roll position, unbounded
  double phi_dot = 0.0;
  double rho_dot = 0.0;
};

struct MotorState {
  double steer_motor_pos = 0.0;
  double steer_motor_vel = 0.0;
  double drive_motor_pos = 0.0;
  double drive_motor_vel = 0.0;
  double abs_steer_reading = 0.0;  // absolute encoder on the steer axis, [0, 2*pi)
};

struct JointRates {
  double phi_dot = 0.0;
  double rho_dot = 0.0;
};

struct MotorVelocities {
  double steer = 0.0;
  double drive = 0.0;
};

/// Ordered set of at least three casters whose stacked forward-kinematics
/// matrix has full rank at a generic steer configuration.
class BaseConfig {
 public:
  explicit BaseConfig(std::vector<CasterGeometry> casters);

  /// Four casters on the corners of a 0.40 x 0.36 m rectangle.
  static BaseConfig make_default();

  const std::vector<CasterGeometry>& casters() const noexcept { return casters_; }
  std::size_t size() const noexcept { return casters_.size(); }
  const CasterGeometry& operator[](std::size_t i) const { return casters_[i]; }

 private:
  std::vector<CasterGeometry> casters_;
};

/// Wheel ground-contact point in the base frame for steer angle `phi`.
Point2 contact_point(const CasterGeometry& g, double phi);

/// Steer and roll rates that make the contact point roll without slip under
/// the body twist `v`. Throws SingularOffset when |b_x| <= 1e-4.
JointRates caster_ik(const CasterGeometry& g, double phi, const Twist2& v);

std::vector<JointRates> base_ik(const BaseConfig& cfg, std::span<const double> phis, const Twist2& v);

struct FkResult {
  Twist2 twist;
  double residual = 0.0;  // RMS violation of the stacked rolling constraints
};

/// Least-squares body twist from steer angles and joint rates of every caster.
/// Throws RankDeficient if the stacked system has rank < 3.
FkResult base_fk(const BaseConfig& cfg, std::span<const CasterJointState> states);

CasterJointState joints_from_motors(const CasterGeometry& g, const MotorState& m);

MotorVelocities motors_from_joint_rates(const CasterGeometry& g, double phi_dot, double rho_dot);

}  // namespace pcv
