#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "pcv/errors.hpp"
#include "pcv/se2.hpp"

using namespace pcv;
namespace o = testing_oracle;

namespace {

void check_pose(const Pose2& p, double x, double y, double theta, double tol) {
  CHECK(std::abs(p.x - x) <= tol);
  CHECK(std::abs(p.y - y) <= tol);
  CHECK(std::abs(o::angle_diff(p.theta, theta)) <= tol);
}

Pose2 random_pose(std::mt19937_64& rng, double span = 3.0) {
  std::uniform_real_distribution<double> pos(-span, span);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  return {pos(rng), pos(rng), ang(rng)};
}

}  // namespace

TEST_CASE("wrap_angle keeps angles in (-pi, pi]") {
  CHECK(wrap_angle(kPi) == kPi);
  CHECK(wrap_angle(-kPi) == kPi);
  CHECK(wrap_angle(3 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(0.25) == 0.25);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-100, 100);
  for (int i = 0; i < 10000; ++i) {
    const double w = wrap_angle(d(rng));
    REQUIRE(w > -kPi);
    REQUIRE(w <= kPi);
  }
}

TEST_CASE("compose examples") {
  const Pose2 p(0.3, -1.2, 2.0);
  check_pose(compose(Pose2::identity(), p), p.x, p.y, p.theta, 0.0);
  check_pose(compose(p, inverse(p)), 0, 0, 0, 1e-12);

  // (1,0,pi/2) o (1,0,0) against the homogeneous-matrix product.
  const o::Planar ref = o::from_matrix(o::matmul(o::homogeneous(1, 0, kPi / 2), o::homogeneous(1, 0, 0)));
  const Pose2 c = compose(Pose2(1, 0, kPi / 2), Pose2(1, 0, 0));
  check_pose(c, ref.x, ref.y, ref.theta, 1e-12);
  check_pose(c, 1, 1, kPi / 2, 1e-12);
}

TEST_CASE("compose matches matrix product, is associative and wraps") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 10000; ++i) {
    const Pose2 a = random_pose(rng), b = random_pose(rng), c = random_pose(rng);
    const o::Planar ref =
        o::from_matrix(o::matmul(o::homogeneous(a.x, a.y, a.theta), o::homogeneous(b.x, b.y, b.theta)));
    const Pose2 ab = compose(a, b);
    REQUIRE(std::abs(ab.x - ref.x) < 1e-12);
    REQUIRE(std::abs(ab.y - ref.y) < 1e-12);
    REQUIRE(std::abs(o::angle_diff(ab.theta, ref.theta)) < 1e-12);
    REQUIRE(ab.theta > -kPi);
    REQUIRE(ab.theta <= kPi);

    const Pose2 l = compose(compose(a, b), c);
    const Pose2 r = compose(a, compose(b, c));
    REQUIRE(std::abs(l.x - r.x) < 1e-12);
    REQUIRE(std::abs(l.y - r.y) < 1e-12);
    REQUIRE(std::abs(o::angle_diff(l.theta, r.theta)) < 1e-12);

    const Pose2 e = compose(a, inverse(a));
    REQUIRE(std::abs(e.x) < 1e-12);
    REQUIRE(std::abs(e.y) < 1e-12);
    REQUIRE(std::abs(e.theta) < 1e-12);
  }
}

TEST_CASE("exp examples") {
  check_pose(exp(Twist2{0, 0, 0}, 1.0), 0, 0, 0, 0.0);
  check_pose(exp(Twist2{1, 0, 0}, 2.0), 2, 0, 0, 0.0);
  check_pose(exp(Twist2{1, 0, kPi / 2}, 1.0), 2 / kPi, 2 / kPi, kPi / 2, 1e-14);

  const o::Planar ref = o::integrate_body_twist(1, 0, kPi / 2, 1.0);
  const Pose2 p = exp(Twist2{1, 0, kPi / 2}, 1.0);
  check_pose(p, ref.x, ref.y, ref.theta, 1e-9);
  CHECK(p.x == doctest::Approx(0.6366).epsilon(1e-4));
}

TEST_CASE("exp agrees with numeric integration for random twists") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> v(-1, 1), w(-2, 2);
  for (int i = 0; i < 20; ++i) {
    const Twist2 xi{v(rng), v(rng), w(rng)};
    const o::Planar ref = o::integrate_body_twist(xi.vx, xi.vy, xi.omega, 0.7);
    const Pose2 p = exp(xi, 0.7);
    REQUIRE(std::abs(p.x - ref.x) < 1e-9);
    REQUIRE(std::abs(p.y - ref.y) < 1e-9);
    REQUIRE(std::abs(o::angle_diff(p.theta, ref.theta)) < 1e-9);
  }
  // Tiny rotation takes the series branch; still matches.
  const Pose2 p = exp(Twist2{0.4, -0.2, 1e-9}, 1.0);
  const o::Planar ref = o::integrate_body_twist(0.4, -0.2, 1e-9, 1.0);
  CHECK(std::abs(p.x - ref.x) < 1e-9);
  CHECK(std::abs(p.y - ref.y) < 1e-9);
}

TEST_CASE("exp rejects world-frame twists") {
  CHECK_THROWS_AS(exp(Twist2{1, 0, 0, Frame::kWorld}, 1.0), FrameMismatch);
}

TEST_CASE("log examples") {
  const Twist2 z = log(Pose2::identity());
  CHECK(z.vx == 0.0);
  CHECK(z.vy == 0.0);
  CHECK(z.omega == 0.0);
  const Twist2 t = log(Pose2(2, 0, 0));
  CHECK(t.vx == 2.0);
  CHECK(t.vy == 0.0);
  const Twist2 a = log(Pose2(2 / kPi, 2 / kPi, kPi / 2));
  CHECK(std::abs(a.vx - 1.0) < 1e-12);
  CHECK(std::abs(a.vy) < 1e-12);
  CHECK(std::abs(a.omega - kPi / 2) < 1e-12);
}

TEST_CASE("exp(log(p)) round trip") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(-5, 5), ang(-kPi + 1e-6, kPi - 1e-6);
  for (int i = 0; i < 10000; ++i) {
    const Pose2 p(pos(rng), pos(rng), ang(rng));
    const Pose2 q = exp(log(p), 1.0);
    REQUIRE(std::abs(q.x - p.x) < 1e-10);
    REQUIRE(std::abs(q.y - p.y) < 1e-10);
    REQUIRE(std::abs(o::angle_diff(q.theta, p.theta)) < 1e-10);
  }
}

TEST_CASE("log at theta = pi is deterministic and picks +pi") {
  const Twist2 a = log(Pose2(0.5, 0.2, kPi));
  const Twist2 b = log(Pose2(0.5, 0.2, -kPi));
  CHECK(a == b);
  CHECK(a.omega == kPi);
  const Pose2 back = exp(a, 1.0);
  CHECK(std::abs(back.x - 0.5) < 1e-12);
  CHECK(std::abs(back.y - 0.2) < 1e-12);
}

TEST_CASE("rotate_twist examples") {
  const Twist2 a = rotate_twist(Twist2{1, 0, 1}, 0.0);
  CHECK(a.vx == 1.0);
  CHECK(a.vy == 0.0);
  CHECK(a.omega == 1.0);
  CHECK(a.frame == Frame::kWorld);

  const Twist2 b = rotate_twist(Twist2{1, 0, 0}, kPi / 2);
  CHECK(std::abs(b.vx) < 1e-15);
  CHECK(std::abs(b.vy - 1.0) < 1e-15);

  const Twist2 c = rotate_twist(rotate_twist(Twist2{0.3, -0.4, 0.2}, 0.9), -0.9);
  CHECK(std::abs(c.vx - 0.3) < 1e-15);
  CHECK(std::abs(c.vy + 0.4) < 1e-15);
  CHECK(c.omega == 0.2);
  CHECK(c.frame == Frame::kBody);
}
