#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "rocketopt/dynamics.hpp"
#include "rocketopt/frames.hpp"

using namespace rocketopt;

TEST(Dynamics, RhsIsControlAffine) {
  std::mt19937_64 rng(4);
  const RocketParams p;
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 50; ++i) {
    const State x = test::random_state(rng);
    const Control c{u(rng), u(rng)};
    const Vec8 expect = field_f(x, p) + c.u1 * field_g1(p) + c.u2 * field_g2(p);
    EXPECT_LT((rhs(x, c, p) - expect).norm(), 1e-12);
  }
}

TEST(Dynamics, ControlFieldsActOnRatesOnly) {
  const RocketParams p;
  const Vec8 g1 = field_g1(p), g2 = field_g2(p);
  EXPECT_DOUBLE_EQ(g1[kOmegaY], p.b_bar);
  EXPECT_DOUBLE_EQ(g2[kOmegaX], -p.b_bar);
  EXPECT_DOUBLE_EQ(g1.norm(), p.b_bar);
  EXPECT_DOUBLE_EQ(g2.norm(), p.b_bar);
}

TEST(Dynamics, VelocityFollowsThrustAxisAndGravity) {
  std::mt19937_64 rng(5);
  const RocketParams p;
  for (int i = 0; i < 20; ++i) {
    const State x = test::random_state(rng);
    const Vec3 expect = p.a * body_axis_in_launch(x.theta(), x.psi()) + p.gravity;
    EXPECT_LT((field_f(x, p).head<3>() - expect).norm(), 1e-12);
  }
}

TEST(Dynamics, ZeroDriftKeepsStateConstant) {
  RocketParams p;
  p.a = 0.0;
  p.gravity.setZero();
  std::mt19937_64 rng(6);
  State x = test::random_state(rng);
  x.omega_x() = 0.0;
  x.omega_y() = 0.0;
  EXPECT_LT(rhs(x, {}, p).norm(), 1e-15);
}

TEST(Dynamics, FlightPathVelocityHasRequestedSpeed) {
  const Vec3 v = velocity_from_flightpath(1500.0, 1.1, 0.2);
  EXPECT_NEAR(v.norm(), 1500.0, 1e-9);
  EXPECT_LT((v / 1500.0 - body_axis_in_launch(1.1, 0.2)).norm(), 1e-15);
}

TEST(Dynamics, TerminalResidualsVanishOnTarget) {
  TerminalSpec spec;
  spec.theta_f = 1.4;
  spec.psi_f = 0.08;
  spec.phi_f = 0.0;
  State x;
  x.theta() = spec.theta_f;
  x.psi() = spec.psi_f;
  x.set_velocity(700.0 * spec.target_direction());
  EXPECT_LT(terminal_residuals(x, spec).norm(), 1e-12);
  x.theta() += 0.01;
  EXPECT_NEAR(terminal_residuals(x, spec)[2], 0.01, 1e-15);
}

TEST(Dynamics, DiskAndBoxAdmissibility) {
  EXPECT_TRUE(admissible({0.6, 0.8}, ControlBound::kDisk));
  EXPECT_FALSE(admissible({0.8, 0.8}, ControlBound::kDisk));
  EXPECT_TRUE(admissible({1.0, -1.0}, ControlBound::kBox));
  EXPECT_FALSE(admissible({1.0 + 1e-9, 0.0}, ControlBound::kBox));
}

TEST(Dynamics, TorqueGainFromCylinder) {
  // I_x = 12 (3 + 4) / 12 = 7; b = 14 * 2 / 14 * 0.5.
  EXPECT_DOUBLE_EQ(torque_gain_from_geometry(12.0, 2.0, 1.0, 14.0, 0.5), 1.0);
}
