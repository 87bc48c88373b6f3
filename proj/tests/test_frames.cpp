#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "rocketopt/errors.hpp"
#include "rocketopt/frames.hpp"

using namespace rocketopt;

TEST(Frames, SingleAxisRotationsAreProper) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> a(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    for (Axis ax : {Axis::kX, Axis::kY, Axis::kZ}) {
      const Mat3 r = rot_axis(ax, a(rng)).matrix();
      EXPECT_LT((r * r.transpose() - Mat3::Identity()).norm(), 1e-14);
      EXPECT_NEAR(r.determinant(), 1.0, 1e-14);
    }
  }
}

TEST(Frames, ComposedRotationIsProperAndTransposeInverts) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> a(-1.2, 1.2);
  for (int i = 0; i < 100; ++i) {
    const double th = a(rng), ps = a(rng), ph = a(rng);
    const Mat3 b = body_from_launch(th, ps, ph).matrix();
    const Mat3 l = launch_from_body(th, ps, ph).matrix();
    EXPECT_LT((b * l - Mat3::Identity()).norm(), 1e-14);
    EXPECT_NEAR(b.determinant(), 1.0, 1e-14);
  }
}

TEST(Frames, BodyAxisIsImageOfBodyZ) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> a(-1.2, 1.2);
  for (int i = 0; i < 100; ++i) {
    const double th = a(rng), ps = a(rng), ph = a(rng);
    const Vec3 zb = launch_from_body(th, ps, ph) * Vec3::UnitZ();
    EXPECT_LT((zb - body_axis_in_launch(th, ps)).norm(), 1e-14);
    EXPECT_NEAR(body_axis_in_launch(th, ps).norm(), 1.0, 1e-15);
  }
}

TEST(Frames, ZeroAnglesGiveIdentity) {
  EXPECT_LT((body_from_launch(0, 0, 0).matrix() - Mat3::Identity()).norm(), 0.0 + 1e-16);
}

TEST(Frames, GimbalLockRaises) {
  const double half = std::numbers::pi / 2;
  EXPECT_THROW(body_from_launch(0.1, half, 0.0), Error);
  EXPECT_THROW(check_euler(-half + 1e-12), Error);
  EXPECT_NO_THROW(check_euler(half - 1e-6));
}
