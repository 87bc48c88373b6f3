#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"
#include "rocketopt/liealgebra.hpp"
#include "rocketopt/ocp0.hpp"
#include "rocketopt/pmp.hpp"

using namespace rocketopt;

TEST(LieAlgebra, ClosedFormsMatchDifferenceOracle) {
  std::mt19937_64 rng(10);
  const RocketParams p;
  for (int i = 0; i < 100; ++i) {
    const State x = test::random_state(rng);
    for (BracketId id : kAllBrackets) {
      const Vec8 closed = bracket(id, x, p);
      if (is_identically_zero(id)) {
        EXPECT_LT(closed.norm(), 1e-8) << to_string(id);
        EXPECT_LT(bracket_oracle(id, x, p).norm(), 1e-6) << to_string(id);
      } else {
        EXPECT_LT((closed - bracket_oracle(id, x, p)).cwiseAbs().maxCoeff(), 1e-5)
            << to_string(id);
      }
    }
  }
}

TEST(LieAlgebra, DifferenceOracleIsExactOnLinearFields) {
  Eigen::Matrix<double, 8, 8> A = Eigen::Matrix<double, 8, 8>::Random();
  Eigen::Matrix<double, 8, 8> B = Eigen::Matrix<double, 8, 8>::Random();
  const VectorField fa = [&](const Vec8& x) -> Vec8 { return A * x; };
  const VectorField fb = [&](const Vec8& x) -> Vec8 { return B * x; };
  const Vec8 x = Vec8::Random();
  // [Ax, Bx] = (BA - AB) x
  EXPECT_LT((bracket_fd(fa, fb, x) - (B * A - A * B) * x).norm(), 1e-8);
}

TEST(LieAlgebra, PrintedTableDiffersOnlyOnKnownEntries) {
  std::mt19937_64 rng(11);
  const RocketParams p;
  const State x = test::random_state(rng);
  for (BracketId id : kAllBrackets) {
    const double gap = (printed_bracket(id, x, p) - bracket(id, x, p)).norm();
    const bool known = id == BracketId::kAd2fG1 || id == BracketId::kAd3fG2 ||
                       id == BracketId::kG1Ad3fG2 || id == BracketId::kG2Ad3fG1;
    if (known) {
      EXPECT_GT(gap, 1e-6) << to_string(id);
    } else {
      EXPECT_LT(gap, 1e-12) << to_string(id);
    }
  }
}

TEST(LieAlgebra, ControlDistributionSpansSixDimensions) {
  std::mt19937_64 rng(12);
  const RocketParams p;
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(span_rank_6(test::random_state(rng), p), 6);
  }
}

TEST(LieAlgebra, SingularSurfacePointsZeroLowOrderPairings) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ang(-1.2, 1.2), v(-2000, 2000);
  const RocketParams p;
  for (int i = 0; i < 50; ++i) {
    const ExtremalPoint z = singular_surface_point(
        ang(rng), ang(rng), ang(rng), Vec3(v(rng), v(rng), v(rng)), p);
    for (BracketId id : {BracketId::kG1, BracketId::kG2, BracketId::kAdfG1,
                         BracketId::kAdfG2, BracketId::kAd2fG1,
                         BracketId::kAd2fG2, BracketId::kAd3fG1,
                         BracketId::kAd3fG2, BracketId::kG1AdfG2,
                         BracketId::kG1Ad2fG2, BracketId::kG2Ad2fG1}) {
      EXPECT_LT(std::abs(pairing(id, z, p)), 1e-10) << to_string(id);
    }
    EXPECT_LT(std::abs(hamiltonian(z, {}, p, ControlLaw::min_time())), 1e-12);
    EXPECT_GT(glcc_margin(z.x, p), 0.0);
    EXPECT_LT(singular_distance(z), 1e-12);
  }
}

TEST(LieAlgebra, SingularDistanceSeesRates) {
  const RocketParams p;
  ExtremalPoint z = singular_surface_point(1.0, 0.1, 0.0, Vec3(900, 10, 400), p);
  z.x.omega_x() = 0.3;
  EXPECT_NEAR(singular_distance(z), 0.3, 1e-12);
}
