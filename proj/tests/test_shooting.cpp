#include <gtest/gtest.h>

#include "rocketopt/errors.hpp"
#include "rocketopt/scenario.hpp"
#include "rocketopt/shooting.hpp"

using namespace rocketopt;

namespace {

StageContext stage1(const Scenario& sc, double lambda) {
  StageContext ctx;
  ctx.stage = 1;
  ctx.lambda = lambda;
  ctx.spec = to_spec(sc);
  ctx.sol0 = solve_ocp0(ctx.spec, sc.params);
  ctx.velocity_scale = sc.v0;
  return ctx;
}

}  // namespace

TEST(Shooting, UnknownsPackRoundTrip) {
  Vec8 v;
  v << 1, 2, 3, 4, 5, 6, 7, 8;
  EXPECT_EQ(ShootingUnknowns::unpack(v).pack(), v);
  EXPECT_EQ(ShootingUnknowns::unpack(v).t_f, 8.0);
}

TEST(Shooting, FirstStageHomotopyEndpoints) {
  const Scenario sc = preset("tc1", 1000.0);
  const StageContext c0 = stage1(sc, 0.0), c1 = stage1(sc, 1.0);
  const State x0 = initial_state_lambda1(0.0, c0.sol0, c0.spec);
  EXPECT_DOUBLE_EQ(x0.theta(), c0.sol0.theta_star);
  EXPECT_DOUBLE_EQ(x0.psi(), c0.sol0.psi_star);
  const State x1 = initial_state_lambda1(1.0, c1.sol0, c1.spec);
  EXPECT_NEAR(x1.theta(), c1.spec.initial.theta(), 1e-15);
  EXPECT_NEAR(x1.psi(), c1.spec.initial.psi(), 1e-15);
  EXPECT_EQ(x0.velocity(), c0.spec.initial.velocity());
}

TEST(Shooting, EmbeddedOcp0SolvesFirstStageAtZero) {
  // At lambda1 = 0 the OCP0 extremal is a root of the stage-1 residual.
  const Scenario sc = preset("tc1", 1000.0);
  const StageContext ctx = stage1(sc, 0.0);
  ShootingUnknowns u;
  u.p_vx = ctx.sol0.p_v.x();
  u.p_vz = ctx.sol0.p_v.z();
  u.t_f = ctx.sol0.t_f;
  const Vec8 r = residual_s1(u, ctx, sc.params, IntegratorConfig{});
  EXPECT_LT(r.cwiseAbs().maxCoeff(), 1e-8) << r.transpose();
}

TEST(Shooting, EliminatedPvyMatchesOcp0) {
  const Scenario sc = preset("tc1", 1000.0);
  const StageContext ctx = stage1(sc, 0.0);
  ShootingUnknowns u;
  u.p_vx = ctx.sol0.p_v.x();
  u.p_vz = ctx.sol0.p_v.z();
  u.t_f = ctx.sol0.t_f;
  const ExtremalPoint z = shooting_initial_point(u, ctx);
  EXPECT_NEAR(z.p.p_vy(), ctx.sol0.p_v.y(), 1e-12);
  EXPECT_EQ(z.p.p0(), -1.0);
}

TEST(Shooting, LaterStagesNeedEndpoint) {
  const Scenario sc = preset("tc1", 1000.0);
  StageContext ctx = stage1(sc, 0.5);
  ctx.stage = 2;
  ShootingUnknowns u;
  u.t_f = 10.0;
  EXPECT_THROW(shooting_residual(u, ctx, sc.params, IntegratorConfig{}), Error);
}
