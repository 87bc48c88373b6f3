#include <gtest/gtest.h>

#include "rocketopt/continuation.hpp"
#include "rocketopt/errors.hpp"
#include "rocketopt/scenario.hpp"

using namespace rocketopt;

namespace {

ContinuationEntry entry(double lambda, double (*poly)(double)) {
  ContinuationEntry e;
  e.lambda = lambda;
  Vec8 v;
  for (int i = 0; i < 8; ++i) v[i] = (i + 1) * poly(lambda);
  e.unknowns = ShootingUnknowns::unpack(v);
  return e;
}

double cubic(double l) { return 2.0 - 3.0 * l + 0.5 * l * l * l; }
double quartic(double l) { return l * l * l * l; }

}  // namespace

TEST(Continuation, PredictorIsExactOnCubics) {
  std::vector<ContinuationEntry> h;
  for (double l : {0.0, 0.1, 0.25, 0.3}) h.push_back(entry(l, cubic));
  const Vec8 p = predict(h, 0.42).pack();
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(p[i], (i + 1) * cubic(0.42), 1e-12);
}

TEST(Continuation, PredictorUsesLastFourEntries) {
  std::vector<ContinuationEntry> h;
  for (double l : {0.0, 0.05, 0.1, 0.2, 0.3}) h.push_back(entry(l, quartic));
  // A cubic through the last four points is not exact for l^4.
  EXPECT_GT(std::abs(predict(h, 0.4).pack()[0] - quartic(0.4)), 1e-6);
  h.resize(1);
  EXPECT_DOUBLE_EQ(predict(h, 0.7).pack()[3], h[0].unknowns.pack()[3]);
  EXPECT_THROW(predict({}, 0.1), Error);
}

TEST(Continuation, StepAdaptation) {
  ContinuationOptions o;
  bool stall = false;
  EXPECT_DOUBLE_EQ(adapt_step(true, 0.1, o, stall), 0.1 * o.grow);
  EXPECT_FALSE(stall);
  EXPECT_DOUBLE_EQ(adapt_step(true, 0.45, o, stall), o.step_max);
  EXPECT_DOUBLE_EQ(adapt_step(false, 0.1, o, stall), 0.05);
  EXPECT_FALSE(stall);
  adapt_step(false, 1.5e-4, o, stall);
  EXPECT_TRUE(stall);
}

TEST(Continuation, Tc1PipelineReachesMinimumTime) {
  const Scenario sc = preset("tc1", 1000.0);
  const PipelineResult r = run_pipeline(to_spec(sc), sc.params, sc.continuation);
  ASSERT_TRUE(r.reached_min_time);
  EXPECT_FALSE(r.run.stall.has_value());
  EXPECT_LT(r.max_abs_h, 1e-8);
  // Each stage starts at 0 and its stored lambdas increase to 1.
  for (const auto& st : r.run.stages) {
    ASSERT_FALSE(st.entries.empty());
    EXPECT_EQ(st.entries.front().lambda, 0.0);
    EXPECT_EQ(st.entries.back().lambda, 1.0);
    for (std::size_t i = 1; i < st.entries.size(); ++i)
      EXPECT_GT(st.entries[i].lambda, st.entries[i - 1].lambda);
  }
  // Min time: cost equals t_f.
  EXPECT_DOUBLE_EQ(r.cost, r.t_f);
}

TEST(Continuation, PipelineIsDeterministic) {
  const Scenario sc = preset("tc1", 1000.0);
  const PipelineResult a = run_pipeline(to_spec(sc), sc.params, sc.continuation);
  const PipelineResult b = run_pipeline(to_spec(sc), sc.params, sc.continuation);
  for (int s = 0; s < 3; ++s) {
    ASSERT_EQ(a.run.stages[s].entries.size(), b.run.stages[s].entries.size());
    for (std::size_t i = 0; i < a.run.stages[s].entries.size(); ++i) {
      EXPECT_EQ(a.run.stages[s].entries[i].lambda, b.run.stages[s].entries[i].lambda);
      EXPECT_EQ(a.run.stages[s].entries[i].unknowns.pack(),
                b.run.stages[s].entries[i].unknowns.pack());
    }
  }
  EXPECT_EQ(a.t_f, b.t_f);
}
