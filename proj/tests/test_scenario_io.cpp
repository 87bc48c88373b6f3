#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rocketopt/continuation.hpp"
#include "rocketopt/errors.hpp"
#include "rocketopt/io.hpp"
#include "rocketopt/scenario.hpp"

using namespace rocketopt;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("rocketopt_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(Scenario, PresetsMatchTerminalTable) {
  const Scenario t1 = preset("tc1", 1000.0);
  EXPECT_EQ(t1.initial.theta, 75.0);
  EXPECT_EQ(t1.initial.psi, 0.5);
  EXPECT_EQ(t1.initial.phi, 0.0);
  EXPECT_EQ(t1.target.theta, 85.0);
  EXPECT_EQ(t1.target.psi, 5.0);
  EXPECT_EQ(t1.target.phi, 0.0);
  EXPECT_EQ(t1.initial.omega_x, 0.0);
  EXPECT_EQ(t1.target.omega_y, 0.0);
  const Scenario t2 = preset("tc2", 2000.0);
  EXPECT_EQ(t2.initial.theta, 70.0);
  EXPECT_EQ(t2.target.theta, 85.0);
  EXPECT_EQ(t2.v0, 2000.0);
  const Scenario t3 = preset("tc3", 1500.0);
  EXPECT_EQ(t3.initial.theta, 85.0);
  EXPECT_EQ(t3.target.theta, 75.0);
  EXPECT_EQ(t3.target.psi, 5.0);
  EXPECT_THROW(preset("tc4", 1000.0), Error);
  EXPECT_THROW(preset("tc1", -5.0), Error);
}

TEST(Scenario, DegreesConvertOnceAtTheBoundary) {
  for (const char* name : {"tc1", "tc2", "tc3"}) {
    const Scenario s = preset(name, 1500.0);
    const TerminalSpec spec = to_spec(s);
    EXPECT_NEAR(spec.initial.theta(), s.initial.theta * M_PI / 180.0, 1e-15);
    EXPECT_NEAR(spec.psi_f, s.target.psi * M_PI / 180.0, 1e-15);
    const Scenario back = from_spec(name, spec);
    EXPECT_NEAR(back.initial.theta, s.initial.theta, 1e-12);
    EXPECT_NEAR(back.initial.psi, s.initial.psi, 1e-12);
    EXPECT_NEAR(back.target.theta, s.target.theta, 1e-12);
    EXPECT_NEAR(back.target.psi, s.target.psi, 1e-12);
    EXPECT_NEAR(back.v0, s.v0, 1e-9);
    // Initial velocity lies along the initial body axis.
    const Vec3 v = spec.initial.velocity();
    EXPECT_NEAR(v.z() / v.norm(), std::cos(spec.initial.theta()) * std::cos(spec.initial.psi()), 1e-15);
  }
}

TEST(Scenario, ConfigOverrides) {
  std::istringstream in(
      "# comment\n"
      "scenario = tc3\n"
      "v0 = 1500   # m/s\n"
      "continuation.gamma = 25\n"
      "solver.tol = 1e-8\n"
      "integrator.rel_tol=1e-10\n"
      "direct.segments = 100\n"
      "target.psi = 4.5\n"
      "continuation.fold_fallback = false\n");
  const Scenario s = scenario_from_config(parse_config(in));
  EXPECT_EQ(s.name, "tc3");
  EXPECT_EQ(s.v0, 1500.0);
  EXPECT_EQ(s.initial.theta, 85.0);
  EXPECT_EQ(s.continuation.gamma, 25.0);
  EXPECT_EQ(s.continuation.solver.tol, 1e-8);
  EXPECT_EQ(s.continuation.integrator.rel_tol, 1e-10);
  EXPECT_EQ(s.direct.segments, 100);
  EXPECT_EQ(s.target.psi, 4.5);
  EXPECT_FALSE(s.continuation.fold_fallback);
}

TEST(Scenario, ConfigErrors) {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return scenario_from_config(parse_config(in));
  };
  EXPECT_THROW(parse("nonsense\n"), Error);
  EXPECT_THROW(parse("v0 = fast\n"), Error);
  EXPECT_THROW(parse("no.such.key = 1\n"), Error);
  EXPECT_THROW(parse("v0 = 1\nv0 = 2\n"), Error);
  EXPECT_THROW(parse("direct.segments = 2.5\n"), Error);
  EXPECT_THROW(parse("scenario = tc7\n"), Error);
}

TEST(Io, TrajectoryCsvRoundTripIsExact) {
  std::vector<TrajectorySample> rows(3);
  for (int i = 0; i < 3; ++i) {
    rows[i].t = 0.1 * i + 1.0 / 3.0;
    rows[i].x = Vec8::Random() * 1e3;
    rows[i].p = Vec8::Random() * 1e-7;
    rows[i].u = {std::sqrt(0.5), -1.0 / 7.0};
    rows[i].phi_norm = M_PI * 1e-11;
    rows[i].hamiltonian = -2.2e-16;
  }
  const fs::path d = temp_dir("csv");
  write_trajectory_csv((d / "t.csv").string(), rows);
  std::ifstream f(d / "t.csv");
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header,
            "t,v_x,v_y,v_z,theta,psi,phi,omega_x,omega_y,p_vx,p_vy,p_vz,"
            "p_theta,p_psi,p_phi,p_omega_x,p_omega_y,u1,u2,phi_norm,hamiltonian");
  const auto back = read_trajectory_csv((d / "t.csv").string());
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].t, rows[i].t);
    EXPECT_EQ(back[i].x, rows[i].x);
    EXPECT_EQ(back[i].p, rows[i].p);
    EXPECT_EQ(back[i].u.u1, rows[i].u.u1);
    EXPECT_EQ(back[i].u.u2, rows[i].u.u2);
    EXPECT_EQ(back[i].phi_norm, rows[i].phi_norm);
    EXPECT_EQ(back[i].hamiltonian, rows[i].hamiltonian);
  }
}

TEST(Io, ReaderRejectsWrongHeader) {
  const fs::path d = temp_dir("bad");
  std::ofstream(d / "t.csv") << "t,x\n1,2\n";
  EXPECT_THROW(read_trajectory_csv((d / "t.csv").string()), Error);
  EXPECT_THROW(read_trajectory_csv((d / "missing.csv").string()), Error);
}

TEST(Io, SummaryJsonKeysAndNull) {
  RunSummary s;
  s.scenario = "tc2";
  s.solver = "indirect";
  s.t_f = 66.0;
  s.cost = 69.3;
  s.switch_times = {1.0, 2.5};
  const std::string j = summary_json(s);
  const char* keys[] = {"scenario", "solver", "t_f", "cost", "lambda3_star",
                        "switch_times", "chattering_flag", "residual_norm",
                        "wall_time_s"};
  std::size_t pos = 0;
  for (const char* k : keys) {
    const auto at = j.find(std::string("\"") + k + "\"");
    ASSERT_NE(at, std::string::npos) << k;
    EXPECT_GT(at, pos) << k;
    pos = at;
  }
  EXPECT_NE(j.find("\"lambda3_star\": null"), std::string::npos);
  const fs::path d = temp_dir("json");
  s.lambda3_star = 0.98;
  write_summary_json((d / "s.json").string(), s);
  const RunSummary back = read_summary_json((d / "s.json").string());
  EXPECT_EQ(back.lambda3_star, 0.98);
  EXPECT_EQ(back.switch_times, s.switch_times);
  EXPECT_EQ(back.cost, 69.3);
}

TEST(Io, AnalyzeRecoversEventsFromSampledRows) {
  const Scenario sc = preset("tc1", 1000.0);
  const PipelineResult r = run_pipeline(to_spec(sc), sc.params, sc.continuation);
  ASSERT_TRUE(r.reached_min_time);
  const auto rows = sample_trajectory(r.extremal.trajectory, r.law, sc.params, 0.01);
  const fs::path d = temp_dir("analyze");
  write_trajectory_csv((d / "trajectory.csv").string(), rows);
  write_events_csv((d / "events.csv").string(), event_rows(r.extremal.events));
  const auto an = analyze_trajectory(read_trajectory_csv((d / "trajectory.csv").string()),
                                     sc.params);
  const auto stored = read_events_csv((d / "events.csv").string());
  ASSERT_EQ(an.events.size(), stored.size());
  for (std::size_t i = 0; i < stored.size(); ++i) {
    EXPECT_NEAR(an.events[i].t, stored[i].t, 1e-6);
    EXPECT_EQ(an.events[i].order, stored[i].order);
    EXPECT_NEAR(an.events[i].control_jump_rad, stored[i].control_jump_rad, 0.01);
    EXPECT_NEAR(an.events[i].phi_norm, stored[i].phi_norm, 1e-3 * stored[i].phi_norm);
  }
  EXPECT_FALSE(an.chattering.flagged);
  EXPECT_LT(an.max_abs_hamiltonian, 1e-8);
}
