// Acceptance checks, one PASS/FAIL line per criterion. Pass criterion
// numbers as arguments to run a subset.
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "helpers.hpp"
#include "json.hpp"
#include "rocketopt/continuation.hpp"
#include "rocketopt/direct.hpp"
#include "rocketopt/dop853.hpp"
#include "rocketopt/errors.hpp"
#include "rocketopt/io.hpp"
#include "rocketopt/liealgebra.hpp"
#include "rocketopt/ocp0.hpp"
#include "rocketopt/odeint.hpp"
#include "rocketopt/pmp.hpp"
#include "rocketopt/scenario.hpp"

using namespace rocketopt;
namespace fs = std::filesystem;

namespace {

// Published reference values for the three terminal-condition cases.
constexpr double kTc1SwitchTimes[2] = {8.8, 25.8};
constexpr double kTc2LambdaStar = 0.98;
constexpr double kTc2Cost = 69.3;
constexpr double kTc2FinalTime = 66.0;
constexpr double kTc2DirectFinalTime = 65.4;

struct Verdict {
  bool pass = true;
  std::string detail;
};

class Report {
 public:
  void add(const char* fmt, ...) __attribute__((format(printf, 2, 3))) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    if (!text_.empty()) text_ += "; ";
    text_ += buf;
  }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Shared between criteria 6 and 7.
double g_indirect_tf = std::nan("");

Verdict criterion1() {
  std::mt19937_64 rng(101);
  const RocketParams p;
  double worst_nonzero = 0.0, worst_zero = 0.0;
  int nonzero = 0, zero = 0;
  std::set<std::string> printed_bad;
  for (BracketId id : kAllBrackets) (is_identically_zero(id) ? zero : nonzero)++;
  for (int i = 0; i < 100; ++i) {
    const State x = test::random_state(rng);
    for (BracketId id : kAllBrackets) {
      const Vec8 oracle = bracket_oracle(id, x, p);
      if (is_identically_zero(id)) {
        worst_zero = std::max(worst_zero, bracket(id, x, p).cwiseAbs().maxCoeff());
      } else {
        worst_nonzero = std::max(
            worst_nonzero, (bracket(id, x, p) - oracle).cwiseAbs().maxCoeff());
      }
      if ((printed_bracket(id, x, p) - oracle).cwiseAbs().maxCoeff() > 1e-5)
        printed_bad.insert(std::string(to_string(id)));
    }
  }
  Verdict v;
  v.pass = worst_nonzero <= 1e-5 && worst_zero < 1e-8;
  Report r;
  r.add("%d nonzero closed forms, max oracle gap %.2e", nonzero, worst_nonzero);
  r.add("%d zero brackets, max %.2e", zero, worst_zero);
  std::string ids;
  for (const auto& s : printed_bad) ids += (ids.empty() ? "" : ",") + s;
  r.add("printed formulas disagreeing with oracle: %s", ids.empty() ? "none" : ids.c_str());
  v.detail = r.text();
  return v;
}

Verdict criterion2() {
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> ang(-1.2, 1.2), vel(-2000, 2000);
  const RocketParams p;
  const BracketId pairings[] = {
      BracketId::kG1,      BracketId::kG2,      BracketId::kAdfG1,
      BracketId::kAdfG2,   BracketId::kAd2fG1,  BracketId::kAd2fG2,
      BracketId::kAd3fG1,  BracketId::kAd3fG2,  BracketId::kG1AdfG2,
      BracketId::kG1Ad2fG2, BracketId::kG2Ad2fG1};
  double worst_pair = 0.0, worst_h = 0.0, min_margin = 1e300;
  for (int i = 0; i < 50; ++i) {
    const ExtremalPoint z = singular_surface_point(
        ang(rng), ang(rng), ang(rng), Vec3(vel(rng), vel(rng), vel(rng)), p);
    for (BracketId id : pairings)
      worst_pair = std::max(worst_pair, std::abs(pairing(id, z, p)));
    worst_h = std::max(worst_h, std::abs(hamiltonian(z, {}, p, ControlLaw::min_time())));
    min_margin = std::min(min_margin, glcc_margin(z.x, p));
  }
  Verdict v;
  v.pass = worst_pair <= 1e-10 && worst_h <= 1e-12 && min_margin > 0.0;
  Report r;
  r.add("50 points: max pairing %.2e, max |H| %.2e, min GLCC margin %.3f",
        worst_pair, worst_h, min_margin);
  v.detail = r.text();
  return v;
}

Verdict criterion3() {
  std::mt19937_64 rng(103);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> speed(100.0, 2000.0), gmag(0.0, 9.8);
  auto unit = [&] { return Vec3(n(rng), n(rng), n(rng)).normalized(); };
  double e_norm = 0, orth = 0, par = 0, drift = 0;
  int solved = 0, attempts = 0;
  EventOptions ev;
  ev.enabled = false;
  while (solved < 100 && attempts < 2000) {
    ++attempts;
    const Vec3 v0 = speed(rng) * unit(), w = unit();
    RocketParams p;
    p.gravity = gmag(rng) * unit();
    Ocp0Solution s;
    try {
      s = solve_ocp0(v0, w, 12.0, p.gravity);
    } catch (const Error&) {
      continue;
    }
    if (s.zero_time) continue;
    ++solved;
    e_norm = std::max(e_norm, std::abs(s.e_star.norm() - 1.0));
    orth = std::max(orth, std::abs(s.e_star.dot(w)));
    const Vec3 vf = v0 + (12.0 * s.e_star + p.gravity) * s.t_f;
    par = std::max(par, vf.normalized().cross(w).norm());
    const ExtremalPoint z0 = embed_extremal(s, 0.0, p);
    const auto run = integrate_extremal(z0, ControlLaw::min_time(), p,
                                        IntegratorConfig{}, 0.0, s.t_f, ev);
    const Vec8 xf = run.trajectory.point(s.t_f).x.vec();
    drift = std::max(drift, (xf.tail<5>() - z0.x.vec().tail<5>()).cwiseAbs().maxCoeff());
  }
  Verdict v;
  v.pass = solved == 100 && e_norm <= 1e-10 && orth <= 1e-9 && par <= 1e-8 &&
           drift <= 1e-10;
  Report r;
  r.add("%d problems (%d drawn): |e*|-1 %.1e, <e*,w> %.1e, parallel %.1e, "
        "attitude drift %.1e", solved, attempts, e_norm, orth, par, drift);
  v.detail = r.text();
  return v;
}

Verdict criterion4() {
  const Scenario sc = preset("tc1", 1000.0);
  const PipelineResult res = run_pipeline(to_spec(sc), sc.params, sc.continuation);
  Verdict v;
  Report r;
  r.add("lambda3=1 reached: %s", res.reached_min_time ? "yes" : "no");
  const auto& ev = res.extremal.events;
  bool events_ok = ev.size() == 2;
  std::string list;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s%.3f s (order %d, jump %.4f)",
                  i ? ", " : "", ev[i].t, ev[i].order, ev[i].control_jump);
    list += buf;
    if (i < 2) {
      events_ok = events_ok && ev[i].order == 1 &&
                  std::abs(ev[i].t - kTc1SwitchTimes[i]) <= 0.4 &&
                  std::abs(ev[i].control_jump - std::numbers::pi) <= 0.05;
    }
  }
  r.add("events: %s", list.c_str());
  r.add("t_f %.4f, max|H| %.2e", res.t_f, res.max_abs_h);
  v.pass = res.reached_min_time && events_ok && res.max_abs_h <= 1e-8;
  v.detail = r.text();
  return v;
}

Verdict criterion5() {
  const Scenario tc1 = preset("tc1", 1500.0), tc3 = preset("tc3", 1500.0);
  const PipelineResult a = run_pipeline(to_spec(tc1), tc1.params, tc1.continuation);
  const PipelineResult b = run_pipeline(to_spec(tc3), tc3.params, tc3.continuation);
  int order1 = 0;
  for (const auto& e : a.extremal.events) order1 += e.order == 1;
  Verdict v;
  Report r;
  if (a.reached_min_time) {
    r.add("TC1 converged at lambda3=1");
  } else {
    r.add("TC1 stalled at lambda3=%.5f", a.final_context.lambda);
  }
  r.add("TC1 %d order-1 events of %zu (need 4)", order1, a.extremal.events.size());
  r.add("t_f TC3 %.3f %s TC1 %.3f", b.t_f, b.t_f < a.t_f ? "<" : ">=", a.t_f);
  r.add("TC3 lambda3=1 %s", b.reached_min_time ? "yes" : "no");
  v.pass = a.reached_min_time && order1 == 4 &&
           static_cast<int>(a.extremal.events.size()) == 4 && b.t_f < a.t_f;
  v.detail = r.text();
  return v;
}

Verdict criterion6() {
  const fs::path dir = fs::temp_directory_path() / "rocketopt_acceptance_tc2";
  fs::remove_all(dir);
  std::ostringstream out, err;
  const int code = cli::run({"rocketopt", "solve-indirect", "tc2", "v0=2000", "-o",
                             dir.string()},
                            out, err);
  Verdict v;
  Report r;
  r.add("exit code %d", code);
  if (code != 3 && code != 0) {
    v.pass = false;
    r.add("stderr: %s", err.str().c_str());
    v.detail = r.text();
    return v;
  }
  const RunSummary s = read_summary_json((dir / "summary.json").string());
  const auto rows = read_trajectory_csv((dir / "trajectory.csv").string());
  bool continuous = false;
  try {
    continuous = nlohmann::json::parse(err.str()).at("control_continuous").get<bool>();
  } catch (const std::exception&) {
  }
  const double ls = s.lambda3_star.value_or(1.0);
  g_indirect_tf = s.t_f;
  r.add("lambda3* %.5f", ls);
  r.add("cost %.3f (%+.2f%%)", s.cost, 100 * (s.cost / kTc2Cost - 1));
  r.add("t_f %.3f (%+.2f%%)", s.t_f, 100 * (s.t_f / kTc2FinalTime - 1));
  r.add("%zu rows emitted, control continuous: %s", rows.size(), continuous ? "yes" : "no");
  v.pass = code == 3 && ls >= 0.95 && ls < 1.0 &&
           std::abs(ls - kTc2LambdaStar) <= 0.02 &&
           std::abs(s.cost / kTc2Cost - 1) <= 0.03 &&
           std::abs(s.t_f / kTc2FinalTime - 1) <= 0.03 && !rows.empty() && continuous;
  v.detail = r.text();
  return v;
}

Verdict criterion7() {
  const Scenario sc = preset("tc2", 2000.0);
  DirectOptions opts = sc.direct;
  opts.segments = 200;
  const DirectResult res = solve_direct(to_spec(sc), sc.params, opts);
  const double worst = res.terminal.cwiseAbs().maxCoeff();
  const SingularWindow w = longest_singular_window(res.samples);
  if (std::isnan(g_indirect_tf)) {
    const PipelineResult ind = run_pipeline(to_spec(sc), sc.params, sc.continuation);
    g_indirect_tf = ind.t_f;
  }
  const double tf = res.decision.t_f;
  Verdict v;
  Report r;
  r.add("converged %s, max residual %.2e", res.converged ? "yes" : "no", worst);
  r.add("t_f %.3f (%+.2f%%)", tf, 100 * (tf / kTc2DirectFinalTime - 1));
  r.add("singular window [%.2f, %.2f] s = %.2f s", w.start, w.end, w.length());
  r.add("indirect sub-optimal t_f %.3f", g_indirect_tf);
  v.pass = worst <= 1e-6 && std::abs(tf / kTc2DirectFinalTime - 1) <= 0.05 &&
           w.length() >= 10.0 && tf <= g_indirect_tf * 1.02;
  v.detail = r.text();
  return v;
}

double integrator_order() {
  const Scenario sc = preset("tc1", 1000.0);
  const RocketParams params = sc.params;
  const Ocp0Solution s = solve_ocp0(to_spec(sc), params);
  ExtremalPoint z0 = embed_extremal(s, 0.0, params);
  // Off the singular surface so the flow is not polynomial in t.
  z0.x.omega_x() = 0.3;
  z0.x.omega_y() = -0.21;
  z0.p.p_omega_x() = 50.0;
  z0.p.p_omega_y() = -30.0;
  z0.p.p_theta() = 0.5;
  const ControlLaw law = ControlLaw::regularized(50.0);
  auto endpoint = [&](double h) {
    IntegratorConfig cfg;
    cfg.rel_tol = cfg.abs_tol = 1e-3;
    cfg.h_max = h;
    Dop853<16> rk(cfg);
    return rk.integrate(
        [&](double, const Vec16& y) -> Vec16 {
          return extremal_rhs(ExtremalPoint::unpack(y), params, law);
        },
        0.0, z0.packed(), 16.0);
  };
  const Vec16 ref = endpoint(16.0 / 1024);
  return std::log2((endpoint(1.0) - ref).norm() / (endpoint(0.5) - ref).norm());
}

Verdict criterion8() {
  std::mt19937_64 rng(108);
  const RocketParams p;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const ExtremalPoint z{test::random_state(rng), Costate(test::random_vec8(rng), -1.0)};
    const Control u{0.3, -0.2};
    const Vec8 dp = adjoint_rhs(z, u, p);
    for (int k = 0; k < 8; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(z.x.vec()[k]));
      ExtremalPoint a = z, b = z;
      a.x.vec()[k] += h;
      b.x.vec()[k] -= h;
      const ControlLaw law = ControlLaw::min_time();
      const double fd = -(hamiltonian(a, u, p, law) - hamiltonian(b, u, p, law)) / (2 * h);
      worst = std::max(worst, std::abs(fd - dp[k]));
    }
  }
  const double order = integrator_order();

  std::string summaries[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path dir =
        fs::temp_directory_path() / ("rocketopt_acceptance_det" + std::to_string(i));
    fs::remove_all(dir);
    std::ostringstream out, err;
    cli::run({"rocketopt", "solve-indirect", "tc2", "v0=2000", "-o", dir.string()}, out, err);
    std::ifstream f(dir / "summary.json");
    auto j = nlohmann::ordered_json::parse(f);
    j.erase("wall_time_s");
    summaries[i] = j.dump();
  }
  const bool same = summaries[0] == summaries[1];
  Verdict v;
  Report r;
  r.add("adjoint vs -dH/dx max gap %.2e over 100 points", worst);
  r.add("integrator observed order %.2f (embedded order 8)", order);
  r.add("two identical runs: summary.json %s", same ? "bitwise equal" : "DIFFERS");
  v.pass = worst <= 1e-6 && order >= 7.0 && order <= 10.0 && same;
  v.detail = r.text();
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  struct Item {
    int id;
    double budget_s;
    std::function<Verdict()> run;
  };
  const Item items[] = {
      {1, 5, criterion1},    {2, 2, criterion2},   {3, 10, criterion3},
      {4, 120, criterion4},  {5, 240, criterion5}, {6, 300, criterion6},
      {7, 1800, criterion7}, {8, 600, criterion8},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& it : items) {
    if (!only.empty() && !only.count(it.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = it.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double t = elapsed(t0);
    const bool in_time = t <= it.budget_s;
    const bool pass = v.pass && in_time;
    failed += !pass;
    std::printf("criterion %d: %s  (%.1f s of %.0f s) %s\n", it.id,
                pass ? "PASS" : "FAIL", t, it.budget_s, v.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
