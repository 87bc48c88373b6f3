#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <Eigen/Geometry>

#include "CLI11.hpp"
#include "json.hpp"
#include "rocketopt/continuation.hpp"
#include "rocketopt/direct.hpp"
#include "rocketopt/errors.hpp"
#include "rocketopt/io.hpp"
#include "rocketopt/ocp0.hpp"
#include "rocketopt/scenario.hpp"

namespace rocketopt::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct CommonArgs {
  std::vector<std::string> positional;
  std::string config;
  std::vector<std::string> set;
  std::string out_dir = ".";
  bool progress = false;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("args", a.positional,
                  "Preset name (tc1, tc2, tc3) and key=value overrides");
  cmd->add_option("-c,--config", a.config, "Flat key = value config file");
  cmd->add_option("-s,--set", a.set, "Extra key=value override");
  cmd->add_option("-o,--out", a.out_dir, "Output directory");
  cmd->add_flag("-p,--progress", a.progress, "Log progress to stderr");
}

ConfigMap collect_config(const CommonArgs& a, std::string* lone = nullptr) {
  ConfigMap cfg;
  if (!a.config.empty()) cfg = parse_config_file(a.config);
  auto put = [&](const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      if (lone && lone->empty()) {
        *lone = kv;
        return;
      }
      cfg["scenario"] = kv;
      return;
    }
    cfg[kv.substr(0, eq)] = kv.substr(eq + 1);
  };
  for (const auto& p : a.positional) put(p);
  for (const auto& s : a.set) put(s);
  return cfg;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw Error(ErrorKind::kInvalidInput, "cannot create output directory " + dir);
}

std::string path_in(const std::string& dir, const std::string& file) {
  return (fs::path(dir) / file).string();
}

void emit_error(std::ostream& err, const std::string& dir, const json& j) {
  err << j.dump() << '\n';
  if (!dir.empty()) {
    std::ofstream f(path_in(dir, "error.json"));
    if (f) f << j.dump(2) << '\n';
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

int solve_indirect(const CommonArgs& a, std::ostream& out, std::ostream& err) {
  const Scenario sc = scenario_from_config(collect_config(a));
  const TerminalSpec spec = to_spec(sc);
  ensure_dir(a.out_dir);
  const auto t0 = std::chrono::steady_clock::now();

  ContinuationOptions opts = sc.continuation;
  if (a.progress) {
    opts.progress = [&err](const ProgressRecord& r) {
      err << "stage " << r.stage << " lambda " << r.lambda << " step " << r.step
          << " iter " << r.iterations << " residual " << r.residual
          << (r.accepted ? " ok" : " rejected")
          << (r.note.empty() ? "" : " " + r.note) << '\n';
    };
  }
  const PipelineResult res = run_pipeline(spec, sc.params, opts);

  if (res.extremal.trajectory.empty()) {
    json j;
    j["error"] = "no-converged-solution";
    j["stage"] = res.run.stall ? res.run.stall->stage : 0;
    j["reason"] = res.run.stall ? res.run.stall->reason : "";
    emit_error(err, a.out_dir, j);
    return kNumericFailure;
  }

  const auto samples =
      sample_trajectory(res.extremal.trajectory, res.law, sc.params, sc.sample_dt);
  const auto events = event_rows(res.extremal.events);

  RunSummary s;
  s.scenario = sc.name;
  s.solver = "indirect";
  s.t_f = res.t_f;
  s.cost = res.cost;
  if (!res.reached_min_time)
    s.lambda3_star = res.final_context.stage == 3 ? res.final_context.lambda : 0.0;
  for (const auto& e : events) s.switch_times.push_back(e.t);
  s.chattering_flag = res.chattering.flagged;
  const auto& entries = res.run.stages[res.final_context.stage - 1].entries;
  s.residual_norm = entries.empty() ? 0.0 : entries.back().report.residual_norm;

  write_trajectory_csv(path_in(a.out_dir, "trajectory.csv"), samples);
  write_events_csv(path_in(a.out_dir, "events.csv"), events);
  s.wall_time_s = seconds_since(t0);
  write_summary_json(path_in(a.out_dir, "summary.json"), s);
  out << summary_json(s);

  if (res.run.stall) {
    const SubOptimalSummary so = extract_suboptimal(res, sc.params, sc.sample_dt);
    json j;
    j["error"] = "continuation-stall";
    j["stage"] = res.run.stall->stage;
    j["lambda_star"] = res.run.stall->lambda_star;
    j["reason"] = res.run.stall->reason;
    j["t_f"] = so.t_f;
    j["cost"] = so.cost;
    j["max_control_jump"] = so.max_control_jump;
    j["sample_dt"] = so.sample_dt;
    j["control_continuous"] = so.control_continuous;
    emit_error(err, a.out_dir, j);
    return kStall;
  }
  return kSuccess;
}

int solve_direct(const CommonArgs& a, std::ostream& out, std::ostream& err) {
  const Scenario sc = scenario_from_config(collect_config(a));
  const TerminalSpec spec = to_spec(sc);
  ensure_dir(a.out_dir);
  const auto t0 = std::chrono::steady_clock::now();

  DirectOptions opts = sc.direct;
  if (a.progress) {
    opts.progress = [&err](const DirectProgress& p) {
      err << "step " << p.step << " outer " << p.outer << " inner "
          << p.inner_iterations << " t_f " << p.t_f << " residual "
          << p.max_residual << " penalty " << p.penalty << '\n';
    };
  }
  const DirectResult res = solve_direct(spec, sc.params, opts);
  const auto samples = direct_trajectory(res.samples, sc.params);
  const auto analysis = analyze_trajectory(samples, sc.params);

  RunSummary s;
  s.scenario = sc.name;
  s.solver = "direct";
  s.t_f = res.decision.t_f;
  s.cost = res.decision.t_f;
  for (const auto& e : analysis.events) s.switch_times.push_back(e.t);
  s.chattering_flag = analysis.chattering.flagged;
  s.residual_norm = res.terminal.cwiseAbs().maxCoeff();

  write_trajectory_csv(path_in(a.out_dir, "trajectory.csv"), samples);
  write_events_csv(path_in(a.out_dir, "events.csv"), analysis.events);
  s.wall_time_s = seconds_since(t0);
  write_summary_json(path_in(a.out_dir, "summary.json"), s);
  out << summary_json(s);

  const SingularWindow w = longest_singular_window(res.samples);
  if (a.progress)
    err << "singular window [" << w.start << ", " << w.end << "] s\n";
  if (!res.converged) {
    json j;
    j["error"] = "direct-not-converged";
    j["message"] = res.message;
    j["residual_norm"] = s.residual_norm;
    emit_error(err, a.out_dir, j);
    return kNumericFailure;
  }
  return kSuccess;
}

std::string classification(int order) {
  if (order == 0) return "unresolved";
  return "order-" + std::to_string(order);
}

int analyze(const CommonArgs& a, std::ostream& out, std::ostream&) {
  std::string file;
  const ConfigMap cfg = collect_config(a, &file);
  if (file.empty())
    throw Error(ErrorKind::kInvalidInput, "analyze needs a trajectory.csv path");
  if (fs::is_directory(file)) file = path_in(file, "trajectory.csv");
  Scenario sc = preset("tc1", 1000.0);
  apply_config(sc, cfg);
  const auto rows = read_trajectory_csv(file);
  const auto an = analyze_trajectory(rows, sc.params);

  json j;
  j["trajectory"] = file;
  j["samples"] = rows.size();
  j["max_abs_hamiltonian"] = an.max_abs_hamiltonian;
  j["phi_minima"] = an.minima.size();
  json ev = json::array();
  for (const auto& e : an.events) {
    ev.push_back({{"t", e.t},
                  {"order", e.order},
                  {"classification", classification(e.order)},
                  {"control_jump_rad", e.control_jump_rad},
                  {"phi_norm", e.phi_norm}});
  }
  j["events"] = ev;
  j["chattering"] = {{"flagged", an.chattering.flagged},
                     {"run_length", an.chattering.run_length},
                     {"accumulation_time", an.chattering.accumulation_time},
                     {"gaps", an.chattering.gaps}};
  out << j.dump(2) << '\n';
  if (a.out_dir != ".") {
    ensure_dir(a.out_dir);
    std::ofstream f(path_in(a.out_dir, "analysis.json"));
    f << j.dump(2) << '\n';
    write_events_csv(path_in(a.out_dir, "analysis_events.csv"), an.events);
  }
  return kSuccess;
}

int ocp0(const CommonArgs& a, std::ostream& out, std::ostream& err) {
  const Scenario sc = scenario_from_config(collect_config(a));
  const TerminalSpec spec = to_spec(sc);
  const Ocp0Solution sol = solve_ocp0(spec, sc.params);
  const Vec3 w = spec.target_direction();
  const Vec3 vf = sol.v0 + (sc.params.a * sol.e_star + sc.params.gravity) * sol.t_f;
  const double unit = std::abs(sol.e_star.norm() - 1.0);
  const double orth = std::abs(sol.e_star.dot(w));
  const double par = vf.cross(w).norm() / std::max(vf.norm(), 1e-300);
  const bool ok = sol.zero_time || (unit <= 1e-10 && orth <= 1e-9 && par <= 1e-8);

  json j;
  j["scenario"] = sc.name;
  j["e_star"] = {sol.e_star.x(), sol.e_star.y(), sol.e_star.z()};
  j["t_f"] = sol.t_f;
  j["theta_star_deg"] = rad_to_deg(sol.theta_star);
  j["psi_star_deg"] = rad_to_deg(sol.psi_star);
  j["p_v"] = {sol.p_v.x(), sol.p_v.y(), sol.p_v.z()};
  j["zero_time"] = sol.zero_time;
  j["outside_principal_branch"] = sol.outside_principal_branch;
  j["checks"] = {{"unit_norm_error", unit},
                 {"orthogonality_error", orth},
                 {"parallel_error", par},
                 {"passed", ok}};
  out << j.dump(2) << '\n';
  if (!ok) {
    emit_error(err, "", {{"error", "ocp0-identity-check"}});
    return kNumericFailure;
  }
  return kSuccess;
}

int exit_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput:
    case ErrorKind::kInfeasibleOcp0:
    case ErrorKind::kDegenerateTarget:
    case ErrorKind::kAngleExtraction:
      return kInvalidInput;
    default:
      return kNumericFailure;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Minimum-time rocket reorientation solvers"};
  app.require_subcommand(1);
  CommonArgs a;
  auto* indirect = app.add_subcommand(
      "solve-indirect", "Shooting with three-stage continuation");
  auto* direct = app.add_subcommand("solve-direct",
                                    "Piecewise-constant transcription");
  auto* an = app.add_subcommand(
      "analyze", "Switching classification and chattering report of a trajectory.csv");
  auto* oc = app.add_subcommand("ocp0", "Closed-form velocity-only solution");
  for (auto* c : {indirect, direct, an, oc}) add_common(c, a);

  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInvalidInput;
  }

  std::string dir_for_errors = a.out_dir;
  try {
    if (indirect->parsed()) return solve_indirect(a, out, err);
    if (direct->parsed()) return solve_direct(a, out, err);
    if (an->parsed()) return analyze(a, out, err);
    return ocp0(a, out, err);
  } catch (const Error& e) {
    const int code = exit_for(e.kind());
    if (code == kInvalidInput) dir_for_errors.clear();
    json j{{"error", to_string(e.kind())}, {"message", e.what()}};
    emit_error(err, fs::is_directory(dir_for_errors) ? dir_for_errors : "", j);
    return code;
  } catch (const std::exception& e) {
    emit_error(err, "", {{"error", "internal"}, {"message", e.what()}});
    return kNumericFailure;
  }
}

}  // namespace rocketopt::cli
