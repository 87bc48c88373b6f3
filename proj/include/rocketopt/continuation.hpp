#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rocketopt/nlsolve.hpp"
#include "rocketopt/odeint.hpp"
#include "rocketopt/shooting.hpp"

namespace rocketopt {

struct ContinuationEntry {
  double lambda = 0.0;
  ShootingUnknowns unknowns;
  SolveReport report;
};

struct StageRun {
  int stage = 0;
  std::vector<ContinuationEntry> entries;
  bool completed = false;
};

struct StallInfo {
  int stage = 0;
  double lambda_star = 0.0;  ///< last converged lambda of that stage
  std::string reason;
};

struct ContinuationRun {
  Ocp0Solution ocp0;
  std::array<StageRun, 3> stages;
  std::optional<StageEndpoint> endpoint;
  std::optional<StallInfo> stall;
};

/// One line of the progress log.
struct ProgressRecord {
  int stage = 0;
  double lambda = 0.0;
  double step = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool accepted = false;
  std::string note;
};

struct ContinuationOptions {
  double gamma = 50.0;
  double initial_step = 0.1;
  double step_min = 1e-4;
  double step_max = 0.5;
  double grow = 1.5;
  double shrink = 0.5;
  double phi_star = 0.0;
  /// Rescale unknowns to the magnitude of each predicted guess (floored at
  /// scale_floor) instead of the fixed solver.scale.
  bool adaptive_scale = true;
  double scale_floor = 1e-3;
  /// Stages 1 and 2 switch to pseudo-arclength continuation when the natural
  /// parameter stalls, to pass folds. Stage 3 never does: its stall is the
  /// reported sub-optimal outcome.
  bool fold_fallback = true;
  double arclength_step = 0.05;
  double arclength_step_min = 1e-6;
  int arclength_max_steps = 3000;
  SolveOptions solver;
  IntegratorConfig integrator;
  std::function<void(const ProgressRecord&)> progress;

  ContinuationOptions();
};

/// Componentwise Lagrange extrapolation through the last min(4, n) entries.
ShootingUnknowns predict(const std::vector<ContinuationEntry>& history,
                         double lambda_next);

/// Step after a corrector outcome. Sets `stall` when a failure would take
/// the step below step_min.
double adapt_step(bool success, double step, const ContinuationOptions& opts,
                  bool& stall);

struct PipelineResult {
  ContinuationRun run;
  StageContext final_context;  ///< context of the last converged solve
  ShootingUnknowns final_unknowns;
  ExtremalRun extremal;        ///< trajectory of the last converged solve
  ChatteringReport chattering;
  ControlLaw law;
  double t_f = 0.0;
  double cost = 0.0;  ///< t_f + gamma (1 - lambda3) * int |u|^2
  double max_abs_h = 0.0;
  bool reached_min_time = false;  ///< lambda3 = 1 converged
};

/// OCP0 -> embed -> lambda1 -> record endpoint -> lambda2 -> lambda3.
/// Stage failures become a StallInfo; nothing here throws for a stall.
PipelineResult run_pipeline(const TerminalSpec& spec,
                            const RocketParams& params,
                            const ContinuationOptions& opts);

struct SubOptimalSummary {
  double lambda3_star = 0.0;
  double t_f = 0.0;
  double cost = 0.0;
  /// Largest |u(t_k+1) - u(t_k)| over the sampling grid.
  double max_control_jump = 0.0;
  double sample_dt = 0.0;
  /// max jump <= lipschitz_bound * dt with the bound from the dynamics.
  bool control_continuous = false;
};

/// Certifies the trajectory at the stall point (or the regularized one if
/// stage 3 never advanced).
SubOptimalSummary extract_suboptimal(const PipelineResult& result,
                                     const RocketParams& params,
                                     double sample_dt = 0.01);

}  // namespace rocketopt
