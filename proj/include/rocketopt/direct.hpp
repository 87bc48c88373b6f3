#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rocketopt/dynamics.hpp"
#include "rocketopt/nlsolve.hpp"

namespace rocketopt {

/// Index into terminal_residuals().
enum class TerminalConstraint : int {
  kVelocityPsi = 0,    ///< v_z sin psi_f + v_y cos theta_f cos psi_f
  kVelocityTheta = 1,  ///< v_z sin theta_f - v_x cos theta_f
  kTheta = 2,
  kPsi = 3,
  kPhi = 4,
  kOmegaX = 5,
  kOmegaY = 6,
};

using ConstraintSet = std::vector<TerminalConstraint>;

/// Planar constraints first, then the out-of-plane velocity condition, psi,
/// phi and omega_x, each step adding one condition.
std::vector<ConstraintSet> default_stage_plan();

/// Decision vector of the transcription: free final time and one control per
/// segment of a uniform mesh in normalized time t / t_f.
struct Transcription {
  double t_f = 0.0;
  std::vector<Control> u;

  int segments() const { return static_cast<int>(u.size()); }
};

struct TranscriptionEval {
  bool feasible = true;      ///< false when propagation hit an Euler singularity
  double violation_time = 0.0;
  VecX residuals;            ///< active terminal residuals, natural units
  double objective = 0.0;    ///< equals t_f
  std::vector<State> nodes;  ///< state at every RK4 step, substeps * N + 1
};

/// Propagates the plant with RK4 (`substeps` steps per segment) and returns
/// the active terminal residuals and the objective.
TranscriptionEval transcription_residuals(const Transcription& z,
                                          const TerminalSpec& spec,
                                          const RocketParams& params,
                                          const ConstraintSet& active,
                                          int substeps = 2);

/// Jacobian of the active residuals (natural units) with respect to
/// (t_f, u1_0, u2_0, u1_1, ...), one discrete-adjoint sweep per row.
/// Throws kEulerSingularity when propagation leaves the chart.
MatX transcription_jacobian(const Transcription& z, const TerminalSpec& spec,
                            const RocketParams& params,
                            const ConstraintSet& active, int substeps = 2);

struct DirectProgress {
  int step = 0;       ///< 1-based index into the stage plan
  int outer = 0;
  int inner_iterations = 0;
  double t_f = 0.0;
  double max_residual = 0.0;
  double penalty = 0.0;
};

struct DirectOptions {
  int segments = 200;
  int substeps = 2;
  /// Initial guess: constant control and final time (0 picks twice the
  /// closed-form reorientation time).
  Control initial_control{0.0, 0.0};
  double t_f_guess = 0.0;
  std::vector<ConstraintSet> stage_plan = default_stage_plan();
  /// Max-norm of active residuals in natural units.
  double feasibility_tol = 1e-6;
  /// Projected-gradient tolerance of the inner problems at the last outer
  /// iteration.
  double optimality_tol = 1e-6;
  int max_outer = 40;
  int max_inner = 3000;
  int lbfgs_memory = 12;
  double penalty0 = 10.0;
  double penalty_growth = 10.0;
  double penalty_max = 1e10;
  std::function<void(const DirectProgress&)> progress;
};

struct DirectStageReport {
  int step = 0;
  ConstraintSet active;
  double t_f = 0.0;
  double max_residual = 0.0;
  int outer_iterations = 0;
  int inner_iterations = 0;
  bool converged = false;
};

struct DirectSample {
  double t = 0.0;
  State x;
  /// Discrete adjoint of the final augmented Lagrangian, sign-flipped so it
  /// estimates the p0 = -1 costate.
  Vec8 p = Vec8::Zero();
  Control u;  ///< control of the segment that starts at t
  double singular_distance = 0.0;
};

struct DirectResult {
  Transcription decision;
  std::vector<DirectStageReport> stages;
  Vec7 terminal = Vec7::Zero();  ///< all seven residuals at the solution
  VecX multipliers;              ///< of the last stage's active constraints
  std::vector<DirectSample> samples;
  bool converged = false;
  std::string message;
};

/// Minimum-time transcription solved stage by stage with an augmented
/// Lagrangian whose inner problems use projected L-BFGS over the control
/// disks. Each stage warm-starts from the previous one.
DirectResult solve_direct(const TerminalSpec& spec, const RocketParams& params,
                          const DirectOptions& opts = {});

struct SingularWindow {
  double start = 0.0;
  double end = 0.0;
  double length() const { return end - start; }
};

/// Longest run of samples, not touching either end, on which ||u|| < u_max
/// and singular_distance < rel_distance * singular_distance(t = 0).
SingularWindow longest_singular_window(const std::vector<DirectSample>& s,
                                       double u_max = 0.5,
                                       double rel_distance = 0.1);

}  // namespace rocketopt
