#pragma once

#include <functional>
#include <string_view>

#include <Eigen/Core>

namespace rocketopt {

using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

enum class SolveStatus { kConverged, kStalled, kMaxIter, kNanEncountered };

std::string_view to_string(SolveStatus s);

struct SolveReport {
  VecX root;
  double residual_norm = 0.0;  ///< max-norm of F at root
  double jacobian_condition_estimate = 0.0;
  int iterations = 0;
  int evaluations = 0;
  SolveStatus status = SolveStatus::kStalled;

  bool converged() const { return status == SolveStatus::kConverged; }
};

struct IterationTrace {
  int iteration = 0;
  double residual_norm = 0.0;
  double step_norm = 0.0;
  double radius = 0.0;
  bool accepted = false;
  bool jacobian_refreshed = false;
};

using Residual = std::function<VecX(const VecX&)>;

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 100;
  /// Forward-difference step: fd_step * max(1, |y_i|) in scaled variables.
  double fd_step = 1.4901161193847656e-08;
  /// Typical magnitude of each unknown; the solver works on x_i / scale_i.
  /// Empty means unit scaling.
  VecX scale;
  /// Full finite-difference refresh every this many iterations (0: n).
  int refresh_every = 0;
  /// Refresh after this many consecutive rejected steps.
  int refresh_after_rejections = 2;
  /// Initial trust radius in scaled variables (0: max(1, ||y0||)).
  double initial_radius = 0.0;
  /// Evaluate Jacobian columns on separate threads. F must be reentrant.
  bool parallel_jacobian = false;
  std::function<void(const IterationTrace&)> trace;
};

/// Powell dogleg trust-region root finder for square systems with a
/// forward-difference Jacobian kept current between refreshes by rank-1
/// Broyden updates. Converged when ||F||_inf <= tol. Non-finite residuals
/// at x0 give kNanEncountered; during iterations they shrink the radius.
SolveReport solve(const Residual& f, const VecX& x0,
                  const SolveOptions& opts = {});

/// Forward-difference Jacobian of f at x (unscaled).
MatX fd_jacobian(const Residual& f, const VecX& x, const VecX& fx,
                 double rel_step, const VecX& scale, bool parallel);

}  // namespace rocketopt
