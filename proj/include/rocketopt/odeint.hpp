#pragma once

#include <optional>
#include <vector>

#include "rocketopt/dop853.hpp"
#include "rocketopt/dynamics.hpp"
#include "rocketopt/pmp.hpp"
#include "rocketopt/types.hpp"

namespace rocketopt {

/// Dense-output solution of the extremal system on [t0, tf].
class ExtremalTrajectory {
 public:
  ExtremalTrajectory() = default;
  ExtremalTrajectory(std::vector<DenseSegment<16>> segments, double p0)
      : segments_(std::move(segments)), p0_(p0) {}

  bool empty() const { return segments_.empty(); }
  double t0() const { return segments_.front().t0; }
  double tf() const { return segments_.back().t1(); }
  double p0() const { return p0_; }
  const std::vector<DenseSegment<16>>& segments() const { return segments_; }

  /// Packed (x, p) at t, clamped to [t0, tf].
  Vec16 at(double t) const;
  ExtremalPoint point(double t) const;

 private:
  std::vector<DenseSegment<16>> segments_;
  double p0_ = -1.0;
};

/// Local minimum of ||Phi|| found on the dense output.
struct PhiMinimum {
  double t = 0.0;
  double phi_norm = 0.0;
};

struct SwitchEvent {
  double t = 0.0;
  ExtremalPoint z;
  double phi_norm = 0.0;
  int order = 0;  ///< 1..4, 0 when unresolved
  double control_jump = 0.0;  ///< angle between u(t - d) and u(t + d) [rad]
};

struct EventOptions {
  bool enabled = true;
  /// A minimum of ||Phi|| counts as a crossing of the switching surface when
  /// it is below max(kPhiEpsilon, rel_threshold * max_t ||Phi||).
  double rel_threshold = 1e-3;
  /// Minimum half-width of the window used to measure the control jump [s].
  double jump_window = 1e-3;
  /// The window is widened to jump_scale * |Phi|min / |dPhi/dt| so a
  /// near-miss of the origin is measured after the turn has completed.
  double jump_scale = 100.0;
  /// Interior samples per step used to bracket sign changes.
  int probes_per_step = 4;
};

struct ExtremalRun {
  ExtremalTrajectory trajectory;
  std::vector<SwitchEvent> events;
  std::vector<PhiMinimum> minima;
  IntegrationStats stats;
};

/// Integrates x' = f + u1 g1 + u2 g2, p' = -dH/dx with u from `law`,
/// re-evaluated at every stage. Throws ChatteringError on step collapse.
ExtremalRun integrate_extremal(const ExtremalPoint& z0, const ControlLaw& law,
                               const RocketParams& params,
                               const IntegratorConfig& cfg, double t0,
                               double t1, const EventOptions& events = {});

/// Same flow without storing the trajectory; returns z(t1).
ExtremalPoint propagate_extremal(const ExtremalPoint& z0,
                                 const ControlLaw& law,
                                 const RocketParams& params,
                                 const IntegratorConfig& cfg, double t0,
                                 double t1);

/// Locates the minima of ||Phi|| and the switching events on a trajectory.
void locate_events(const ExtremalTrajectory& traj, const ControlLaw& law,
                   const RocketParams& params, const IntegratorConfig& cfg,
                   const EventOptions& opts, std::vector<PhiMinimum>& minima,
                   std::vector<SwitchEvent>& events);

struct SwitchDiagnosis {
  int order = 0;  ///< 0 = unresolved
  Vec2 a = Vec2::Zero();   ///< <p, ad f.g~i>
  Vec2 b = Vec2::Zero();   ///< <p, ad^2 f.g~i>
  Vec2 b3 = Vec2::Zero();  ///< <p, ad^3 f.g~i>
  double c = 0.0;          ///< <p, [g~2, ad^2 f.g~1]> = -p_phi
  /// Order-3 case only: c^2 < |b3|^2, so both one-sided controls exist.
  bool order3_regular = false;
  /// Order-4 branch: the crossed pairing vanishes, so chattering is possible.
  bool chattering_branch = false;
  /// <p, [g~1, ad^3 f.g~1]>, the sign entering the order-4 spiral.
  double h1_b1 = 0.0;
};

/// Order of a point of the switching surface from the successive bracket
/// pairings. Quantities below tol count as zero.
SwitchDiagnosis classify_switch(const ExtremalPoint& z,
                                const RocketParams& params, double tol = 1e-9);

struct ChatteringReport {
  bool flagged = false;
  double accumulation_time = 0.0;  ///< geometric-series extrapolation
  double singular_distance = 0.0;  ///< at the last event of the run
  int run_length = 0;              ///< number of shrinking gaps
  std::vector<double> gaps;
};

/// Ratio test on inter-event gaps: 4+ consecutive gaps each < 0.7 times the
/// previous one.
ChatteringReport detect_chattering(const std::vector<double>& event_times);
ChatteringReport detect_chattering(const ExtremalTrajectory& traj,
                                   const std::vector<SwitchEvent>& events);

struct TrajectorySample {
  double t = 0.0;
  Vec8 x = Vec8::Zero();
  Vec8 p = Vec8::Zero();
  Control u;
  double phi_norm = 0.0;
  double hamiltonian = 0.0;
};

/// Samples at t0, t0 + dt, ..., and always at tf.
std::vector<TrajectorySample> sample_trajectory(const ExtremalTrajectory& traj,
                                                const ControlLaw& law,
                                                const RocketParams& params,
                                                double dt);

/// Integral of u1^2 + u2^2 over the trajectory (Gauss-Legendre per step).
double control_energy(const ExtremalTrajectory& traj, const ControlLaw& law,
                      const RocketParams& params);

/// max |H| over the accepted step nodes and their midpoints.
double max_abs_hamiltonian(const ExtremalTrajectory& traj,
                           const ControlLaw& law, const RocketParams& params);

}  // namespace rocketopt
