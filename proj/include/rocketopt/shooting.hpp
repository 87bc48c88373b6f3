#pragma once

#include <optional>

#include "rocketopt/dop853.hpp"
#include "rocketopt/dynamics.hpp"
#include "rocketopt/nlsolve.hpp"
#include "rocketopt/ocp0.hpp"
#include "rocketopt/odeint.hpp"
#include "rocketopt/pmp.hpp"

namespace rocketopt {

/// p_vy is not an unknown: it follows from transversality.
struct ShootingUnknowns {
  double p_vx = 0.0;
  double p_vz = 0.0;
  double p_theta0 = 0.0;
  double p_psi0 = 0.0;
  double p_phi0 = 0.0;
  double p_omega_x0 = 0.0;
  double p_omega_y0 = 0.0;
  double t_f = 0.0;

  Vec8 pack() const;
  static ShootingUnknowns unpack(const Vec8& v);
};

/// Attitude and rates at t_f of the completed first stage.
struct StageEndpoint {
  double theta_e = 0.0;
  double psi_e = 0.0;
  double phi_e = 0.0;
  double omega_xe = 0.0;
  double omega_ye = 0.0;
};

struct StageContext {
  int stage = 1;
  double lambda = 0.0;
  double gamma = 50.0;
  TerminalSpec spec;
  Ocp0Solution sol0;
  /// Required for stages 2 and 3.
  std::optional<StageEndpoint> endpoint;
  /// Divide the two velocity-direction residuals by this speed so every
  /// component is O(1). Roots are unchanged.
  double velocity_scale = 1.0;
};

/// Homotopy on the initial attitude: (theta*, psi*, 0, 0, 0) at lambda1 = 0,
/// the spec's initial attitude at lambda1 = 1. Velocity stays at V0.
State initial_state_lambda1(double lambda1, const Ocp0Solution& sol0,
                            const TerminalSpec& spec);

/// Initial state of the extremal for ctx (stage 1 homotopy or the true
/// initial state for stages 2 and 3).
State stage_initial_state(const StageContext& ctx);

/// Extremal initial point: state per stage, costate from the unknowns with
/// p_vy eliminated, p0 = -1.
ExtremalPoint shooting_initial_point(const ShootingUnknowns& u,
                                     const StageContext& ctx);

/// regularized(gamma) for stages 1-2, blended(gamma, lambda) for stage 3.
ControlLaw stage_law(const StageContext& ctx);

Vec8 residual_s1(const ShootingUnknowns& u, const StageContext& ctx,
                 const RocketParams& params, const IntegratorConfig& cfg);
Vec8 residual_s2(const ShootingUnknowns& u, const StageContext& ctx,
                 const RocketParams& params, const IntegratorConfig& cfg);
Vec8 residual_s3(const ShootingUnknowns& u, const StageContext& ctx,
                 const RocketParams& params, const IntegratorConfig& cfg);

/// Dispatches on ctx.stage.
Vec8 shooting_residual(const ShootingUnknowns& u, const StageContext& ctx,
                       const RocketParams& params,
                       const IntegratorConfig& cfg);

/// Terminal-state part of a residual given z(t_f).
Vec8 terminal_shooting_residual(const ExtremalPoint& zf,
                                const StageContext& ctx,
                                const RocketParams& params);

/// Solver-space scale of the unknowns: t_f in units of 10 s, costates in
/// natural units.
Vec8 default_unknown_scale();

/// Integrates the extremal of a root for output.
ExtremalRun shooting_trajectory(const ShootingUnknowns& u,
                                const StageContext& ctx,
                                const RocketParams& params,
                                const IntegratorConfig& cfg,
                                const EventOptions& events = {});

}  // namespace rocketopt
