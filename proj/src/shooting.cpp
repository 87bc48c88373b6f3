#include "rocketopt/shooting.hpp"

#include <cmath>
#include <string>

#include "rocketopt/errors.hpp"

namespace rocketopt {

Vec8 ShootingUnknowns::pack() const {
  Vec8 v;
  v << p_vx, p_vz, p_theta0, p_psi0, p_phi0, p_omega_x0, p_omega_y0, t_f;
  return v;
}

ShootingUnknowns ShootingUnknowns::unpack(const Vec8& v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
}

State initial_state_lambda1(double lambda1, const Ocp0Solution& sol0,
                            const TerminalSpec& spec) {
  const State& x0 = spec.initial;
  const double l = lambda1;
  State x;
  x.set_velocity(x0.velocity());
  x.theta() = sol0.theta_star * (1.0 - l) + x0.theta() * l;
  x.psi() = sol0.psi_star * (1.0 - l) + x0.psi() * l;
  x.phi() = x0.phi() * l;
  x.omega_x() = x0.omega_x() * l;
  x.omega_y() = x0.omega_y() * l;
  return x;
}

State stage_initial_state(const StageContext& ctx) {
  if (ctx.stage == 1) return initial_state_lambda1(ctx.lambda, ctx.sol0, ctx.spec);
  return ctx.spec.initial;
}

ExtremalPoint shooting_initial_point(const ShootingUnknowns& u,
                                     const StageContext& ctx) {
  ExtremalPoint z;
  z.x = stage_initial_state(ctx);
  z.p.p0() = -1.0;
  z.p.p_vx() = u.p_vx;
  z.p.p_vz() = u.p_vz;
  z.p.p_vy() = eliminate_pvy(u.p_vx, u.p_vz, ctx.spec);
  z.p.p_theta() = u.p_theta0;
  z.p.p_psi() = u.p_psi0;
  z.p.p_phi() = u.p_phi0;
  z.p.p_omega_x() = u.p_omega_x0;
  z.p.p_omega_y() = u.p_omega_y0;
  return z;
}

ControlLaw stage_law(const StageContext& ctx) {
  if (ctx.stage == 3) return ControlLaw::blended(ctx.gamma, ctx.lambda);
  return ControlLaw::regularized(ctx.gamma);
}

Vec8 terminal_shooting_residual(const ExtremalPoint& zf,
                                const StageContext& ctx,
                                const RocketParams& params) {
  const ControlLaw law = stage_law(ctx);
  const Control uf = control_for(zf, params, law);
  const double h = hamiltonian(zf, uf, params, law);
  const Vec7 term = terminal_residuals(zf.x, ctx.spec);
  const double vs = ctx.velocity_scale > 0.0 ? ctx.velocity_scale : 1.0;
  const double vel1 = term[0] / vs;
  const double vel2 = term[1] / vs;
  Vec8 r;
  if (ctx.stage == 1) {
    r << zf.p.p_omega_x(), zf.p.p_omega_y(), zf.p.p_theta(), zf.p.p_psi(),
        zf.p.p_phi(), h, vel1, vel2;
    return r;
  }
  if (!ctx.endpoint) {
    throw Error(ErrorKind::kInvalidInput,
                "stage " + std::to_string(ctx.stage) +
                    " needs the recorded stage-1 endpoint");
  }
  const StageEndpoint& e = *ctx.endpoint;
  const double l = ctx.stage == 2 ? ctx.lambda : 1.0;
  const TerminalSpec& s = ctx.spec;
  r << zf.x.omega_x() - (1.0 - l) * e.omega_xe - l * s.omega_xf,
      zf.x.omega_y() - (1.0 - l) * e.omega_ye - l * s.omega_yf,
      zf.x.theta() - (1.0 - l) * e.theta_e - l * s.theta_f,
      zf.x.psi() - (1.0 - l) * e.psi_e - l * s.psi_f,
      zf.x.phi() - (1.0 - l) * e.phi_e - l * s.phi_f, vel1, vel2, h;
  return r;
}

namespace {

Vec8 integrate_and_compare(const ShootingUnknowns& u, const StageContext& ctx,
                           const RocketParams& params,
                           const IntegratorConfig& cfg) {
  if (!(u.t_f > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "shooting: t_f must be positive");
  }
  const ExtremalPoint z0 = shooting_initial_point(u, ctx);
  const ExtremalPoint zf =
      propagate_extremal(z0, stage_law(ctx), params, cfg, 0.0, u.t_f);
  return terminal_shooting_residual(zf, ctx, params);
}

void require_stage(const StageContext& ctx, int stage) {
  if (ctx.stage != stage) {
    throw Error(ErrorKind::kInvalidInput,
                "residual_s" + std::to_string(stage) + " called with stage " +
                    std::to_string(ctx.stage));
  }
}

}  // namespace

Vec8 residual_s1(const ShootingUnknowns& u, const StageContext& ctx,
                 const RocketParams& params, const IntegratorConfig& cfg) {
  require_stage(ctx, 1);
  return integrate_and_compare(u, ctx, params, cfg);
}

Vec8 residual_s2(const ShootingUnknowns& u, const StageContext& ctx,
                 const RocketParams& params, const IntegratorConfig& cfg) {
  require_stage(ctx, 2);
  return integrate_and_compare(u, ctx, params, cfg);
}

Vec8 residual_s3(const ShootingUnknowns& u, const StageContext& ctx,
                 const RocketParams& params, const IntegratorConfig& cfg) {
  require_stage(ctx, 3);
  return integrate_and_compare(u, ctx, params, cfg);
}

Vec8 shooting_residual(const ShootingUnknowns& u, const StageContext& ctx,
                       const RocketParams& params,
                       const IntegratorConfig& cfg) {
  switch (ctx.stage) {
    case 1: return residual_s1(u, ctx, params, cfg);
    case 2: return residual_s2(u, ctx, params, cfg);
    case 3: return residual_s3(u, ctx, params, cfg);
    default:
      throw Error(ErrorKind::kInvalidInput, "shooting: stage must be 1, 2 or 3");
  }
}

Vec8 default_unknown_scale() {
  Vec8 s;
  s << 1, 1, 1, 1, 1, 1, 1, 10;
  return s;
}

ExtremalRun shooting_trajectory(const ShootingUnknowns& u,
                                const StageContext& ctx,
                                const RocketParams& params,
                                const IntegratorConfig& cfg,
                                const EventOptions& events) {
  return integrate_extremal(shooting_initial_point(u, ctx), stage_law(ctx),
                            params, cfg, 0.0, u.t_f, events);
}

}  // namespace rocketopt
