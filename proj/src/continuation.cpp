#include "rocketopt/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <Eigen/QR>

#include "rocketopt/errors.hpp"

namespace rocketopt {

ContinuationOptions::ContinuationOptions() {
  solver.tol = 1e-9;
  solver.max_iter = 40;
  solver.fd_step = 1e-7;
  solver.scale = default_unknown_scale();
}

ShootingUnknowns predict(const std::vector<ContinuationEntry>& history,
                         double lambda_next) {
  if (history.empty()) {
    throw Error(ErrorKind::kInvalidInput, "predict: empty history");
  }
  const std::size_t m = std::min<std::size_t>(4, history.size());
  const std::size_t first = history.size() - m;
  Vec8 out = Vec8::Zero();
  for (std::size_t i = first; i < history.size(); ++i) {
    double w = 1.0;
    for (std::size_t j = first; j < history.size(); ++j) {
      if (j == i) continue;
      w *= (lambda_next - history[j].lambda) /
           (history[i].lambda - history[j].lambda);
    }
    out += w * history[i].unknowns.pack();
  }
  return ShootingUnknowns::unpack(out);
}

double adapt_step(bool success, double step, const ContinuationOptions& opts,
                  bool& stall) {
  stall = false;
  if (success) return std::min(step * opts.grow, opts.step_max);
  const double next = step * opts.shrink;
  if (next < opts.step_min) stall = true;
  return next;
}

namespace {

struct Corrector {
  const RocketParams& params;
  const ContinuationOptions& opts;
  std::string last_error;

  /// Residual at (u, ctx.lambda); NaN on integration failure.
  Vec8 residual(const StageContext& ctx, const Vec8& u) {
    try {
      return shooting_residual(ShootingUnknowns::unpack(u), ctx, params,
                               opts.integrator);
    } catch (const Error& e) {
      last_error = e.what();
      return Vec8::Constant(std::numeric_limits<double>::quiet_NaN());
    }
  }

  SolveReport operator()(const StageContext& ctx, const ShootingUnknowns& guess) {
    last_error.clear();
    Residual f = [&](const VecX& v) -> VecX {
      try {
        const Vec8 r = shooting_residual(ShootingUnknowns::unpack(v), ctx,
                                         params, opts.integrator);
        return r;
      } catch (const Error& e) {
        last_error = e.what();
        return VecX::Constant(8, std::numeric_limits<double>::quiet_NaN());
      }
    };
    const Vec8 x0 = guess.pack();
    SolveOptions so = opts.solver;
    if (opts.adaptive_scale) {
      // Scale each unknown by its own magnitude: p_v is three orders of
      // magnitude below p_omega and the fixed scale leaves the Jacobian
      // badly conditioned near lambda3 = 1.
      so.scale = VecX(8);
      for (int i = 0; i < 8; ++i) {
        so.scale[i] = std::max(std::abs(x0[i]), opts.scale_floor);
      }
    }
    return solve(f, x0, so);
  }
};

void report(const ContinuationOptions& opts, int stage, double lambda,
            double step, const SolveReport& rep, const std::string& note) {
  if (!opts.progress) return;
  opts.progress({stage, lambda, step, rep.iterations, rep.residual_norm,
                 rep.converged(), note});
}

using Vec9 = Eigen::Matrix<double, 9, 1>;

// Pseudo-arclength continuation in (unknowns, lambda), started from the last
// stored entry after natural continuation has stalled at a fold. Entries are
// stored only when lambda exceeds every lambda already stored, so the record
// stays increasing. Returns true once a root at lambda = 1 is stored.
bool arclength_stage(StageRun& run, StageContext ctx, Corrector& corrector,
                     const ContinuationOptions& opts) {
  const auto& last = run.entries.back();
  const Vec8 u0 = last.unknowns.pack();
  Vec8 scale;
  for (int i = 0; i < 8; ++i) {
    scale[i] = std::max(std::abs(u0[i]), i < 2 ? 1e-3 : 1.0);
  }
  auto F = [&](const VecX& y) -> VecX {
    StageContext c = ctx;
    c.lambda = y[8];
    return corrector.residual(c, y.head<8>().cwiseProduct(scale));
  };
  auto jacobian = [&](const Vec9& y, const VecX& fy) {
    return fd_jacobian(F, y, fy, opts.solver.fd_step, VecX::Ones(9),
                       opts.solver.parallel_jacobian);
  };
  auto tangent = [](const MatX& J, const Vec9& orient) {
    Eigen::FullPivLU<MatX> lu(J);
    Vec9 t = lu.kernel().col(0);
    t.normalize();
    return t.dot(orient) < 0.0 ? Vec9(-t) : t;
  };
  auto store = [&](const Vec9& y, const VecX& fy, int iterations) {
    SolveReport rep;
    rep.root = y.head<8>().cwiseProduct(scale);
    rep.residual_norm = fy.lpNorm<Eigen::Infinity>();
    rep.iterations = iterations;
    rep.status = SolveStatus::kConverged;
    run.entries.push_back(
        {y[8], ShootingUnknowns::unpack(Vec8(rep.root)), rep});
  };

  Vec9 y;
  y.head<8>() = u0.cwiseQuotient(scale);
  y[8] = last.lambda;
  Vec9 orient = Vec9::Zero();
  orient[8] = 1.0;
  if (run.entries.size() >= 2) {
    const auto& prev = run.entries[run.entries.size() - 2];
    orient.head<8>() =
        (u0 - prev.unknowns.pack()).cwiseQuotient(scale);
    orient[8] = last.lambda - prev.lambda;
  }
  VecX fy = F(y);
  Vec9 t = tangent(jacobian(y, fy), orient);
  double ds = opts.arclength_step;

  for (int step = 0; step < opts.arclength_max_steps; ++step) {
    const Vec9 ypred = y + ds * t;
    Vec9 z = ypred;
    VecX fz;
    bool ok = false;
    int it = 0;
    for (; it < 15; ++it) {
      fz = F(z);
      if (!fz.allFinite()) break;
      if (it > 0 && fz.lpNorm<Eigen::Infinity>() <= opts.solver.tol) {
        ok = true;
        break;
      }
      MatX A(9, 9);
      A.topRows(8) = jacobian(z, fz);
      A.row(8) = t.transpose();
      VecX b(9);
      b.head(8) = -fz;
      b[8] = -(z - ypred).dot(t);
      z += A.colPivHouseholderQr().solve(b);
    }
    ok = ok && z[7] > 0.0;
    if (opts.progress) {
      opts.progress({ctx.stage, z[8], ds, it,
                     fz.size() ? fz.lpNorm<Eigen::Infinity>() : 0.0, ok,
                     "arclength"});
    }
    if (!ok) {
      ds *= 0.5;
      if (ds < opts.arclength_step_min) return false;
      continue;
    }
    if (z[8] >= 1.0) {
      // Land exactly on lambda = 1 from the secant through y and z.
      const double s = (1.0 - y[8]) / (z[8] - y[8]);
      const Vec9 guess = y + s * (z - y);
      ctx.lambda = 1.0;
      SolveReport rep = corrector(
          ctx, ShootingUnknowns::unpack(
                   Vec8(guess.head<8>().cwiseProduct(scale))));
      if (!rep.converged()) return false;
      run.entries.push_back(
          {1.0, ShootingUnknowns::unpack(Vec8(rep.root)), rep});
      return true;
    }
    if (z[8] > run.entries.back().lambda) store(z, fz, it);
    if (z[8] < -0.5) return false;
    t = tangent(jacobian(z, fz), t);
    y = z;
    ds = std::min(ds * 1.3, opts.arclength_step);
  }
  return false;
}

// Runs one stage from lambda = 0 to 1. The entry at lambda = 0 must already
// be in `run.entries`. Returns false on stall.
bool run_stage(StageRun& run, StageContext ctx, Corrector& corrector,
               const ContinuationOptions& opts, std::optional<StallInfo>& stall) {
  double lambda = run.entries.back().lambda;
  double step = opts.initial_step;
  while (lambda < 1.0) {
    const double target = std::min(1.0, lambda + step);
    ctx.lambda = target;
    const ShootingUnknowns guess = predict(run.entries, target);
    SolveReport rep = corrector(ctx, guess);
    const bool ok = rep.converged() && rep.root[7] > 0.0;
    report(opts, ctx.stage, target, step, rep, corrector.last_error);
    bool stalled = false;
    if (ok) {
      run.entries.push_back(
          {target, ShootingUnknowns::unpack(Vec8(rep.root)), rep});
      lambda = target;
      step = adapt_step(true, step, opts, stalled);
    } else {
      step = adapt_step(false, step, opts, stalled);
      if (stalled && ctx.stage < 3 && opts.fold_fallback &&
          arclength_stage(run, ctx, corrector, opts)) {
        break;
      }
      if (stalled) {
        std::string reason = "corrector failed below minimum step (" +
                             std::string(to_string(rep.status)) + ")";
        if (!corrector.last_error.empty()) {
          reason += ": " + corrector.last_error;
        }
        stall = StallInfo{ctx.stage, run.entries.back().lambda, reason};
        return false;
      }
    }
  }
  run.completed = true;
  return true;
}

}  // namespace

PipelineResult run_pipeline(const TerminalSpec& spec,
                            const RocketParams& params,
                            const ContinuationOptions& opts) {
  PipelineResult out;
  ContinuationRun& run = out.run;
  run.ocp0 = solve_ocp0(spec, params);
  if (run.ocp0.zero_time) {
    throw Error(ErrorKind::kInfeasibleOcp0,
                "run_pipeline: initial velocity already along the target axis");
  }
  const ExtremalPoint z0 = embed_extremal(run.ocp0, opts.phi_star, params);

  StageContext ctx;
  ctx.stage = 1;
  ctx.lambda = 0.0;
  ctx.gamma = opts.gamma;
  ctx.spec = spec;
  ctx.sol0 = run.ocp0;
  ctx.velocity_scale = std::max(1.0, spec.initial.velocity().norm());

  Corrector corrector{params, opts, {}};
  for (int s = 0; s < 3; ++s) run.stages[s].stage = s + 1;

  ShootingUnknowns seed;
  seed.p_vx = z0.p.p_vx();
  seed.p_vz = z0.p.p_vz();
  seed.t_f = run.ocp0.t_f;

  auto finish = [&](const StageContext& c, const ShootingUnknowns& u) {
    out.final_context = c;
    out.final_unknowns = u;
    out.law = stage_law(c);
    EventOptions ev;
    out.extremal = shooting_trajectory(u, c, params, opts.integrator, ev);
    out.t_f = u.t_f;
    out.cost = u.t_f + out.law.penalty_weight() *
                           control_energy(out.extremal.trajectory, out.law,
                                          params);
    out.max_abs_h =
        max_abs_hamiltonian(out.extremal.trajectory, out.law, params);
    out.chattering =
        detect_chattering(out.extremal.trajectory, out.extremal.events);
    return out;
  };

  // Stage 1, lambda1 = 0: corrector on the embedded OCP0 extremal.
  {
    SolveReport rep = corrector(ctx, seed);
    report(opts, 1, 0.0, 0.0, rep, corrector.last_error);
    if (!rep.converged()) {
      run.stall = StallInfo{1, 0.0, "no root at lambda1 = 0"};
      out.final_context = ctx;
      out.final_unknowns = seed;
      return out;
    }
    run.stages[0].entries.push_back(
        {0.0, ShootingUnknowns::unpack(Vec8(rep.root)), rep});
  }
  if (!run_stage(run.stages[0], ctx, corrector, opts, run.stall)) {
    ctx.lambda = run.stall->lambda_star;
    return finish(ctx, run.stages[0].entries.back().unknowns);
  }

  // Record the free endpoint of the completed first stage.
  ctx.lambda = 1.0;
  const ShootingUnknowns u1 = run.stages[0].entries.back().unknowns;
  {
    const ExtremalPoint zf = propagate_extremal(
        shooting_initial_point(u1, ctx), stage_law(ctx), params,
        opts.integrator, 0.0, u1.t_f);
    run.endpoint = StageEndpoint{zf.x.theta(), zf.x.psi(), zf.x.phi(),
                                 zf.x.omega_x(), zf.x.omega_y()};
  }

  for (int stage = 2; stage <= 3; ++stage) {
    ctx.stage = stage;
    ctx.lambda = 0.0;
    ctx.endpoint = run.endpoint;
    StageRun& sr = run.stages[stage - 1];
    const ShootingUnknowns start = run.stages[stage - 2].entries.back().unknowns;
    SolveReport rep = corrector(ctx, start);
    report(opts, stage, 0.0, 0.0, rep, corrector.last_error);
    if (!rep.converged()) {
      run.stall = StallInfo{stage, 0.0, "no root at lambda = 0"};
      StageContext prev = ctx;
      prev.stage = stage - 1;
      prev.lambda = 1.0;
      return finish(prev, start);
    }
    sr.entries.push_back({0.0, ShootingUnknowns::unpack(Vec8(rep.root)), rep});
    if (!run_stage(sr, ctx, corrector, opts, run.stall)) {
      ctx.lambda = run.stall->lambda_star;
      return finish(ctx, sr.entries.back().unknowns);
    }
  }
  ctx.lambda = 1.0;
  out.reached_min_time = true;
  return finish(ctx, run.stages[2].entries.back().unknowns);
}

SubOptimalSummary extract_suboptimal(const PipelineResult& result,
                                     const RocketParams& params,
                                     double sample_dt) {
  SubOptimalSummary s;
  s.lambda3_star = result.final_context.stage == 3 ? result.final_context.lambda
                                                   : 0.0;
  s.t_f = result.t_f;
  s.cost = result.cost;
  s.sample_dt = sample_dt;
  const auto& traj = result.extremal.trajectory;
  if (traj.empty()) return s;
  const auto samples = sample_trajectory(traj, result.law, params, sample_dt);
  double bound = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (k > 0) {
      s.max_control_jump =
          std::max(s.max_control_jump,
                   (samples[k].u.vec() - samples[k - 1].u.vec()).norm());
    }
    // |du/dt| <= 2 sqrt(2) b_bar |dp_omega/dt| / denominator for the
    // saturated blended law.
    const ExtremalPoint z = traj.point(samples[k].t);
    const Vec8 dp = adjoint_rhs(z, samples[k].u, params);
    const double pw = std::hypot(z.p.p_omega_x(), z.p.p_omega_y());
    const double lambda3 =
        result.law.mode == ControlLaw::Mode::kBlended ? result.law.lambda3 : 0.0;
    const double denom = 2.0 * result.law.gamma * (1.0 - lambda3) +
                         params.b_bar * lambda3 * pw;
    const double rate = std::hypot(dp[kOmegaX], dp[kOmegaY]);
    bound = std::max(bound, denom > 0.0
                                ? 2.0 * std::sqrt(2.0) * params.b_bar * rate / denom
                                : std::numeric_limits<double>::infinity());
  }
  s.control_continuous =
      result.law.mode != ControlLaw::Mode::kMinTime &&
      s.max_control_jump <= 1.01 * bound * sample_dt;
  return s;
}

}  // namespace rocketopt
