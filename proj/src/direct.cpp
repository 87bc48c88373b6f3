#include "rocketopt/direct.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <memory>

#include <Eigen/Dense>

#include "rocketopt/errors.hpp"
#include "rocketopt/liealgebra.hpp"
#include "rocketopt/ocp0.hpp"
#include "rocketopt/pmp.hpp"

namespace rocketopt {

std::vector<ConstraintSet> default_stage_plan() {
  using C = TerminalConstraint;
  ConstraintSet s1{C::kOmegaY, C::kTheta, C::kVelocityTheta};
  ConstraintSet s2 = s1;
  s2.push_back(C::kVelocityPsi);
  ConstraintSet s3 = s2;
  s3.push_back(C::kPsi);
  ConstraintSet s4 = s3;
  s4.push_back(C::kPhi);
  ConstraintSet s5 = s4;
  s5.push_back(C::kOmegaX);
  return {s1, s2, s3, s4, s5};
}

namespace {

// Gradient of terminal_residuals()[i] with respect to the state.
Vec8 terminal_gradient(TerminalConstraint c, const TerminalSpec& spec) {
  Vec8 g = Vec8::Zero();
  const double stf = std::sin(spec.theta_f), ctf = std::cos(spec.theta_f);
  const double spf = std::sin(spec.psi_f), cpf = std::cos(spec.psi_f);
  switch (c) {
    case TerminalConstraint::kVelocityPsi:
      g[kVy] = ctf * cpf;
      g[kVz] = spf;
      break;
    case TerminalConstraint::kVelocityTheta:
      g[kVx] = -ctf;
      g[kVz] = stf;
      break;
    case TerminalConstraint::kTheta: g[kTheta] = 1.0; break;
    case TerminalConstraint::kPsi: g[kPsi] = 1.0; break;
    case TerminalConstraint::kPhi: g[kPhi] = 1.0; break;
    case TerminalConstraint::kOmegaX: g[kOmegaX] = 1.0; break;
    case TerminalConstraint::kOmegaY: g[kOmegaY] = 1.0; break;
  }
  return g;
}

struct Step {
  Vec8 y[4];  // stage inputs
  Vec8 f[4];  // rhs at the stage inputs
};

// RK4 forward/adjoint propagation over the normalized mesh. Decision vector
// layout: [t_f / tf_scale, u1_0, u2_0, u1_1, ...].
class Propagator {
 public:
  Propagator(const TerminalSpec& spec, const RocketParams& params, int n,
             int substeps)
      : spec_(spec), params_(params), n_(n), m_(substeps),
        h_(1.0 / (n * substeps)), steps_(static_cast<std::size_t>(n) * substeps) {}

  // Returns false and sets violation_time on an Euler singularity.
  bool forward(double t_f, const VecX& y, double& violation_time) {
    Vec8 x = spec_.initial.vec();
    nodes_.assign(1, x);
    for (int k = 0; k < n_; ++k) {
      const Control u{y[1 + 2 * k], y[2 + 2 * k]};
      for (int j = 0; j < m_; ++j) {
        Step& s = steps_[static_cast<std::size_t>(k) * m_ + j];
        try {
          s.y[0] = x;
          s.f[0] = rhs(State(s.y[0]), u, params_);
          s.y[1] = x + 0.5 * h_ * t_f * s.f[0];
          s.f[1] = rhs(State(s.y[1]), u, params_);
          s.y[2] = x + 0.5 * h_ * t_f * s.f[1];
          s.f[2] = rhs(State(s.y[2]), u, params_);
          s.y[3] = x + h_ * t_f * s.f[2];
          s.f[3] = rhs(State(s.y[3]), u, params_);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::kEulerSingularity) throw;
          violation_time = t_f * h_ * (static_cast<double>(k) * m_ + j);
          return false;
        }
        x += h_ * t_f / 6.0 * (s.f[0] + 2.0 * s.f[1] + 2.0 * s.f[2] + s.f[3]);
        nodes_.push_back(x);
      }
    }
    return true;
  }

  // Reverse sweep from dL/dx(t_f) = lam_end. Accumulates dL/dt_f (natural
  // units) and dL/du into grad (u slots only) and stores the adjoint at every
  // node when `adjoint` is non-null.
  double backward(double t_f, const VecX& y, const Vec8& lam_end, VecX& grad,
                  std::vector<Vec8>* adjoint) const {
    Vec8 lam = lam_end;
    double dtf = 0.0;
    if (adjoint) adjoint->assign(nodes_.size(), Vec8::Zero());
    if (adjoint) adjoint->back() = lam;
    const double bb = params_.b_bar;
    auto jt = [&](const Vec8& x, const Vec8& a) -> Vec8 {
      const ExtremalPoint z{State(x), Costate(a)};
      return -t_f * adjoint_rhs(z, Control{}, params_);
    };
    for (int k = n_ - 1; k >= 0; --k) {
      double du1 = 0.0, du2 = 0.0;
      for (int j = m_ - 1; j >= 0; --j) {
        const Step& s = steps_[static_cast<std::size_t>(k) * m_ + j];
        const Vec8 a4 = h_ / 6.0 * lam;
        const Vec8 g4 = jt(s.y[3], a4);
        const Vec8 a3 = h_ / 3.0 * lam + h_ * g4;
        const Vec8 g3 = jt(s.y[2], a3);
        const Vec8 a2 = h_ / 3.0 * lam + 0.5 * h_ * g3;
        const Vec8 g2 = jt(s.y[1], a2);
        const Vec8 a1 = h_ / 6.0 * lam + 0.5 * h_ * g2;
        const Vec8 g1 = jt(s.y[0], a1);
        const Vec8 asum = a1 + a2 + a3 + a4;
        du1 += t_f * bb * asum[kOmegaY];
        du2 -= t_f * bb * asum[kOmegaX];
        dtf += a1.dot(s.f[0]) + a2.dot(s.f[1]) + a3.dot(s.f[2]) +
               a4.dot(s.f[3]);
        lam += g1 + g2 + g3 + g4;
        if (adjoint) (*adjoint)[static_cast<std::size_t>(k) * m_ + j] = lam;
      }
      grad[1 + 2 * k] += du1;
      grad[2 + 2 * k] += du2;
    }
    (void)y;
    return dtf;
  }

  const std::vector<Vec8>& nodes() const { return nodes_; }
  double h() const { return h_; }
  int substeps() const { return m_; }

 private:
  const TerminalSpec& spec_;
  const RocketParams& params_;
  int n_, m_;
  double h_;
  std::vector<Step> steps_;
  std::vector<Vec8> nodes_;
};

// Augmented Lagrangian of one stage:
//   t_f / tf_scale + nu . c + mu / 2 |c|^2,  c = weighted active residuals.
class StageProblem {
 public:
  StageProblem(const TerminalSpec& spec, const RocketParams& params,
               const ConstraintSet& active, int n, int substeps,
               double tf_scale)
      : spec_(spec), active_(active), prop_(spec, params, n, substeps),
        tf_scale_(tf_scale), weights_(active.size()) {
    const double vscale = std::max(1.0, spec.initial.velocity().norm());
    for (std::size_t i = 0; i < active.size(); ++i) {
      const bool velocity = active[i] == TerminalConstraint::kVelocityPsi ||
                            active[i] == TerminalConstraint::kVelocityTheta;
      weights_[static_cast<Eigen::Index>(i)] = velocity ? 1.0 / vscale : 1.0;
    }
    nu_ = VecX::Zero(static_cast<Eigen::Index>(active.size()));
  }

  double tf_scale() const { return tf_scale_; }
  VecX& nu() { return nu_; }
  double& mu() { return mu_; }

  // Weighted active residuals; false on Euler singularity.
  bool constraints(const VecX& y, VecX& c) {
    double tv = 0.0;
    if (!prop_.forward(y[0] * tf_scale_, y, tv)) return false;
    c = weighted(prop_.nodes().back());
    return true;
  }

  VecX weighted(const Vec8& xf) const {
    const Vec7 r = terminal_residuals(State(xf), spec_);
    VecX c(static_cast<Eigen::Index>(active_.size()));
    for (std::size_t i = 0; i < active_.size(); ++i) {
      c[static_cast<Eigen::Index>(i)] =
          weights_[static_cast<Eigen::Index>(i)] *
          r[static_cast<int>(active_[i])];
    }
    return c;
  }

  VecX natural(const VecX& c) const { return c.cwiseQuotient(weights_); }

  // Value and gradient of the augmented Lagrangian. Returns +inf on an
  // Euler singularity.
  double value_grad(const VecX& y, VecX* grad) {
    double tv = 0.0;
    const double t_f = y[0] * tf_scale_;
    if (!prop_.forward(t_f, y, tv)) {
      return std::numeric_limits<double>::infinity();
    }
    const VecX c = weighted(prop_.nodes().back());
    const double val = y[0] + nu_.dot(c) + 0.5 * mu_ * c.squaredNorm();
    if (!std::isfinite(val)) return std::numeric_limits<double>::infinity();
    if (grad) {
      const VecX m = nu_ + mu_ * c;
      grad->setZero(y.size());
      const double dtf =
          prop_.backward(t_f, y, terminal_adjoint(m), *grad, nullptr);
      (*grad)[0] = 1.0 + dtf * tf_scale_;
    }
    return val;
  }

  Vec8 terminal_adjoint(const VecX& m) const {
    Vec8 lam = Vec8::Zero();
    for (std::size_t i = 0; i < active_.size(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      lam += m[ii] * weights_[ii] * terminal_gradient(active_[i], spec_);
    }
    return lam;
  }

  // Jacobian of the weighted constraints with respect to y (after forward()).
  MatX constraint_jacobian(const VecX& y) {
    const auto m = static_cast<Eigen::Index>(active_.size());
    MatX J(m, y.size());
    const double t_f = y[0] * tf_scale_;
    for (Eigen::Index i = 0; i < m; ++i) {
      VecX e = VecX::Zero(m);
      e[i] = 1.0;
      VecX g = VecX::Zero(y.size());
      g[0] = prop_.backward(t_f, y, terminal_adjoint(e), g, nullptr) *
             tf_scale_;
      J.row(i) = g.transpose();
    }
    return J;
  }

  // Costate estimate at every node for multipliers m (weighted units).
  std::vector<Vec8> costates(const VecX& y, const VecX& m) {
    std::vector<Vec8> adj;
    VecX g = VecX::Zero(y.size());
    prop_.backward(y[0] * tf_scale_, y, terminal_adjoint(m), g, &adj);
    // The objective is t_f / tf_scale; rescale to the p0 = -1 normalization.
    for (auto& a : adj) a = -tf_scale_ * a;
    return adj;
  }

  Propagator& propagator() { return prop_; }

 private:
  const TerminalSpec& spec_;
  ConstraintSet active_;
  Propagator prop_;
  double tf_scale_;
  VecX weights_;
  VecX nu_;
  double mu_ = 10.0;
};

void project(VecX& y, double y0_min) {
  y[0] = std::max(y[0], y0_min);
  const Eigen::Index n = (y.size() - 1) / 2;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double r = std::hypot(y[1 + 2 * k], y[2 + 2 * k]);
    if (r > 1.0) {
      y[1 + 2 * k] /= r;
      y[2 + 2 * k] /= r;
    }
  }
}

double projected_gradient_norm(const VecX& y, const VecX& g, double y0_min) {
  VecX t = y - g;
  project(t, y0_min);
  return (t - y).lpNorm<Eigen::Infinity>();
}

struct InnerResult {
  int iterations = 0;
  bool converged = false;
};

// Projected L-BFGS with Armijo backtracking along the projection arc; falls
// back to a projected gradient step when the quasi-Newton direction does not
// descend after projection.
InnerResult minimize_projected(StageProblem& prob, VecX& y, double y0_min,
                               double tol, int max_iter, int memory) {
  InnerResult res;
  VecX g(y.size());
  double f = prob.value_grad(y, &g);
  if (!std::isfinite(f)) return res;
  std::deque<std::pair<VecX, VecX>> mem;
  double bb = 1.0 / std::max(1.0, g.lpNorm<Eigen::Infinity>());

  for (int it = 0; it < max_iter; ++it) {
    res.iterations = it;
    if (projected_gradient_norm(y, g, y0_min) <= tol) {
      res.converged = true;
      return res;
    }
    VecX d;
    if (mem.empty()) {
      d = -bb * g;
    } else {
      // Two-loop recursion.
      VecX q = g;
      std::vector<double> alpha(mem.size());
      for (int i = static_cast<int>(mem.size()) - 1; i >= 0; --i) {
        const auto& [s, yv] = mem[static_cast<std::size_t>(i)];
        alpha[static_cast<std::size_t>(i)] = s.dot(q) / yv.dot(s);
        q -= alpha[static_cast<std::size_t>(i)] * yv;
      }
      const auto& [sl, yl] = mem.back();
      q *= sl.dot(yl) / yl.dot(yl);
      for (std::size_t i = 0; i < mem.size(); ++i) {
        const auto& [s, yv] = mem[i];
        const double beta = yv.dot(q) / yv.dot(s);
        q += (alpha[i] - beta) * s;
      }
      d = -q;
    }

    bool accepted = false;
    VecX ynew, gnew(y.size());
    double fnew = f;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      if (attempt == 1) d = -bb * g;
      double a = 1.0;
      for (int ls = 0; ls < 40; ++ls) {
        ynew = y + a * d;
        project(ynew, y0_min);
        const double decrease = g.dot(ynew - y);
        if (decrease >= 0.0) {
          if ((ynew - y).lpNorm<Eigen::Infinity>() < 1e-15) break;
          a *= 0.5;
          continue;
        }
        fnew = prob.value_grad(ynew, &gnew);
        if (std::isfinite(fnew) && fnew <= f + 1e-4 * decrease) {
          accepted = true;
          break;
        }
        a *= 0.5;
      }
      if (!accepted) mem.clear();
    }
    if (!accepted) return res;

    const VecX s = ynew - y;
    const VecX yv = gnew - g;
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      mem.emplace_back(s, yv);
      if (static_cast<int>(mem.size()) > memory) mem.pop_front();
      bb = sy / yv.squaredNorm();
    }
    y = ynew;
    g = gnew;
    f = fnew;
  }
  res.iterations = max_iter;
  return res;
}

// Minimum-norm Newton corrections on the active constraints, moving only
// t_f and the controls strictly inside their disks.
void restore_feasibility(StageProblem& prob, VecX& y, double y0_min,
                         double tol_weighted) {
  for (int it = 0; it < 8; ++it) {
    VecX c;
    if (!prob.constraints(y, c)) return;
    if (c.lpNorm<Eigen::Infinity>() <= tol_weighted) return;
    MatX J = prob.constraint_jacobian(y);
    const Eigen::Index n = (y.size() - 1) / 2;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (std::hypot(y[1 + 2 * k], y[2 + 2 * k]) >= 1.0 - 1e-9) {
        J.col(1 + 2 * k).setZero();
        J.col(2 + 2 * k).setZero();
      }
    }
    const MatX JJt = J * J.transpose();
    const VecX w = JJt.ldlt().solve(-c);
    VecX ynew = y + J.transpose() * w;
    project(ynew, y0_min);
    VecX cnew;
    if (!prob.constraints(ynew, cnew) ||
        cnew.lpNorm<Eigen::Infinity>() >= c.lpNorm<Eigen::Infinity>()) {
      return;
    }
    y = ynew;
  }
}

}  // namespace

TranscriptionEval transcription_residuals(const Transcription& z,
                                          const TerminalSpec& spec,
                                          const RocketParams& params,
                                          const ConstraintSet& active,
                                          int substeps) {
  if (z.segments() < 1 || substeps < 1 || !std::isfinite(z.t_f) ||
      !(z.t_f > 0.0)) {
    throw Error(ErrorKind::kInvalidInput,
                "transcription_residuals: need N >= 1, substeps >= 1, finite t_f > 0");
  }
  VecX y(1 + 2 * z.segments());
  y[0] = 1.0;
  for (int k = 0; k < z.segments(); ++k) {
    if (!std::isfinite(z.u[static_cast<std::size_t>(k)].u1) ||
        !std::isfinite(z.u[static_cast<std::size_t>(k)].u2)) {
      throw Error(ErrorKind::kInvalidInput,
                  "transcription_residuals: non-finite control");
    }
    y[1 + 2 * k] = z.u[static_cast<std::size_t>(k)].u1;
    y[2 + 2 * k] = z.u[static_cast<std::size_t>(k)].u2;
  }
  Propagator prop(spec, params, z.segments(), substeps);
  TranscriptionEval out;
  out.objective = z.t_f;
  out.feasible = prop.forward(z.t_f, y, out.violation_time);
  if (!out.feasible) return out;
  out.nodes.reserve(prop.nodes().size());
  for (const auto& x : prop.nodes()) out.nodes.emplace_back(x);
  const Vec7 r = terminal_residuals(out.nodes.back(), spec);
  out.residuals.resize(static_cast<Eigen::Index>(active.size()));
  for (std::size_t i = 0; i < active.size(); ++i) {
    out.residuals[static_cast<Eigen::Index>(i)] = r[static_cast<int>(active[i])];
  }
  return out;
}

MatX transcription_jacobian(const Transcription& z, const TerminalSpec& spec,
                            const RocketParams& params,
                            const ConstraintSet& active, int substeps) {
  const int n = z.segments();
  if (n < 1 || substeps < 1 || !(z.t_f > 0.0))
    throw Error(ErrorKind::kInvalidInput, "transcription_jacobian: bad input");
  StageProblem prob(spec, params, active, n, substeps, 1.0);
  VecX y(1 + 2 * n);
  y[0] = z.t_f;
  for (int k = 0; k < n; ++k) {
    y[1 + 2 * k] = z.u[static_cast<std::size_t>(k)].u1;
    y[2 + 2 * k] = z.u[static_cast<std::size_t>(k)].u2;
  }
  VecX c;
  if (!prob.constraints(y, c))
    throw Error(ErrorKind::kEulerSingularity,
                "transcription_jacobian: Euler singularity");
  MatX J = prob.constraint_jacobian(y);
  const VecX w = prob.natural(VecX::Ones(c.size()));
  for (Eigen::Index i = 0; i < J.rows(); ++i) J.row(i) *= w[i];
  return J;
}

DirectResult solve_direct(const TerminalSpec& spec, const RocketParams& params,
                          const DirectOptions& opts) {
  if (opts.segments < 20 || opts.substeps < 1 || opts.stage_plan.empty()) {
    throw Error(ErrorKind::kInvalidInput,
                "solve_direct: need N >= 20, substeps >= 1, a stage plan");
  }
  const int n = opts.segments;
  // The closed-form problem relaxes the attitude dynamics, so its time is a
  // lower bound on t_f. Without it t_f = 0 is a spurious stationary point:
  // the residuals stop depending on the controls there.
  double tf_lower = 0.0;
  try {
    const Ocp0Solution s0 = solve_ocp0(spec, params);
    if (!s0.zero_time) tf_lower = s0.t_f;
  } catch (const Error&) {
  }
  double tf0 = opts.t_f_guess;
  if (!(tf0 > 0.0)) tf0 = tf_lower > 0.0 ? 2.0 * tf_lower : 30.0;
  const double y0_min = tf_lower / tf0;

  VecX y(1 + 2 * n);
  y[0] = 1.0;
  for (int k = 0; k < n; ++k) {
    y[1 + 2 * k] = opts.initial_control.u1;
    y[2 + 2 * k] = opts.initial_control.u2;
  }
  project(y, y0_min);

  DirectResult out;
  VecX last_multipliers;
  std::unique_ptr<StageProblem> prob;
  for (std::size_t st = 0; st < opts.stage_plan.size(); ++st) {
    // Warm start: controls, t_f and the multipliers of constraints carried
    // over from the previous step. The penalty restarts low; keeping a large
    // one makes the new constraint's subproblem badly conditioned.
    const double mu = opts.penalty0;
    VecX nu_prev;
    ConstraintSet prev_active;
    if (prob) {
      nu_prev = prob->nu();
      prev_active = opts.stage_plan[st - 1];
    }
    prob = std::make_unique<StageProblem>(spec, params, opts.stage_plan[st], n,
                                          opts.substeps, tf0);
    prob->mu() = mu;
    for (std::size_t i = 0; i < opts.stage_plan[st].size(); ++i) {
      for (std::size_t j = 0; j < prev_active.size(); ++j) {
        if (prev_active[j] == opts.stage_plan[st][i]) {
          prob->nu()[static_cast<Eigen::Index>(i)] =
              nu_prev[static_cast<Eigen::Index>(j)];
        }
      }
    }
    DirectStageReport rep;
    rep.step = static_cast<int>(st) + 1;
    rep.active = opts.stage_plan[st];
    double prev_violation = std::numeric_limits<double>::infinity();
    const bool last_stage = st + 1 == opts.stage_plan.size();
    for (int outer = 0; outer < opts.max_outer; ++outer) {
      const double tol =
          std::max(opts.optimality_tol, 1e-2 * std::pow(0.3, outer));
      const InnerResult in =
          minimize_projected(*prob, y, y0_min, tol, opts.max_inner,
                             opts.lbfgs_memory);
      rep.inner_iterations += in.iterations;
      rep.outer_iterations = outer + 1;
      VecX c;
      if (!prob->constraints(y, c)) {
        out.message = "Euler singularity during propagation";
        break;
      }
      const double violation = prob->natural(c).lpNorm<Eigen::Infinity>();
      rep.max_residual = violation;
      rep.t_f = y[0] * tf0;
      if (opts.progress) {
        opts.progress({rep.step, outer, in.iterations, rep.t_f, violation,
                       prob->mu()});
      }
      // Intermediate stages only need a warm start.
      const double feas = last_stage ? opts.feasibility_tol
                                     : std::max(opts.feasibility_tol, 1e-4);
      if (violation <= feas && tol <= opts.optimality_tol * 1.0001) {
        rep.converged = true;
        break;
      }
      prob->nu() += prob->mu() * c;
      if (c.lpNorm<Eigen::Infinity>() > 0.25 * prev_violation) {
        prob->mu() = std::min(prob->mu() * opts.penalty_growth,
                              opts.penalty_max);
      }
      prev_violation = c.lpNorm<Eigen::Infinity>();
    }
    if (!rep.converged) {
      // Polish feasibility when the multipliers have settled but the inner
      // tolerance stalls above the target.
      const double wmin = 1.0 / std::max(1.0, spec.initial.velocity().norm());
      restore_feasibility(*prob, y, y0_min, opts.feasibility_tol * wmin);
      VecX c;
      if (prob->constraints(y, c)) {
        rep.max_residual = prob->natural(c).lpNorm<Eigen::Infinity>();
        rep.converged = rep.max_residual <= opts.feasibility_tol;
      }
      rep.t_f = y[0] * tf0;
    }
    out.stages.push_back(rep);
    VecX c;
    if (prob->constraints(y, c)) last_multipliers = prob->nu() + prob->mu() * c;
  }

  out.decision.t_f = y[0] * tf0;
  out.decision.u.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    out.decision.u[static_cast<std::size_t>(k)] = {y[1 + 2 * k], y[2 + 2 * k]};
  }
  out.multipliers = last_multipliers;
  out.converged = !out.stages.empty() && out.stages.back().converged;
  if (out.message.empty()) {
    out.message = out.converged ? "converged"
                                : "inner optimizer stagnated above tolerance";
  }

  VecX c;
  if (prob->constraints(y, c)) {
    const auto& nodes = prob->propagator().nodes();
    out.terminal = terminal_residuals(State(nodes.back()), spec);
    const std::vector<Vec8> p = prob->costates(y, last_multipliers);
    const int m = opts.substeps;
    const double dt = out.decision.t_f / (static_cast<double>(n) * m);
    out.samples.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      DirectSample s;
      s.t = dt * static_cast<double>(i);
      s.x = State(nodes[i]);
      s.p = p[i];
      const std::size_t seg =
          std::min<std::size_t>(i / static_cast<std::size_t>(m), n - 1);
      s.u = out.decision.u[seg];
      s.singular_distance =
          singular_distance(ExtremalPoint{s.x, Costate(s.p)});
      out.samples.push_back(s);
    }
  }
  return out;
}

SingularWindow longest_singular_window(const std::vector<DirectSample>& s,
                                       double u_max, double rel_distance) {
  SingularWindow best;
  if (s.size() < 3) return best;
  const double threshold = rel_distance * s.front().singular_distance;
  auto inside = [&](std::size_t i) {
    return s[i].u.norm() < u_max && s[i].singular_distance < threshold;
  };
  std::size_t i = 0;
  while (i < s.size()) {
    if (!inside(i)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < s.size() && inside(j + 1)) ++j;
    // Maximal runs touching the first or last sample are boundary effects.
    if (i > 0 && j + 1 < s.size() && s[j].t - s[i].t > best.length())
      best = {s[i].t, s[j].t};
    i = j + 1;
  }
  return best;
}

}  // namespace rocketopt
