#include "rocketopt/odeint.hpp"

#include <algorithm>
#include <cmath>

#include "rocketopt/liealgebra.hpp"

namespace rocketopt {
namespace {

using Flow = Dop853<16>;

Flow::Rhs make_rhs(const ControlLaw& law, const RocketParams& params,
                   double p0) {
  return [law, params, p0](double, const Vec16& y) {
    return extremal_rhs(ExtremalPoint::unpack(y, p0), params, law);
  };
}

// d/dt (|Phi|^2 / 2) up to the positive factor b_bar^2.
double phi_dot_phi(const ExtremalPoint& z, const ControlLaw& law,
                   const RocketParams& params) {
  const Control u = control_for(z, params, law);
  const Vec8 dp = adjoint_rhs(z, u, params);
  return z.p.p_omega_x() * dp[kOmegaX] + z.p.p_omega_y() * dp[kOmegaY];
}

double angle_between(const Vec2& a, const Vec2& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::acos(std::clamp(a.dot(b) / (na * nb), -1.0, 1.0));
}

}  // namespace

void IntegratorConfig::validate() const {
  auto in_range = [](double v) { return v >= 1e-14 && v <= 1e-3; };
  if (!in_range(rel_tol) || !in_range(abs_tol)) {
    throw Error(ErrorKind::kInvalidInput,
                "IntegratorConfig: tolerances must lie in [1e-14, 1e-3]");
  }
  if (max_steps <= 0 || !(event_tol > 0.0) || !(h_min > 0.0) || h_max < 0.0) {
    throw Error(ErrorKind::kInvalidInput, "IntegratorConfig: bad limits");
  }
}

Vec16 ExtremalTrajectory::at(double t) const {
  if (segments_.empty()) {
    throw Error(ErrorKind::kInvalidInput, "ExtremalTrajectory: empty");
  }
  t = std::clamp(t, t0(), tf());
  auto it = std::upper_bound(
      segments_.begin(), segments_.end(), t,
      [](double v, const DenseSegment<16>& s) { return v < s.t0; });
  if (it != segments_.begin()) --it;
  return it->eval(t);
}

ExtremalPoint ExtremalTrajectory::point(double t) const {
  return ExtremalPoint::unpack(at(t), p0_);
}

ExtremalRun integrate_extremal(const ExtremalPoint& z0, const ControlLaw& law,
                               const RocketParams& params,
                               const IntegratorConfig& cfg, double t0,
                               double t1, const EventOptions& events) {
  Flow flow(cfg);
  std::vector<DenseSegment<16>> segs;
  flow.integrate(make_rhs(law, params, z0.p.p0()), t0, z0.packed(), t1,
                 [&segs](const DenseSegment<16>& s) {
                   segs.push_back(s);
                   return true;
                 });
  ExtremalRun run;
  run.trajectory = ExtremalTrajectory(std::move(segs), z0.p.p0());
  run.stats = flow.stats();
  if (events.enabled) {
    locate_events(run.trajectory, law, params, cfg, events, run.minima,
                  run.events);
  }
  return run;
}

ExtremalPoint propagate_extremal(const ExtremalPoint& z0,
                                 const ControlLaw& law,
                                 const RocketParams& params,
                                 const IntegratorConfig& cfg, double t0,
                                 double t1) {
  Flow flow(cfg);
  const Vec16 y =
      flow.integrate(make_rhs(law, params, z0.p.p0()), t0, z0.packed(), t1);
  return ExtremalPoint::unpack(y, z0.p.p0());
}

void locate_events(const ExtremalTrajectory& traj, const ControlLaw& law,
                   const RocketParams& params, const IntegratorConfig& cfg,
                   const EventOptions& opts, std::vector<PhiMinimum>& minima,
                   std::vector<SwitchEvent>& events) {
  minima.clear();
  events.clear();
  if (traj.empty()) return;
  const double p0 = traj.p0();
  auto z_at = [&](double t) { return ExtremalPoint::unpack(traj.at(t), p0); };
  auto s_at = [&](double t) { return phi_dot_phi(z_at(t), law, params); };
  auto phi_at = [&](double t) { return switching_fn(z_at(t), params).norm(); };

  double phi_max = 0.0;
  const int probes = std::max(1, opts.probes_per_step);
  for (const auto& seg : traj.segments()) {
    double ta = seg.t0;
    double sa = s_at(ta);
    phi_max = std::max(phi_max, phi_at(ta));
    for (int k = 1; k <= probes; ++k) {
      const double tb = seg.t0 + seg.h * double(k) / double(probes);
      const double sb = s_at(tb);
      if (sa < 0.0 && sb >= 0.0) {
        // ||Phi|| decreasing then increasing: bisect for the minimum.
        double lo = ta, hi = tb;
        while (hi - lo > cfg.event_tol) {
          const double mid = 0.5 * (lo + hi);
          if (s_at(mid) < 0.0) lo = mid; else hi = mid;
        }
        const double tm = 0.5 * (lo + hi);
        minima.push_back({tm, phi_at(tm)});
      }
      ta = tb;
      sa = sb;
    }
  }
  phi_max = std::max(phi_max, phi_at(traj.tf()));

  const double threshold = std::max(kPhiEpsilon, opts.rel_threshold * phi_max);
  for (const auto& m : minima) {
    if (m.phi_norm > threshold) continue;
    // Interior minima only; an endpoint minimum is a boundary effect.
    if (m.t - traj.t0() < opts.jump_window ||
        traj.tf() - m.t < opts.jump_window) {
      continue;
    }
    SwitchEvent e;
    e.t = m.t;
    e.z = z_at(m.t);
    e.phi_norm = m.phi_norm;
    e.order = classify_switch(e.z, params).order;
    // Phi passes the origin at distance |Phi|min with speed |dPhi/dt|; the
    // turn completes over a few multiples of that time scale.
    const Control u_e = control_for(e.z, params, law);
    const Vec8 dp = adjoint_rhs(e.z, u_e, params);
    const double speed = params.b_bar * std::hypot(dp[kOmegaX], dp[kOmegaY]);
    double half = opts.jump_window;
    if (speed > 0.0) half = std::max(half, opts.jump_scale * m.phi_norm / speed);
    half = std::min({half, m.t - traj.t0(), traj.tf() - m.t});
    const Control before = control_for(z_at(m.t - half), params, law);
    const Control after = control_for(z_at(m.t + half), params, law);
    e.control_jump = angle_between(before.vec(), after.vec());
    events.push_back(e);
  }
}

SwitchDiagnosis classify_switch(const ExtremalPoint& z,
                                const RocketParams& params, double tol) {
  SwitchDiagnosis d;
  d.a = {pairing(BracketId::kAdfG1, z, params),
         pairing(BracketId::kAdfG2, z, params)};
  d.b = {pairing(BracketId::kAd2fG1, z, params),
         pairing(BracketId::kAd2fG2, z, params)};
  d.b3 = {pairing(BracketId::kAd3fG1, z, params),
          pairing(BracketId::kAd3fG2, z, params)};
  d.c = pairing(BracketId::kG2Ad2fG1, z, params);
  d.h1_b1 = pairing(BracketId::kG1Ad3fG1, z, params);
  if (d.a.norm() > tol) {
    d.order = 1;
  } else if (d.b.norm() > tol) {
    d.order = 2;
  } else if (d.b3.norm() > tol) {
    d.order = 3;
    d.order3_regular = d.c * d.c < d.b3.squaredNorm();
  } else if (std::abs(d.h1_b1) > tol) {
    d.order = 4;
    d.chattering_branch = std::abs(d.c) <= tol;
  }
  return d;
}

ChatteringReport detect_chattering(const std::vector<double>& event_times) {
  ChatteringReport r;
  for (std::size_t i = 1; i < event_times.size(); ++i) {
    r.gaps.push_back(event_times[i] - event_times[i - 1]);
  }
  // Longest run of gaps, each shorter than 0.7 times the previous one.
  int best = 0;
  std::size_t best_end = 0;
  int run = 0;
  for (std::size_t i = 1; i < r.gaps.size(); ++i) {
    if (r.gaps[i] < 0.7 * r.gaps[i - 1]) {
      ++run;
      if (run > best) {
        best = run;
        best_end = i;
      }
    } else {
      run = 0;
    }
  }
  r.run_length = best;
  if (best >= 4) {
    r.flagged = true;
    // Sum the remaining geometric tail with the last observed ratio.
    const double last = r.gaps[best_end];
    const double ratio = last / r.gaps[best_end - 1];
    r.accumulation_time =
        event_times[best_end + 1] + last * ratio / (1.0 - ratio);
  }
  return r;
}

ChatteringReport detect_chattering(const ExtremalTrajectory& traj,
                                   const std::vector<SwitchEvent>& events) {
  std::vector<double> times;
  times.reserve(events.size());
  for (const auto& e : events) times.push_back(e.t);
  ChatteringReport r = detect_chattering(times);
  if (!events.empty()) {
    const double t = r.flagged ? std::min(r.accumulation_time, traj.tf())
                               : events.back().t;
    r.singular_distance = singular_distance(traj.point(t));
  }
  return r;
}

std::vector<TrajectorySample> sample_trajectory(const ExtremalTrajectory& traj,
                                                const ControlLaw& law,
                                                const RocketParams& params,
                                                double dt) {
  std::vector<TrajectorySample> out;
  if (traj.empty()) return out;
  if (!(dt > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "sample_trajectory: dt <= 0");
  }
  const double t0 = traj.t0(), tf = traj.tf();
  const long n = static_cast<long>(std::floor((tf - t0) / dt + 1e-9));
  auto push = [&](double t) {
    const ExtremalPoint z = traj.point(t);
    TrajectorySample s;
    s.t = t;
    s.x = z.x.vec();
    s.p = z.p.vec();
    s.u = control_for(z, params, law);
    s.phi_norm = switching_fn(z, params).norm();
    s.hamiltonian = hamiltonian(z, s.u, params, law);
    out.push_back(s);
  };
  for (long k = 0; k <= n; ++k) push(t0 + double(k) * dt);
  if (tf - out.back().t > 1e-12) push(tf);
  return out;
}

double control_energy(const ExtremalTrajectory& traj, const ControlLaw& law,
                      const RocketParams& params) {
  static const double node[4] = {0.1834346424956498, 0.5255324099163290,
                                 0.7966664774136267, 0.9602898564975363};
  static const double weight[4] = {0.3626837833783620, 0.3137066458778873,
                                   0.2223810344533745, 0.1012285362903763};
  double total = 0.0;
  for (const auto& seg : traj.segments()) {
    const double mid = seg.t0 + 0.5 * seg.h, half = 0.5 * seg.h;
    for (int k = 0; k < 4; ++k) {
      for (int sgn : {-1, 1}) {
        const double t = mid + sgn * node[k] * half;
        const auto z = ExtremalPoint::unpack(seg.eval(t), traj.p0());
        const Control u = control_for(z, params, law);
        total += weight[k] * half * (u.u1 * u.u1 + u.u2 * u.u2);
      }
    }
  }
  return total;
}

double max_abs_hamiltonian(const ExtremalTrajectory& traj,
                           const ControlLaw& law, const RocketParams& params) {
  double worst = 0.0;
  auto check = [&](double t) {
    const ExtremalPoint z = traj.point(t);
    const Control u = control_for(z, params, law);
    worst = std::max(worst, std::abs(hamiltonian(z, u, params, law)));
  };
  for (const auto& seg : traj.segments()) {
    check(seg.t0);
    check(seg.t0 + 0.5 * seg.h);
  }
  if (!traj.empty()) check(traj.tf());
  return worst;
}

}  // namespace rocketopt
