#include "rocketopt/ocp0.hpp"

#include <cmath>

#include "rocketopt/errors.hpp"
#include "rocketopt/frames.hpp"
#include "rocketopt/liealgebra.hpp"

namespace rocketopt {

Ocp0Solution solve_ocp0(const Vec3& v0, const Vec3& w, double a,
                        const Vec3& g, double p0) {
  if (std::abs(w.norm() - 1.0) > 1e-9) {
    throw Error(ErrorKind::kInvalidInput, "solve_ocp0: w must be a unit vector");
  }
  if (!(a > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "solve_ocp0: a must be positive");
  }
  if (!(p0 < 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "solve_ocp0: p0 must be negative");
  }
  Ocp0Solution s;
  s.v0 = v0;
  s.w = w;
  const double gw = g.dot(w);
  const double vw = v0.dot(w);
  const double a1 = a * a - (gw * w - g).squaredNorm();
  const double a2 = 2.0 * (vw * gw - v0.dot(g));
  const double a3 = -(vw * w - v0).squaredNorm();
  if (!(a1 > 0.0)) {
    throw Error(ErrorKind::kInfeasibleOcp0, "solve_ocp0: a1 <= 0");
  }
  const double disc = a2 * a2 - 4.0 * a1 * a3;
  if (disc < 0.0) {
    throw Error(ErrorKind::kInfeasibleOcp0, "solve_ocp0: negative discriminant");
  }
  const double num = -a2 + std::sqrt(disc);
  if (num < 0.0) {
    throw Error(ErrorKind::kInfeasibleOcp0, "solve_ocp0: no positive root");
  }
  s.t_f = num / (2.0 * a1);
  if (s.t_f <= 1e-14 * (1.0 + v0.norm())) {
    s.t_f = 0.0;
    s.zero_time = true;
    return s;
  }
  const double k = vw + gw * s.t_f;
  s.e_star = ((k * w - v0) / s.t_f - g) / a;
  const double denom = a + s.e_star.dot(g);
  if (std::abs(denom) < 1e-14) {
    throw Error(ErrorKind::kInfeasibleOcp0, "solve_ocp0: a + <e*, g> = 0");
  }
  s.p_v = -p0 * s.e_star / denom;
  if (s.e_star[2] == 0.0) {
    throw Error(ErrorKind::kAngleExtraction, "solve_ocp0: e3* = 0");
  }
  s.theta_star = std::atan2(s.e_star[0], s.e_star[2]);
  s.psi_star = -std::asin(std::clamp(s.e_star[1], -1.0, 1.0));
  s.outside_principal_branch = s.e_star[2] < 0.0;
  return s;
}

Ocp0Solution solve_ocp0(const TerminalSpec& spec, const RocketParams& params,
                        double p0) {
  return solve_ocp0(spec.initial.velocity(), spec.target_direction(), params.a,
                    params.gravity, p0);
}

ExtremalPoint embed_extremal(const Ocp0Solution& sol, double phi_star,
                             const RocketParams& params, double p0) {
  if (sol.zero_time) {
    throw Error(ErrorKind::kAngleExtraction,
                "embed_extremal: zero-time OCP0 solution has no direction");
  }
  check_euler(sol.psi_star);
  ExtremalPoint z;
  z.x.set_velocity(sol.v0);
  z.x.theta() = sol.theta_star;
  z.x.psi() = sol.psi_star;
  z.x.phi() = phi_star;
  z.p.p0() = p0;
  z.p.vec().head<3>() = sol.p_v;
  const ExtremalPoint ref = singular_surface_point(
      sol.theta_star, sol.psi_star, phi_star, sol.v0, params, p0);
  const double scale = 1.0 + sol.p_v.norm();
  if (singular_distance(z) > 1e-10 * scale ||
      (ref.p.vec() - z.p.vec()).norm() > 1e-10 * scale) {
    throw Error(ErrorKind::kSingularConstruction,
                "embed_extremal: OCP0 costate is not on the singular surface");
  }
  return z;
}

}  // namespace rocketopt
