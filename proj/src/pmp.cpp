#include "rocketopt/pmp.hpp"

#include <algorithm>
#include <cmath>

#include "rocketopt/errors.hpp"
#include "rocketopt/frames.hpp"
#include "rocketopt/liealgebra.hpp"

namespace rocketopt {
namespace {

double sat(double v) { return std::clamp(v, -1.0, 1.0); }

}  // namespace

ControlLaw ControlLaw::regularized(double gamma) {
  if (!(gamma > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "gamma must be positive");
  }
  return {Mode::kRegularized, gamma, 0.0};
}

ControlLaw ControlLaw::blended(double gamma, double lambda3) {
  if (!(gamma > 0.0) || !(lambda3 >= 0.0 && lambda3 <= 1.0)) {
    throw Error(ErrorKind::kInvalidInput,
                "blended law needs gamma > 0 and lambda3 in [0, 1]");
  }
  return {Mode::kBlended, gamma, lambda3};
}

double ControlLaw::penalty_weight() const {
  switch (mode) {
    case Mode::kMinTime: return 0.0;
    case Mode::kRegularized: return gamma;
    case Mode::kBlended: return gamma * (1.0 - lambda3);
  }
  return 0.0;
}

Vec2 switching_fn(const ExtremalPoint& z, const RocketParams& p) {
  return {p.b_bar * z.p.p_omega_y(), -p.b_bar * z.p.p_omega_x()};
}

Control control_min_time(const ExtremalPoint& z, const RocketParams& p,
                         double eps) {
  const Vec2 phi = switching_fn(z, p);
  const double n = phi.norm();
  if (n <= eps) {
    throw Error(ErrorKind::kOnSwitchingSurface,
                "control_min_time: ||Phi|| below threshold");
  }
  return {phi[0] / n, phi[1] / n};
}

Control control_regularized(const ExtremalPoint& z, const RocketParams& p,
                            double gamma) {
  const double p0 = z.p.p0();
  if (p0 == 0.0) {
    throw Error(ErrorKind::kDivisionGuard, "control_regularized: p0 = 0");
  }
  return {sat(-p.b_bar * z.p.p_omega_y() / (2.0 * gamma * p0)),
          sat(p.b_bar * z.p.p_omega_x() / (2.0 * gamma * p0))};
}

Control control_blended(const ExtremalPoint& z, const RocketParams& p,
                        double gamma, double lambda3) {
  const double p0 = z.p.p0();
  if (p0 == 0.0) {
    throw Error(ErrorKind::kDivisionGuard, "control_blended: p0 = 0");
  }
  const double pw = std::hypot(z.p.p_omega_x(), z.p.p_omega_y());
  const double denom =
      -2.0 * p0 * gamma * (1.0 - lambda3) + p.b_bar * lambda3 * pw;
  if (denom < 1e-14) {
    throw Error(ErrorKind::kSingularDenominator,
                "control_blended: vanishing denominator");
  }
  return {sat(p.b_bar * z.p.p_omega_y() / denom),
          sat(-p.b_bar * z.p.p_omega_x() / denom)};
}

Control control_for(const ExtremalPoint& z, const RocketParams& p,
                    const ControlLaw& law) {
  switch (law.mode) {
    case ControlLaw::Mode::kMinTime: {
      const Vec2 phi = switching_fn(z, p);
      const double n = phi.norm();
      if (n <= kPhiEpsilon) return {};
      return {phi[0] / n, phi[1] / n};
    }
    case ControlLaw::Mode::kRegularized:
      return control_regularized(z, p, law.gamma);
    case ControlLaw::Mode::kBlended:
      if (law.lambda3 >= 1.0) {
        // Same limit as the min-time law; avoids the 0/0 at Phi = 0.
        const Vec2 phi = switching_fn(z, p);
        const double n = phi.norm();
        if (n <= kPhiEpsilon) return {};
        return {phi[0] / n, phi[1] / n};
      }
      return control_blended(z, p, law.gamma, law.lambda3);
  }
  return {};
}

Vec8 adjoint_rhs(const ExtremalPoint& z, const Control& /*u*/,
                 const RocketParams& prm) {
  const State& x = z.x;
  const Costate& q = z.p;
  check_euler(x.psi());
  const double a = prm.a;
  const double st = std::sin(x.theta()), ct = std::cos(x.theta());
  const double sp = std::sin(x.psi()), cp = std::cos(x.psi());
  const double sf = std::sin(x.phi()), cf = std::cos(x.phi());
  const double tp = sp / cp;
  const double o1 = x.omega_x() * cf - x.omega_y() * sf;
  const double o2 = x.omega_x() * sf + x.omega_y() * cf;

  Vec8 dp = Vec8::Zero();
  dp[kTheta] = -a * cp * (q.p_vx() * ct - q.p_vz() * st);
  dp[kPsi] = a * sp * st * q.p_vx() + a * cp * q.p_vy() +
             a * ct * sp * q.p_vz() - sp * o2 / (cp * cp) * q.p_theta() -
             o2 / (cp * cp) * q.p_phi();
  dp[kPhi] = -o1 / cp * q.p_theta() + o2 * q.p_psi() - tp * o1 * q.p_phi();
  dp[kOmegaX] = -sf / cp * q.p_theta() - cf * q.p_psi() -
                tp * sf * q.p_phi();
  dp[kOmegaY] = -cf / cp * q.p_theta() + sf * q.p_psi() -
                tp * cf * q.p_phi();
  return dp;
}

double hamiltonian(const ExtremalPoint& z, const Control& u,
                   const RocketParams& p, const ControlLaw& law) {
  const double h0 = z.p.vec().dot(field_f(z.x, p));
  const Vec2 phi = switching_fn(z, p);
  const double p0 = z.p.p0();
  return h0 + u.u1 * phi[0] + u.u2 * phi[1] + p0 +
         p0 * law.penalty_weight() * (u.u1 * u.u1 + u.u2 * u.u2);
}

Vec16 extremal_rhs(const ExtremalPoint& z, const RocketParams& p,
                   const ControlLaw& law) {
  const Control u = control_for(z, p, law);
  Vec16 d;
  d << rhs(z.x, u, p), adjoint_rhs(z, u, p);
  return d;
}

double transversality_residual(const ExtremalPoint& zf,
                               const TerminalSpec& spec) {
  return zf.p.velocity_part().dot(spec.target_direction());
}

double eliminate_pvy(double p_vx, double p_vz, const TerminalSpec& spec) {
  const double spf = std::sin(spec.psi_f);
  if (std::abs(spf) < 1e-12) {
    throw Error(ErrorKind::kDegenerateTarget,
                "eliminate_pvy: sin(psi_f) = 0, keep p_vy as an unknown");
  }
  const double cpf = std::cos(spec.psi_f);
  return (p_vx * std::sin(spec.theta_f) * cpf +
          p_vz * std::cos(spec.theta_f) * cpf) /
         spf;
}

GohGlccReport goh_glcc_report(const ExtremalPoint& z, const RocketParams& p) {
  GohGlccReport r;
  r.goh_g1_adf_g2 = pairing(BracketId::kG1AdfG2, z, p);
  r.goh_g1_ad2f_g2 = pairing(BracketId::kG1Ad2fG2, z, p);
  r.goh_g2_ad2f_g1 = pairing(BracketId::kG2Ad2fG1, z, p);
  r.glcc_11 = pairing(BracketId::kG1Ad3fG1, z, p);
  r.glcc_22 = pairing(BracketId::kG2Ad3fG2, z, p);
  r.cross_defect = pairing(BracketId::kG1Ad3fG2, z, p) -
                   pairing(BracketId::kG2Ad3fG1, z, p);
  return r;
}

}  // namespace rocketopt
