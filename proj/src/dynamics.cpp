#include "rocketopt/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "rocketopt/errors.hpp"
#include "rocketopt/frames.hpp"

namespace rocketopt {

RocketParams default_params() { return RocketParams{}; }

double torque_gain_from_geometry(double mass, double length, double radius,
                                 double attitude_thrust, double mu_max) {
  const double ix = mass * (3.0 * radius * radius + length * length) / 12.0;
  return attitude_thrust * length / (2.0 * ix) * mu_max;
}

bool admissible(const Control& u, ControlBound bound, double slack) {
  if (bound == ControlBound::kDisk) {
    return u.u1 * u.u1 + u.u2 * u.u2 <= 1.0 + slack;
  }
  return std::max(std::abs(u.u1), std::abs(u.u2)) <= 1.0 + slack;
}

Vec8 field_f(const State& x, const RocketParams& p) {
  check_euler(x.psi());
  const double st = std::sin(x.theta()), ct = std::cos(x.theta());
  const double sp = std::sin(x.psi()), cp = std::cos(x.psi());
  const double sf = std::sin(x.phi()), cf = std::cos(x.phi());
  const double rate_xy = x.omega_x() * sf + x.omega_y() * cf;

  Vec8 dx;
  dx[kVx] = p.a * st * cp + p.gravity[0];
  dx[kVy] = -p.a * sp + p.gravity[1];
  dx[kVz] = p.a * ct * cp + p.gravity[2];
  dx[kTheta] = rate_xy / cp;
  dx[kPsi] = x.omega_x() * cf - x.omega_y() * sf;
  dx[kPhi] = sp / cp * rate_xy;
  dx[kOmegaX] = 0.0;
  dx[kOmegaY] = 0.0;
  return dx;
}

Vec8 field_g1(const RocketParams& p) {
  Vec8 g = Vec8::Zero();
  g[kOmegaY] = p.b_bar;
  return g;
}

Vec8 field_g2(const RocketParams& p) {
  Vec8 g = Vec8::Zero();
  g[kOmegaX] = -p.b_bar;
  return g;
}

Vec8 rhs(const State& x, const Control& u, const RocketParams& p) {
  Vec8 dx = field_f(x, p);
  dx[kOmegaX] -= p.b_bar * u.u2;
  dx[kOmegaY] += p.b_bar * u.u1;
  return dx;
}

Vec3 velocity_from_flightpath(double v, double theta_v, double psi_v) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw Error(ErrorKind::kInvalidInput,
                "velocity_from_flightpath: speed must be finite and >= 0");
  }
  return v * body_axis_in_launch(theta_v, psi_v);
}

Vec3 TerminalSpec::target_direction() const {
  return body_axis_in_launch(theta_f, psi_f);
}

Vec7 terminal_residuals(const State& x, const TerminalSpec& spec) {
  const double stf = std::sin(spec.theta_f), ctf = std::cos(spec.theta_f);
  const double spf = std::sin(spec.psi_f), cpf = std::cos(spec.psi_f);
  Vec7 r;
  r << x.vz() * spf + x.vy() * ctf * cpf,
       x.vz() * stf - x.vx() * ctf,
       x.theta() - spec.theta_f,
       x.psi() - spec.psi_f,
       x.phi() - spec.phi_f,
       x.omega_x() - spec.omega_xf,
       x.omega_y() - spec.omega_yf;
  return r;
}

}  // namespace rocketopt
