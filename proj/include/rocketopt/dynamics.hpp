#pragma once

#include "rocketopt/types.hpp"

namespace rocketopt {

/// Physical constants of the plant.
struct RocketParams {
  double a = 12.0;       ///< thrust acceleration T/m [m/s^2]
  double b_bar = 0.02;   ///< control torque gain [1/s^2]
  Vec3 gravity{-9.8, 0.0, 0.0};  ///< launch-frame gravity [m/s^2]
};

inline constexpr double kStandardGravity = 9.8;

RocketParams default_params();

/// Recomputes b_bar = T_att * l_r / (2 I_x) * mu_max from rigid-cylinder
/// geometry, I_x = m (3 r^2 + l^2) / 12. Inputs in SI units, mu_max in rad.
double torque_gain_from_geometry(double mass, double length, double radius,
                                 double attitude_thrust, double mu_max);

enum class ControlBound { kDisk, kBox };

bool admissible(const Control& u, ControlBound bound, double slack = 1e-12);

/// Drift vector field f of the control-affine system.
Vec8 field_f(const State& x, const RocketParams& p);
/// g1 = b_bar d/d(omega_y).
Vec8 field_g1(const RocketParams& p);
/// g2 = -b_bar d/d(omega_x).
Vec8 field_g2(const RocketParams& p);

/// f + u1 g1 + u2 g2.
Vec8 rhs(const State& x, const Control& u, const RocketParams& p);

/// Velocity components from speed and flight-path angles:
/// (v sin(theta_v) cos(psi_v), -v sin(psi_v), v cos(theta_v) cos(psi_v)).
Vec3 velocity_from_flightpath(double v, double theta_v, double psi_v);

/// Boundary data. The final velocity is constrained only to be parallel to
/// the final body axis (two scalar equations), never to a target vector.
struct TerminalSpec {
  State initial;
  double theta_f = 0.0;
  double psi_f = 0.0;
  double phi_f = 0.0;
  double omega_xf = 0.0;
  double omega_yf = 0.0;

  /// Final body axis direction w, the target direction of the velocity.
  Vec3 target_direction() const;
};

using Vec7 = Eigen::Matrix<double, 7, 1>;

/// (v_z sin psi_f + v_y cos theta_f cos psi_f,
///  v_z sin theta_f - v_x cos theta_f,
///  theta - theta_f, psi - psi_f, phi - phi_f,
///  omega_x - omega_xf, omega_y - omega_yf)
Vec7 terminal_residuals(const State& x, const TerminalSpec& spec);

}  // namespace rocketopt
