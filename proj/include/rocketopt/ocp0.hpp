#pragma once

#include "rocketopt/dynamics.hpp"
#include "rocketopt/types.hpp"

namespace rocketopt {

/// Closed-form solution of the velocity-only problem: steer V0 to be
/// parallel to w in minimum time with a fixed-magnitude thrust a along the
/// unit direction e.
struct Ocp0Solution {
  Vec3 e_star = Vec3::Zero();
  double t_f = 0.0;
  Vec3 p_v = Vec3::Zero();
  double theta_star = 0.0;
  double psi_star = 0.0;
  /// V0 is already parallel to w; e_star and the angles are meaningless.
  bool zero_time = false;
  /// e3* < 0, so theta* lies outside (-pi/2, pi/2).
  bool outside_principal_branch = false;
  Vec3 v0 = Vec3::Zero();
  Vec3 w = Vec3::Zero();
};

/// Throws kInfeasibleOcp0 when a1 <= 0 or the discriminant is negative,
/// kAngleExtraction when e3* = 0, kInvalidInput for a non-unit w or a <= 0.
Ocp0Solution solve_ocp0(const Vec3& v0, const Vec3& w, double a,
                        const Vec3& g, double p0 = -1.0);

/// Convenience overload taking the spec and params.
Ocp0Solution solve_ocp0(const TerminalSpec& spec, const RocketParams& params,
                        double p0 = -1.0);

/// Point of the singular surface carrying the OCP0 solution: V = V0,
/// angles (theta*, psi*, phi*), omega = 0, p_angles = p_omega = 0.
ExtremalPoint embed_extremal(const Ocp0Solution& sol, double phi_star,
                             const RocketParams& params, double p0 = -1.0);

}  // namespace rocketopt
