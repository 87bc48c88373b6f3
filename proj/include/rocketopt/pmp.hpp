#pragma once

#include "rocketopt/dynamics.hpp"
#include "rocketopt/types.hpp"

namespace rocketopt {

/// Threshold on ||Phi|| below which a point counts as on the switching
/// surface.
inline constexpr double kPhiEpsilon = 1e-10;

/// Which maximization condition closes the extremal system.
struct ControlLaw {
  enum class Mode { kMinTime, kRegularized, kBlended };

  Mode mode = Mode::kMinTime;
  double gamma = 0.0;
  double lambda3 = 0.0;

  static ControlLaw min_time() { return {}; }
  static ControlLaw regularized(double gamma);
  static ControlLaw blended(double gamma, double lambda3);

  /// Weight (1 - lambda3) on the quadratic control penalty; 0 for min-time.
  double penalty_weight() const;
};

/// Phi = (h1, h2) = (b_bar p_omega_y, -b_bar p_omega_x).
Vec2 switching_fn(const ExtremalPoint& z, const RocketParams& p);

/// u = Phi / ||Phi||. Throws kOnSwitchingSurface when ||Phi|| <= eps.
Control control_min_time(const ExtremalPoint& z, const RocketParams& p,
                         double eps = kPhiEpsilon);

/// Box-constrained maximizer of the gamma-penalized Hamiltonian.
Control control_regularized(const ExtremalPoint& z, const RocketParams& p,
                            double gamma);

/// Control of the lambda3 homotopy between the regularized and min-time
/// laws. Throws kSingularDenominator when the denominator is below 1e-14.
Control control_blended(const ExtremalPoint& z, const RocketParams& p,
                        double gamma, double lambda3);

/// Dispatches on law.mode. Min-time returns (0,0) on the switching surface
/// instead of throwing, which is the singular control.
Control control_for(const ExtremalPoint& z, const RocketParams& p,
                    const ControlLaw& law);

/// dp/dt = -dH/dx. The velocity costates are constant.
Vec8 adjoint_rhs(const ExtremalPoint& z, const Control& u,
                 const RocketParams& p);

/// <p, f> + u . Phi + p0 + p0 gamma |u|^2 (1 - lambda3).
double hamiltonian(const ExtremalPoint& z, const Control& u,
                   const RocketParams& p, const ControlLaw& law);

/// Full 16-dimensional extremal vector field with u supplied by the law.
Vec16 extremal_rhs(const ExtremalPoint& z, const RocketParams& p,
                   const ControlLaw& law);

/// <p_v, w> with w the final body axis.
double transversality_residual(const ExtremalPoint& zf,
                               const TerminalSpec& spec);

/// p_vy that zeroes the transversality residual. Throws kDegenerateTarget
/// when sin(psi_f) is zero.
double eliminate_pvy(double p_vx, double p_vz, const TerminalSpec& spec);

struct GohGlccReport {
  double goh_g1_adf_g2 = 0.0;     ///< <p, [g~1, ad f.g~2]>
  double goh_g1_ad2f_g2 = 0.0;    ///< <p, [g~1, ad^2 f.g~2]>
  double goh_g2_ad2f_g1 = 0.0;    ///< <p, [g~2, ad^2 f.g~1]>
  double glcc_11 = 0.0;           ///< <p, [g~1, ad^3 f.g~1]>
  double glcc_22 = 0.0;           ///< <p, [g~2, ad^3 f.g~2]>
  double cross_defect = 0.0;      ///< <p,[g~1,ad^3 f.g~2]> - <p,[g~2,ad^3 f.g~1]>
  /// glcc_11 <= 0 and glcc_22 <= 0 (the necessary sign for p0 = -1).
  bool glcc_holds() const { return glcc_11 <= 0.0 && glcc_22 <= 0.0; }
};

GohGlccReport goh_glcc_report(const ExtremalPoint& z, const RocketParams& p);

}  // namespace rocketopt
