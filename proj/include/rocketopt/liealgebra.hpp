#pragma once

#include <array>
#include <functional>
#include <string_view>

#include "rocketopt/dynamics.hpp"
#include "rocketopt/types.hpp"

namespace rocketopt {

// Lie brackets of the drift f with the normalized control fields
// g~1 = d/d(omega_y) and g~2 = d/d(omega_x). Brackets of the physical
// fields follow by bilinearity (g1 = b_bar g~1, g2 = -b_bar g~2).
// Convention: ad f.g = [f, g], [A, B](x) = DB(x) A(x) - DA(x) B(x).
enum class BracketId {
  kG1,
  kG2,
  kAdfG1,
  kAdfG2,
  kAd2fG1,
  kAd2fG2,
  kAd3fG1,
  kAd3fG2,
  kAd4fG1,
  kAd4fG2,
  kG1AdfG1,
  kG1AdfG2,
  kG2AdfG1,
  kG2AdfG2,
  kG1Ad2fG1,
  kG2Ad2fG2,
  kG1Ad2fG2,
  kG2Ad2fG1,
  kG1Ad3fG1,
  kG1Ad3fG2,
  kG2Ad3fG1,
  kG2Ad3fG2,
  kG1G2,
};

inline constexpr std::array<BracketId, 23> kAllBrackets = {
    BracketId::kG1,       BracketId::kG2,       BracketId::kAdfG1,
    BracketId::kAdfG2,    BracketId::kAd2fG1,   BracketId::kAd2fG2,
    BracketId::kAd3fG1,   BracketId::kAd3fG2,   BracketId::kAd4fG1,
    BracketId::kAd4fG2,   BracketId::kG1AdfG1,  BracketId::kG1AdfG2,
    BracketId::kG2AdfG1,  BracketId::kG2AdfG2,  BracketId::kG1Ad2fG1,
    BracketId::kG2Ad2fG2, BracketId::kG1Ad2fG2, BracketId::kG2Ad2fG1,
    BracketId::kG1Ad3fG1, BracketId::kG1Ad3fG2, BracketId::kG2Ad3fG1,
    BracketId::kG2Ad3fG2, BracketId::kG1G2,
};

std::string_view to_string(BracketId id);

/// True for the brackets that vanish identically.
bool is_identically_zero(BracketId id);

/// Closed-form value of the bracket at x. Throws kEulerSingularity.
Vec8 bracket(BracketId id, const State& x, const RocketParams& p);

/// The table exactly as typeset in the reference derivation, including its
/// known misprints (ad^2 f.g~1 drops the v_y slot, ad^3 f.g~2 uses omega_x
/// instead of omega_y in its psi/phi slots, and the two crossed
/// [g~i, ad^3 f.g~j] entries are really [g~i, ad^4 f.g~j]). Kept only so the
/// oracle suite can name the entries that disagree.
Vec8 printed_bracket(BracketId id, const State& x, const RocketParams& p);

using VectorField = std::function<Vec8(const Vec8&)>;

/// Central-difference bracket [A, B](x) = DB(x) A(x) - DA(x) B(x).
/// h must lie in [1e-7, 1e-3].
Vec8 bracket_fd(const VectorField& a, const VectorField& b, const Vec8& x,
                double h = 1e-5);

/// The closed form of `id` as a vector field handle.
VectorField bracket_field(BracketId id, const RocketParams& p);
/// The drift f as a vector field handle.
VectorField drift_field(const RocketParams& p);

/// Finite-difference reconstruction of `id` one level at a time: the outer
/// bracket is differenced, its arguments use the closed forms one level down.
/// Identical to bracket() up to O(h^2) when the closed forms are right.
Vec8 bracket_oracle(BracketId id, const State& x, const RocketParams& p,
                    double h = 1e-5);

/// Numerical rank of {g~1, g~2, ad f.g~1, ad f.g~2, ad^2 f.g~1, ad^2 f.g~2}
/// (SVD, tolerance 1e-8 relative to the largest singular value).
int span_rank_6(const State& x, const RocketParams& p);

int numerical_rank(const Eigen::MatrixXd& m, double rel_tol = 1e-8);

/// a + g_x sin(theta) cos(psi) - g_y sin(psi) + g_z cos(theta) cos(psi);
/// must be >= 0 along an optimal singular arc.
double glcc_margin(const State& x, const RocketParams& p);

/// Builds the point of the singular surface S above the given attitude and
/// velocity: omega = 0, p_angles = p_omega = 0, p_v per the H = 0 closure.
ExtremalPoint singular_surface_point(double theta, double psi, double phi,
                                     const Vec3& v, const RocketParams& p,
                                     double p0 = -1.0);

/// Euclidean distance-like measure of how far z is from S.
double singular_distance(const ExtremalPoint& z);

/// <p, bracket(id)(x)>.
double pairing(BracketId id, const ExtremalPoint& z, const RocketParams& p);

}  // namespace rocketopt
