#include "rocketopt/liealgebra.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "rocketopt/errors.hpp"
#include "rocketopt/frames.hpp"

namespace rocketopt {
namespace {

struct Trig {
  double st, ct, sp, cp, sf, cf, tp;
  double wx, wy;
  double omega1() const { return wx * cf - wy * sf; }
  double omega2() const { return wx * sf + wy * cf; }
};

Trig trig(const State& x) {
  check_euler(x.psi());
  Trig t;
  t.st = std::sin(x.theta());
  t.ct = std::cos(x.theta());
  t.sp = std::sin(x.psi());
  t.cp = std::cos(x.psi());
  t.sf = std::sin(x.phi());
  t.cf = std::cos(x.phi());
  t.tp = t.sp / t.cp;
  t.wx = x.omega_x();
  t.wy = x.omega_y();
  return t;
}

Vec8 unit(int slot) {
  Vec8 e = Vec8::Zero();
  e[slot] = 1.0;
  return e;
}

// Shared tail of [g~i, ad^3 f.g~i]: -a times the body axis in the v slots.
void thrust_axis_part(Vec8& r, const Trig& t, double a) {
  r[kVx] = -a * t.cp * t.st;
  r[kVy] = a * t.sp;
  r[kVz] = -a * t.cp * t.ct;
}

}  // namespace

std::string_view to_string(BracketId id) {
  switch (id) {
    case BracketId::kG1: return "g1";
    case BracketId::kG2: return "g2";
    case BracketId::kAdfG1: return "adf_g1";
    case BracketId::kAdfG2: return "adf_g2";
    case BracketId::kAd2fG1: return "ad2f_g1";
    case BracketId::kAd2fG2: return "ad2f_g2";
    case BracketId::kAd3fG1: return "ad3f_g1";
    case BracketId::kAd3fG2: return "ad3f_g2";
    case BracketId::kAd4fG1: return "ad4f_g1";
    case BracketId::kAd4fG2: return "ad4f_g2";
    case BracketId::kG1AdfG1: return "g1_adf_g1";
    case BracketId::kG1AdfG2: return "g1_adf_g2";
    case BracketId::kG2AdfG1: return "g2_adf_g1";
    case BracketId::kG2AdfG2: return "g2_adf_g2";
    case BracketId::kG1Ad2fG1: return "g1_ad2f_g1";
    case BracketId::kG2Ad2fG2: return "g2_ad2f_g2";
    case BracketId::kG1Ad2fG2: return "g1_ad2f_g2";
    case BracketId::kG2Ad2fG1: return "g2_ad2f_g1";
    case BracketId::kG1Ad3fG1: return "g1_ad3f_g1";
    case BracketId::kG1Ad3fG2: return "g1_ad3f_g2";
    case BracketId::kG2Ad3fG1: return "g2_ad3f_g1";
    case BracketId::kG2Ad3fG2: return "g2_ad3f_g2";
    case BracketId::kG1G2: return "g1_g2";
  }
  return "?";
}

bool is_identically_zero(BracketId id) {
  switch (id) {
    case BracketId::kG1AdfG1:
    case BracketId::kG1AdfG2:
    case BracketId::kG2AdfG1:
    case BracketId::kG2AdfG2:
    case BracketId::kG1Ad2fG1:
    case BracketId::kG2Ad2fG2:
    case BracketId::kG1G2:
      return true;
    default:
      return false;
  }
}

Vec8 bracket(BracketId id, const State& x, const RocketParams& p) {
  const Trig t = trig(x);
  const double a = p.a;
  const double w2 = t.wx * t.wx + t.wy * t.wy;
  Vec8 r = Vec8::Zero();
  switch (id) {
    case BracketId::kG1:
      return unit(kOmegaY);
    case BracketId::kG2:
      return unit(kOmegaX);
    case BracketId::kAdfG1:
      r[kTheta] = -t.cf / t.cp;
      r[kPsi] = t.sf;
      r[kPhi] = -t.tp * t.cf;
      return r;
    case BracketId::kAdfG2:
      r[kTheta] = -t.sf / t.cp;
      r[kPsi] = -t.cf;
      r[kPhi] = -t.tp * t.sf;
      return r;
    case BracketId::kAd2fG1:
      r[kVx] = a * (t.ct * t.cf + t.st * t.sf * t.sp);
      r[kVy] = a * t.sf * t.cp;
      r[kVz] = -a * (t.cf * t.st - t.sf * t.ct * t.sp);
      r[kPhi] = -t.wx;
      return r;
    case BracketId::kAd2fG2:
      r[kVx] = a * (t.ct * t.sf - t.st * t.cf * t.sp);
      r[kVy] = -a * t.cf * t.cp;
      r[kVz] = -a * (t.sf * t.st + t.cf * t.ct * t.sp);
      r[kPhi] = t.wy;
      return r;
    case BracketId::kAd3fG1:
      r[kVx] = -a * t.wy * t.cp * t.st;
      r[kVy] = a * t.wy * t.sp;
      r[kVz] = -a * t.wy * t.cp * t.ct;
      r[kTheta] = t.wx * t.omega1() / t.cp;
      r[kPsi] = -t.wx * t.omega2();
      r[kPhi] = t.wx * t.tp * t.omega1();
      return r;
    case BracketId::kAd3fG2:
      r[kVx] = -a * t.wx * t.cp * t.st;
      r[kVy] = a * t.wx * t.sp;
      r[kVz] = -a * t.wx * t.cp * t.ct;
      r[kTheta] = -t.wy * t.omega1() / t.cp;
      r[kPsi] = t.wy * t.omega2();
      r[kPhi] = -t.wy * t.tp * t.omega1();
      return r;
    case BracketId::kAd4fG1:
      r[kVx] = -a * w2 * (t.cf * t.ct + t.sf * t.sp * t.st);
      r[kVy] = -a * w2 * t.cp * t.sf;
      r[kVz] = a * w2 * (t.cf * t.st - t.ct * t.sf * t.sp);
      r[kPhi] = t.wx * w2;
      return r;
    case BracketId::kAd4fG2:
      r[kVx] = -a * w2 * (t.ct * t.sf - t.cf * t.sp * t.st);
      r[kVy] = a * w2 * t.cf * t.cp;
      r[kVz] = a * w2 * (t.sf * t.st + t.cf * t.ct * t.sp);
      r[kPhi] = -t.wy * w2;
      return r;
    case BracketId::kG1Ad2fG2:
      return unit(kPhi);
    case BracketId::kG2Ad2fG1:
      return -unit(kPhi);
    case BracketId::kG1Ad3fG1:
      thrust_axis_part(r, t, a);
      r[kTheta] = -t.wx * t.sf / t.cp;
      r[kPsi] = -t.wx * t.cf;
      r[kPhi] = -t.wx * t.sf * t.tp;
      return r;
    case BracketId::kG2Ad3fG2:
      thrust_axis_part(r, t, a);
      r[kTheta] = -t.wy * t.cf / t.cp;
      r[kPsi] = t.wy * t.sf;
      r[kPhi] = -t.wy * t.cf * t.tp;
      return r;
    case BracketId::kG1Ad3fG2: {
      const double m = -t.wx * t.cf + 2.0 * t.wy * t.sf;
      r[kTheta] = m / t.cp;
      r[kPsi] = t.wx * t.sf + 2.0 * t.wy * t.cf;
      r[kPhi] = m * t.tp;
      return r;
    }
    case BracketId::kG2Ad3fG1: {
      const double m = 2.0 * t.wx * t.cf - t.wy * t.sf;
      r[kTheta] = m / t.cp;
      r[kPsi] = -2.0 * t.wx * t.sf - t.wy * t.cf;
      r[kPhi] = m * t.tp;
      return r;
    }
    case BracketId::kG1AdfG1:
    case BracketId::kG1AdfG2:
    case BracketId::kG2AdfG1:
    case BracketId::kG2AdfG2:
    case BracketId::kG1Ad2fG1:
    case BracketId::kG2Ad2fG2:
    case BracketId::kG1G2:
      return r;
  }
  return r;
}

Vec8 printed_bracket(BracketId id, const State& x, const RocketParams& p) {
  const Trig t = trig(x);
  const double a = p.a;
  Vec8 r = bracket(id, x, p);
  switch (id) {
    case BracketId::kAd2fG1:
      r[kVy] = 0.0;
      break;
    case BracketId::kAd3fG2:
      r[kPsi] = t.wx * t.omega2();
      r[kPhi] = -t.wx * t.tp * t.omega1();
      break;
    case BracketId::kG1Ad3fG2:
      r.setZero();
      r[kVx] = -2.0 * a * t.wy * (t.ct * t.sf - t.cf * t.sp * t.st);
      r[kVy] = 2.0 * a * t.wy * t.cf * t.cp;
      r[kVz] = 2.0 * a * t.wy * (t.sf * t.st + t.cf * t.ct * t.sp);
      r[kPhi] = -t.wx * t.wx - 3.0 * t.wy * t.wy;
      break;
    case BracketId::kG2Ad3fG1:
      r.setZero();
      r[kVx] = -2.0 * a * t.wx * (t.cf * t.ct + t.sf * t.sp * t.st);
      r[kVy] = -2.0 * a * t.wx * t.cp * t.sf;
      r[kVz] = 2.0 * a * t.wx * (t.cf * t.st - t.ct * t.sf * t.sp);
      r[kPhi] = 3.0 * t.wx * t.wx + t.wy * t.wy;
      break;
    default:
      break;
  }
  return r;
}

Vec8 bracket_fd(const VectorField& a, const VectorField& b, const Vec8& x,
                double h) {
  if (!(h >= 1e-7 && h <= 1e-3)) {
    throw Error(ErrorKind::kInvalidInput, "bracket_fd: step outside [1e-7, 1e-3]");
  }
  const Vec8 av = a(x);
  const Vec8 bv = b(x);
  // Directional derivatives DB.A and DA.B by central differences along the
  // other field, which is exactly the Jacobian-vector product needed.
  auto directional = [h](const VectorField& field, const Vec8& at,
                         const Vec8& dir) -> Vec8 {
    const double n = dir.norm();
    if (n == 0.0) return Vec8::Zero();
    const double step = h / n;
    return (field(at + step * dir) - field(at - step * dir)) / (2.0 * step);
  };
  const Vec8 out = directional(b, x, av) - directional(a, x, bv);
  if (!out.allFinite()) {
    throw Error(ErrorKind::kNumeric, "bracket_fd: non-finite intermediate");
  }
  return out;
}

VectorField bracket_field(BracketId id, const RocketParams& p) {
  return [id, p](const Vec8& x) { return bracket(id, State(x), p); };
}

VectorField drift_field(const RocketParams& p) {
  return [p](const Vec8& x) { return field_f(State(x), p); };
}

Vec8 bracket_oracle(BracketId id, const State& x, const RocketParams& p,
                    double h) {
  const VectorField f = drift_field(p);
  const VectorField g1 = bracket_field(BracketId::kG1, p);
  const VectorField g2 = bracket_field(BracketId::kG2, p);
  auto bf = [&p](BracketId b) { return bracket_field(b, p); };
  const Vec8& v = x.vec();
  switch (id) {
    case BracketId::kG1: return g1(v);
    case BracketId::kG2: return g2(v);
    case BracketId::kAdfG1: return bracket_fd(f, g1, v, h);
    case BracketId::kAdfG2: return bracket_fd(f, g2, v, h);
    case BracketId::kAd2fG1: return bracket_fd(f, bf(BracketId::kAdfG1), v, h);
    case BracketId::kAd2fG2: return bracket_fd(f, bf(BracketId::kAdfG2), v, h);
    case BracketId::kAd3fG1: return bracket_fd(f, bf(BracketId::kAd2fG1), v, h);
    case BracketId::kAd3fG2: return bracket_fd(f, bf(BracketId::kAd2fG2), v, h);
    case BracketId::kAd4fG1: return bracket_fd(f, bf(BracketId::kAd3fG1), v, h);
    case BracketId::kAd4fG2: return bracket_fd(f, bf(BracketId::kAd3fG2), v, h);
    case BracketId::kG1AdfG1: return bracket_fd(g1, bf(BracketId::kAdfG1), v, h);
    case BracketId::kG1AdfG2: return bracket_fd(g1, bf(BracketId::kAdfG2), v, h);
    case BracketId::kG2AdfG1: return bracket_fd(g2, bf(BracketId::kAdfG1), v, h);
    case BracketId::kG2AdfG2: return bracket_fd(g2, bf(BracketId::kAdfG2), v, h);
    case BracketId::kG1Ad2fG1: return bracket_fd(g1, bf(BracketId::kAd2fG1), v, h);
    case BracketId::kG2Ad2fG2: return bracket_fd(g2, bf(BracketId::kAd2fG2), v, h);
    case BracketId::kG1Ad2fG2: return bracket_fd(g1, bf(BracketId::kAd2fG2), v, h);
    case BracketId::kG2Ad2fG1: return bracket_fd(g2, bf(BracketId::kAd2fG1), v, h);
    case BracketId::kG1Ad3fG1: return bracket_fd(g1, bf(BracketId::kAd3fG1), v, h);
    case BracketId::kG1Ad3fG2: return bracket_fd(g1, bf(BracketId::kAd3fG2), v, h);
    case BracketId::kG2Ad3fG1: return bracket_fd(g2, bf(BracketId::kAd3fG1), v, h);
    case BracketId::kG2Ad3fG2: return bracket_fd(g2, bf(BracketId::kAd3fG2), v, h);
    case BracketId::kG1G2: return bracket_fd(g1, g2, v, h);
  }
  return Vec8::Zero();
}

int numerical_rank(const Eigen::MatrixXd& m, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > rel_tol * s[0]) ++rank;
  }
  return rank;
}

int span_rank_6(const State& x, const RocketParams& p) {
  Eigen::Matrix<double, 8, 6> m;
  m.col(0) = bracket(BracketId::kG1, x, p);
  m.col(1) = bracket(BracketId::kG2, x, p);
  m.col(2) = bracket(BracketId::kAdfG1, x, p);
  m.col(3) = bracket(BracketId::kAdfG2, x, p);
  m.col(4) = bracket(BracketId::kAd2fG1, x, p);
  m.col(5) = bracket(BracketId::kAd2fG2, x, p);
  return numerical_rank(m);
}

double glcc_margin(const State& x, const RocketParams& p) {
  const double st = std::sin(x.theta()), ct = std::cos(x.theta());
  const double sp = std::sin(x.psi()), cp = std::cos(x.psi());
  return p.a + p.gravity[0] * st * cp - p.gravity[1] * sp +
         p.gravity[2] * ct * cp;
}

ExtremalPoint singular_surface_point(double theta, double psi, double phi,
                                     const Vec3& v, const RocketParams& p,
                                     double p0) {
  check_euler(psi);
  if (!(p0 < 0.0)) {
    throw Error(ErrorKind::kSingularConstruction,
                "singular_surface_point: p0 must be negative");
  }
  ExtremalPoint z;
  z.x.set_velocity(v);
  z.x.theta() = theta;
  z.x.psi() = psi;
  z.x.phi() = phi;
  const double denom = glcc_margin(z.x, p);
  const double ct = std::cos(theta);
  if (std::abs(denom) < 1e-14 || std::abs(ct) < 1e-14) {
    throw Error(ErrorKind::kSingularConstruction,
                "singular_surface_point: vanishing denominator");
  }
  const double cp = std::cos(psi);
  const double pvz = -p0 * ct * cp / denom;
  z.p.p0() = p0;
  z.p.p_vz() = pvz;
  z.p.p_vx() = std::tan(theta) * pvz;
  z.p.p_vy() = -std::tan(psi) / ct * pvz;
  return z;
}

double singular_distance(const ExtremalPoint& z) {
  const State& x = z.x;
  const Costate& p = z.p;
  Eigen::Matrix<double, 9, 1> d;
  d << x.omega_x(), x.omega_y(), p.p_theta(), p.p_psi(), p.p_phi(),
      p.p_omega_x(), p.p_omega_y(),
      p.p_vx() - std::tan(x.theta()) * p.p_vz(),
      p.p_vy() + std::tan(x.psi()) / std::cos(x.theta()) * p.p_vz();
  return d.norm();
}

double pairing(BracketId id, const ExtremalPoint& z, const RocketParams& p) {
  return z.p.vec().dot(bracket(id, z.x, p));
}

}  // namespace rocketopt
