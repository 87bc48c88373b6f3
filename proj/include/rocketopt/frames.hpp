#pragma once

#include "rocketopt/types.hpp"

namespace rocketopt {

enum class Axis { kX, kY, kZ };

/// Proper rotation matrix (orthogonal, det +1).
class Rotation3 {
 public:
  Rotation3() : m_(Mat3::Identity()) {}
  explicit Rotation3(const Mat3& m) : m_(m) {}

  const Mat3& matrix() const { return m_; }
  double operator()(int r, int c) const { return m_(r, c); }

  Rotation3 transpose() const { return Rotation3(m_.transpose()); }
  Rotation3 operator*(const Rotation3& other) const {
    return Rotation3(m_ * other.m_);
  }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

 private:
  Mat3 m_;
};

/// Unit single-axis rotation R_x, R_y or R_z. Rotating a vector by +sigma
/// about the axis, expressed as a frame change (passive convention).
Rotation3 rot_axis(Axis axis, double sigma);

/// L_bR = R_z(phi) R_x(psi) R_y(theta): launch frame -> body frame.
/// Throws kEulerSingularity when psi is within 1e-9 of +-pi/2.
Rotation3 body_from_launch(double theta, double psi, double phi);

/// L_Rb = L_bR^T.
Rotation3 launch_from_body(double theta, double psi, double phi);

/// Body symmetry axis z_b expressed in the launch frame:
/// (sin(theta)cos(psi), -sin(psi), cos(theta)cos(psi)).
Vec3 body_axis_in_launch(double theta, double psi);

inline constexpr double kEulerGuard = 1e-9;

/// Throws kEulerSingularity if cos(psi) is within the guard of zero.
void check_euler(double psi);

}  // namespace rocketopt
