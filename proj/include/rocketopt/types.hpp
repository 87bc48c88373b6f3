#pragma once

#include <Eigen/Core>

namespace rocketopt {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Vec16 = Eigen::Matrix<double, 16, 1>;

// Slot layout shared by the state and the costate.
enum Slot : int {
  kVx = 0,
  kVy = 1,
  kVz = 2,
  kTheta = 3,
  kPsi = 4,
  kPhi = 5,
  kOmegaX = 6,
  kOmegaY = 7,
};

/// Plant state (v_x, v_y, v_z, theta, psi, phi, omega_x, omega_y).
/// Velocities in m/s in the launch frame, Euler angles in rad, body rates in
/// rad/s. omega_z is identically zero in this model and is not carried.
class State {
 public:
  State() : x_(Vec8::Zero()) {}
  explicit State(const Vec8& x) : x_(x) {}

  double vx() const { return x_[kVx]; }
  double vy() const { return x_[kVy]; }
  double vz() const { return x_[kVz]; }
  double theta() const { return x_[kTheta]; }
  double psi() const { return x_[kPsi]; }
  double phi() const { return x_[kPhi]; }
  double omega_x() const { return x_[kOmegaX]; }
  double omega_y() const { return x_[kOmegaY]; }

  double& vx() { return x_[kVx]; }
  double& vy() { return x_[kVy]; }
  double& vz() { return x_[kVz]; }
  double& theta() { return x_[kTheta]; }
  double& psi() { return x_[kPsi]; }
  double& phi() { return x_[kPhi]; }
  double& omega_x() { return x_[kOmegaX]; }
  double& omega_y() { return x_[kOmegaY]; }

  Vec3 velocity() const { return x_.head<3>(); }
  void set_velocity(const Vec3& v) { x_.head<3>() = v; }

  const Vec8& vec() const { return x_; }
  Vec8& vec() { return x_; }

 private:
  Vec8 x_;
};

/// Adjoint vector conjugate to State plus the cost multiplier p0 (<= 0).
class Costate {
 public:
  Costate() : p_(Vec8::Zero()) {}
  explicit Costate(const Vec8& p, double p0 = -1.0) : p_(p), p0_(p0) {}

  double p_vx() const { return p_[kVx]; }
  double p_vy() const { return p_[kVy]; }
  double p_vz() const { return p_[kVz]; }
  double p_theta() const { return p_[kTheta]; }
  double p_psi() const { return p_[kPsi]; }
  double p_phi() const { return p_[kPhi]; }
  double p_omega_x() const { return p_[kOmegaX]; }
  double p_omega_y() const { return p_[kOmegaY]; }
  double p0() const { return p0_; }

  double& p_vx() { return p_[kVx]; }
  double& p_vy() { return p_[kVy]; }
  double& p_vz() { return p_[kVz]; }
  double& p_theta() { return p_[kTheta]; }
  double& p_psi() { return p_[kPsi]; }
  double& p_phi() { return p_[kPhi]; }
  double& p_omega_x() { return p_[kOmegaX]; }
  double& p_omega_y() { return p_[kOmegaY]; }
  double& p0() { return p0_; }

  Vec3 velocity_part() const { return p_.head<3>(); }

  const Vec8& vec() const { return p_; }
  Vec8& vec() { return p_; }

 private:
  Vec8 p_;
  double p0_ = -1.0;
};

/// A point z = (x, p) of the 16-dimensional extremal flow.
struct ExtremalPoint {
  State x;
  Costate p;

  Vec16 packed() const {
    Vec16 z;
    z << x.vec(), p.vec();
    return z;
  }

  static ExtremalPoint unpack(const Vec16& z, double p0 = -1.0) {
    return ExtremalPoint{State(z.head<8>()), Costate(z.tail<8>(), p0)};
  }
};

struct Control {
  double u1 = 0.0;
  double u2 = 0.0;

  Vec2 vec() const { return {u1, u2}; }
  double norm() const { return vec().norm(); }
};

}  // namespace rocketopt
