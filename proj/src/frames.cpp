#include "rocketopt/frames.hpp"

#include <cmath>
#include <string>

#include "rocketopt/errors.hpp"

namespace rocketopt {

Rotation3 rot_axis(Axis axis, double sigma) {
  if (!std::isfinite(sigma)) {
    throw Error(ErrorKind::kInvalidInput, "rot_axis: non-finite angle");
  }
  const double c = std::cos(sigma);
  const double s = std::sin(sigma);
  Mat3 m;
  switch (axis) {
    case Axis::kX:
      m << 1, 0, 0,
           0, c, s,
           0, -s, c;
      break;
    case Axis::kY:
      m << c, 0, -s,
           0, 1, 0,
           s, 0, c;
      break;
    case Axis::kZ:
      m << c, s, 0,
           -s, c, 0,
           0, 0, 1;
      break;
  }
  return Rotation3(m);
}

void check_euler(double psi) {
  // Distance to the nearest pi/2 + k*pi.
  const double r = std::remainder(psi - M_PI / 2.0, M_PI);
  if (!std::isfinite(psi) || std::abs(r) < kEulerGuard) {
    throw Error(ErrorKind::kEulerSingularity,
                "Euler singularity: psi = " + std::to_string(psi));
  }
}

Rotation3 body_from_launch(double theta, double psi, double phi) {
  check_euler(psi);
  return rot_axis(Axis::kZ, phi) * rot_axis(Axis::kX, psi) *
         rot_axis(Axis::kY, theta);
}

Rotation3 launch_from_body(double theta, double psi, double phi) {
  return body_from_launch(theta, psi, phi).transpose();
}

Vec3 body_axis_in_launch(double theta, double psi) {
  return {std::sin(theta) * std::cos(psi), -std::sin(psi),
          std::cos(theta) * std::cos(psi)};
}

}  // namespace rocketopt
