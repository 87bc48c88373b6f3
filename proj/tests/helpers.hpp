#pragma once

#include <random>

#include "rocketopt/dynamics.hpp"
#include <Eigen/Dense>

#include "rocketopt/types.hpp"

namespace rocketopt::test {

// Angles in (-1.2, 1.2), rates in (-0.5, 0.5), speeds up to 2 km/s.
inline State random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(-1.2, 1.2), rate(-0.5, 0.5),
      vel(-2000.0, 2000.0);
  State x;
  x.vx() = vel(rng);
  x.vy() = vel(rng);
  x.vz() = vel(rng);
  x.theta() = ang(rng);
  x.psi() = ang(rng);
  x.phi() = ang(rng);
  x.omega_x() = rate(rng);
  x.omega_y() = rate(rng);
  return x;
}

inline Vec8 random_vec8(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  Vec8 v;
  for (int i = 0; i < 8; ++i) v[i] = d(rng);
  return v;
}

}  // namespace rocketopt::test
