#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "rocketopt/continuation.hpp"
#include "rocketopt/direct.hpp"
#include "rocketopt/dynamics.hpp"

namespace rocketopt {

/// Boundary attitude in degrees and rates in deg/s. Only this struct and the
/// config file carry degrees.
struct AttitudeDeg {
  double theta = 0.0;
  double psi = 0.0;
  double phi = 0.0;
  double omega_x = 0.0;
  double omega_y = 0.0;
};

struct Scenario {
  std::string name;
  double v0 = 1000.0;  ///< m/s, along the initial body axis
  AttitudeDeg initial;
  AttitudeDeg target;
  RocketParams params;
  ContinuationOptions continuation;
  DirectOptions direct;
  double sample_dt = 0.01;  ///< output grid of trajectory.csv [s]
};

double deg_to_rad(double deg);
double rad_to_deg(double rad);

/// tc1, tc2 or tc3 at speed v0. Throws kInvalidInput for any other name.
Scenario preset(const std::string& name, double v0);

/// Boundary data in radians. The initial velocity points along the initial
/// body axis.
TerminalSpec to_spec(const Scenario& s);

/// Inverse of to_spec on the angle fields; v0 is the initial speed.
Scenario from_spec(const std::string& name, const TerminalSpec& spec);

using ConfigMap = std::map<std::string, std::string>;

/// `key = value` lines; '#' starts a comment. Throws kInvalidInput on a
/// malformed line or a duplicate key.
ConfigMap parse_config(std::istream& in);
ConfigMap parse_config_file(const std::string& path);

/// Builds a scenario: `scenario` and `v0` select the preset (default tc1,
/// 1000), every other key overrides one field. Unknown keys and bad numbers
/// throw kInvalidInput.
Scenario scenario_from_config(const ConfigMap& cfg);

/// Applies overrides to an existing scenario.
void apply_config(Scenario& s, const ConfigMap& cfg);

}  // namespace rocketopt
