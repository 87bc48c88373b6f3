#include "rocketopt/scenario.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <numbers>
#include <sstream>

#include "rocketopt/errors.hpp"

namespace rocketopt {

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

Scenario preset(const std::string& name, double v0) {
  if (!(v0 > 0.0) || !std::isfinite(v0))
    throw Error(ErrorKind::kInvalidInput, "v0 must be positive");
  Scenario s;
  s.name = name;
  s.v0 = v0;
  s.initial = {75.0, 0.5, 0.0, 0.0, 0.0};
  s.target = {85.0, 5.0, 0.0, 0.0, 0.0};
  if (name == "tc1") {
  } else if (name == "tc2") {
    s.initial.theta = 70.0;
  } else if (name == "tc3") {
    s.initial.theta = 85.0;
    s.target.theta = 75.0;
  } else {
    throw Error(ErrorKind::kInvalidInput, "unknown preset '" + name + "'");
  }
  return s;
}

TerminalSpec to_spec(const Scenario& s) {
  TerminalSpec spec;
  const double th0 = deg_to_rad(s.initial.theta);
  const double ps0 = deg_to_rad(s.initial.psi);
  spec.initial.theta() = th0;
  spec.initial.psi() = ps0;
  spec.initial.phi() = deg_to_rad(s.initial.phi);
  spec.initial.omega_x() = deg_to_rad(s.initial.omega_x);
  spec.initial.omega_y() = deg_to_rad(s.initial.omega_y);
  spec.initial.set_velocity(velocity_from_flightpath(s.v0, th0, ps0));
  spec.theta_f = deg_to_rad(s.target.theta);
  spec.psi_f = deg_to_rad(s.target.psi);
  spec.phi_f = deg_to_rad(s.target.phi);
  spec.omega_xf = deg_to_rad(s.target.omega_x);
  spec.omega_yf = deg_to_rad(s.target.omega_y);
  return spec;
}

Scenario from_spec(const std::string& name, const TerminalSpec& spec) {
  Scenario s;
  s.name = name;
  s.v0 = spec.initial.velocity().norm();
  const State& x = spec.initial;
  s.initial = {rad_to_deg(x.theta()), rad_to_deg(x.psi()), rad_to_deg(x.phi()),
               rad_to_deg(x.omega_x()), rad_to_deg(x.omega_y())};
  s.target = {rad_to_deg(spec.theta_f), rad_to_deg(spec.psi_f),
              rad_to_deg(spec.phi_f), rad_to_deg(spec.omega_xf),
              rad_to_deg(spec.omega_yf)};
  return s;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty() || !std::isfinite(out))
    throw Error(ErrorKind::kInvalidInput,
                "config key '" + key + "': not a number: '" + v + "'");
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != std::floor(d) || std::abs(d) > 1e9)
    throw Error(ErrorKind::kInvalidInput,
                "config key '" + key + "': not an integer: '" + v + "'");
  return static_cast<int>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw Error(ErrorKind::kInvalidInput,
              "config key '" + key + "': not a boolean: '" + v + "'");
}

using Setter = std::function<void(Scenario&, const std::string&,
                                  const std::string&)>;

Setter real(double Scenario::*field) {
  return [field](Scenario& s, const std::string& k, const std::string& v) {
    s.*field = to_double(k, v);
  };
}

template <class F>
Setter real_at(F get) {
  return [get](Scenario& s, const std::string& k, const std::string& v) {
    get(s) = to_double(k, v);
  };
}

template <class F>
Setter int_at(F get) {
  return [get](Scenario& s, const std::string& k, const std::string& v) {
    get(s) = to_int(k, v);
  };
}

template <class F>
Setter bool_at(F get) {
  return [get](Scenario& s, const std::string& k, const std::string& v) {
    get(s) = to_bool(k, v);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> m;
    m["v0"] = real(&Scenario::v0);
    m["sample_dt"] = real(&Scenario::sample_dt);
#define ATT(prefix, member, field)                                        \
  m[prefix #field] = real_at([](Scenario& s) -> double& {                 \
    return s.member.field;                                                \
  });
    ATT("initial.", initial, theta)
    ATT("initial.", initial, psi)
    ATT("initial.", initial, phi)
    ATT("initial.", initial, omega_x)
    ATT("initial.", initial, omega_y)
    ATT("target.", target, theta)
    ATT("target.", target, psi)
    ATT("target.", target, phi)
    ATT("target.", target, omega_x)
    ATT("target.", target, omega_y)
#undef ATT
    m["params.a"] = real_at([](Scenario& s) -> double& { return s.params.a; });
    m["params.b_bar"] =
        real_at([](Scenario& s) -> double& { return s.params.b_bar; });
    m["params.g"] = real_at(
        [](Scenario& s) -> double& { return s.params.gravity[0]; });

    auto c = [](Scenario& s) -> ContinuationOptions& { return s.continuation; };
#define CR(name)                                                         \
  m["continuation." #name] =                                             \
      real_at([c](Scenario& s) -> double& { return c(s).name; });
    CR(gamma) CR(initial_step) CR(step_min) CR(step_max) CR(grow) CR(shrink)
    CR(phi_star) CR(scale_floor) CR(arclength_step) CR(arclength_step_min)
#undef CR
    m["continuation.adaptive_scale"] =
        bool_at([c](Scenario& s) -> bool& { return c(s).adaptive_scale; });
    m["continuation.fold_fallback"] =
        bool_at([c](Scenario& s) -> bool& { return c(s).fold_fallback; });
    m["continuation.arclength_max_steps"] =
        int_at([c](Scenario& s) -> int& { return c(s).arclength_max_steps; });

    m["solver.tol"] =
        real_at([c](Scenario& s) -> double& { return c(s).solver.tol; });
    m["solver.fd_step"] =
        real_at([c](Scenario& s) -> double& { return c(s).solver.fd_step; });
    m["solver.max_iter"] =
        int_at([c](Scenario& s) -> int& { return c(s).solver.max_iter; });
    m["integrator.rel_tol"] =
        real_at([c](Scenario& s) -> double& { return c(s).integrator.rel_tol; });
    m["integrator.abs_tol"] =
        real_at([c](Scenario& s) -> double& { return c(s).integrator.abs_tol; });
    m["integrator.event_tol"] = real_at(
        [c](Scenario& s) -> double& { return c(s).integrator.event_tol; });
    m["integrator.h_min"] =
        real_at([c](Scenario& s) -> double& { return c(s).integrator.h_min; });

    auto d = [](Scenario& s) -> DirectOptions& { return s.direct; };
#define DR(name) \
  m["direct." #name] = real_at([d](Scenario& s) -> double& { return d(s).name; });
#define DI(name) \
  m["direct." #name] = int_at([d](Scenario& s) -> int& { return d(s).name; });
    DR(t_f_guess) DR(feasibility_tol) DR(optimality_tol) DR(penalty0)
    DR(penalty_growth) DR(penalty_max)
    DI(segments) DI(substeps) DI(max_outer) DI(max_inner) DI(lbfgs_memory)
#undef DR
#undef DI
    return m;
  }();
  return table;
}

}  // namespace

ConfigMap parse_config(std::istream& in) {
  ConfigMap out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::kInvalidInput,
                  "config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw Error(ErrorKind::kInvalidInput,
                  "config line " + std::to_string(lineno) + ": empty key");
    if (!out.emplace(key, value).second)
      throw Error(ErrorKind::kInvalidInput, "duplicate config key '" + key + "'");
  }
  return out;
}

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::kInvalidInput, "cannot read config " + path);
  return parse_config(f);
}

void apply_config(Scenario& s, const ConfigMap& cfg) {
  const auto& table = setters();
  for (const auto& [key, value] : cfg) {
    if (key == "scenario") continue;
    auto it = table.find(key);
    if (it == table.end())
      throw Error(ErrorKind::kInvalidInput, "unknown config key '" + key + "'");
    it->second(s, key, value);
  }
  if (!(s.v0 > 0.0))
    throw Error(ErrorKind::kInvalidInput, "v0 must be positive");
  if (!(s.sample_dt > 0.0))
    throw Error(ErrorKind::kInvalidInput, "sample_dt must be positive");
}

Scenario scenario_from_config(const ConfigMap& cfg) {
  std::string name = "tc1";
  double v0 = 1000.0;
  if (auto it = cfg.find("scenario"); it != cfg.end()) name = it->second;
  if (auto it = cfg.find("v0"); it != cfg.end()) v0 = to_double("v0", it->second);
  Scenario s = preset(name, v0);
  apply_config(s, cfg);
  return s;
}

}  // namespace rocketopt
