#include "rocketopt/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "rocketopt/errors.hpp"
#include "rocketopt/liealgebra.hpp"
#include "rocketopt/pmp.hpp"

namespace rocketopt {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::kInvalidInput, "cannot write " + path);
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::kInvalidInput, "cannot read " + path);
  return f;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  return out;
}

double parse_cell(const std::string& cell, const std::string& path, int row) {
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (cell.empty() || end != cell.c_str() + cell.size())
    throw Error(ErrorKind::kInvalidInput,
                path + ": row " + std::to_string(row) + ": bad number '" +
                    cell + "'");
  return v;
}

std::vector<std::vector<double>> read_table(
    const std::string& path, const std::vector<std::string>& header) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line) || split(line) != header)
    throw Error(ErrorKind::kInvalidInput, path + ": unexpected header");
  std::vector<std::vector<double>> rows;
  int row = 1;
  while (std::getline(f, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw Error(ErrorKind::kInvalidInput,
                  path + ": row " + std::to_string(row) + ": expected " +
                      std::to_string(header.size()) + " columns");
    std::vector<double> r;
    r.reserve(cells.size());
    for (const auto& c : cells) r.push_back(parse_cell(c, path, row));
    rows.push_back(std::move(r));
  }
  return rows;
}

const std::vector<std::string>& event_columns() {
  static const std::vector<std::string> cols = {"t", "order",
                                                "control_jump_rad", "phi_norm"};
  return cols;
}

double angle_between(const Vec2& a, const Vec2& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::abs(std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b)));
}

ExtremalPoint row_point(const TrajectorySample& s) {
  return ExtremalPoint{State(s.x), Costate(s.p, -1.0)};
}

Vec2 phi_of(const Vec8& p, const RocketParams& params) {
  return params.b_bar * Vec2(p[kOmegaY], -p[kOmegaX]);
}

}  // namespace

const std::vector<std::string>& trajectory_columns() {
  static const std::vector<std::string> cols = {
      "t",       "v_x",     "v_y",     "v_z",       "theta",     "psi",
      "phi",     "omega_x", "omega_y", "p_vx",      "p_vy",      "p_vz",
      "p_theta", "p_psi",   "p_phi",   "p_omega_x", "p_omega_y", "u1",
      "u2",      "phi_norm", "hamiltonian"};
  return cols;
}

void write_trajectory_csv(const std::string& path,
                          const std::vector<TrajectorySample>& samples) {
  auto f = open_out(path);
  const auto& cols = trajectory_columns();
  for (std::size_t i = 0; i < cols.size(); ++i)
    f << (i ? "," : "") << cols[i];
  f << '\n';
  for (const auto& s : samples) {
    f << fmt(s.t);
    for (int i = 0; i < 8; ++i) f << ',' << fmt(s.x[i]);
    for (int i = 0; i < 8; ++i) f << ',' << fmt(s.p[i]);
    f << ',' << fmt(s.u.u1) << ',' << fmt(s.u.u2) << ',' << fmt(s.phi_norm)
      << ',' << fmt(s.hamiltonian) << '\n';
  }
  if (!f) throw Error(ErrorKind::kInvalidInput, "write failed: " + path);
}

std::vector<TrajectorySample> read_trajectory_csv(const std::string& path) {
  std::vector<TrajectorySample> out;
  for (const auto& r : read_table(path, trajectory_columns())) {
    TrajectorySample s;
    s.t = r[0];
    for (int i = 0; i < 8; ++i) {
      s.x[i] = r[1 + i];
      s.p[i] = r[9 + i];
    }
    s.u = {r[17], r[18]};
    s.phi_norm = r[19];
    s.hamiltonian = r[20];
    out.push_back(s);
  }
  return out;
}

std::vector<EventRow> event_rows(const std::vector<SwitchEvent>& events) {
  std::vector<EventRow> out;
  for (const auto& e : events)
    out.push_back({e.t, e.order, e.control_jump, e.phi_norm});
  return out;
}

void write_events_csv(const std::string& path,
                      const std::vector<EventRow>& events) {
  auto f = open_out(path);
  f << "t,order,control_jump_rad,phi_norm\n";
  for (const auto& e : events)
    f << fmt(e.t) << ',' << e.order << ',' << fmt(e.control_jump_rad) << ','
      << fmt(e.phi_norm) << '\n';
  if (!f) throw Error(ErrorKind::kInvalidInput, "write failed: " + path);
}

std::vector<EventRow> read_events_csv(const std::string& path) {
  std::vector<EventRow> out;
  for (const auto& r : read_table(path, event_columns()))
    out.push_back({r[0], static_cast<int>(r[1]), r[2], r[3]});
  return out;
}

std::string summary_json(const RunSummary& s) {
  nlohmann::ordered_json j;
  j["scenario"] = s.scenario;
  j["solver"] = s.solver;
  j["t_f"] = s.t_f;
  j["cost"] = s.cost;
  j["lambda3_star"] =
      s.lambda3_star ? nlohmann::ordered_json(*s.lambda3_star) : nullptr;
  j["switch_times"] = s.switch_times;
  j["chattering_flag"] = s.chattering_flag;
  j["residual_norm"] = s.residual_norm;
  j["wall_time_s"] = s.wall_time_s;
  return j.dump(2) + "\n";
}

void write_summary_json(const std::string& path, const RunSummary& s) {
  auto f = open_out(path);
  f << summary_json(s);
  if (!f) throw Error(ErrorKind::kInvalidInput, "write failed: " + path);
}

RunSummary read_summary_json(const std::string& path) {
  auto f = open_in(path);
  RunSummary s;
  try {
    const auto j = nlohmann::json::parse(f);
    s.scenario = j.at("scenario").get<std::string>();
    s.solver = j.at("solver").get<std::string>();
    s.t_f = j.at("t_f").get<double>();
    s.cost = j.at("cost").get<double>();
    if (!j.at("lambda3_star").is_null())
      s.lambda3_star = j.at("lambda3_star").get<double>();
    s.switch_times = j.at("switch_times").get<std::vector<double>>();
    s.chattering_flag = j.at("chattering_flag").get<bool>();
    s.residual_norm = j.at("residual_norm").get<double>();
    s.wall_time_s = j.at("wall_time_s").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kInvalidInput, path + ": " + e.what());
  }
  return s;
}

std::vector<TrajectorySample> direct_trajectory(
    const std::vector<DirectSample>& samples, const RocketParams& params) {
  std::vector<TrajectorySample> out;
  out.reserve(samples.size());
  const ControlLaw law = ControlLaw::min_time();
  for (const auto& d : samples) {
    TrajectorySample s;
    s.t = d.t;
    s.x = d.x.vec();
    s.p = d.p;
    s.u = d.u;
    const ExtremalPoint z = row_point(s);
    s.phi_norm = switching_fn(z, params).norm();
    s.hamiltonian = hamiltonian(z, s.u, params, law);
    out.push_back(s);
  }
  return out;
}

TrajectoryAnalysis analyze_trajectory(const std::vector<TrajectorySample>& s,
                                      const RocketParams& params,
                                      const EventOptions& opts) {
  TrajectoryAnalysis out;
  if (s.size() < 2) return out;
  for (std::size_t k = 1; k < s.size(); ++k)
    if (!(s[k].t > s[k - 1].t))
      throw Error(ErrorKind::kInvalidInput,
                  "trajectory times must increase strictly");

  const std::size_t n = s.size();
  std::vector<Vec2> phi(n), dphi(n);
  double phi_max = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const ExtremalPoint z = row_point(s[k]);
    phi[k] = phi_of(s[k].p, params);
    dphi[k] = phi_of(adjoint_rhs(z, s[k].u, params), params);
    phi_max = std::max(phi_max, phi[k].norm());
    out.max_abs_hamiltonian =
        std::max(out.max_abs_hamiltonian, std::abs(s[k].hamiltonian));
  }

  struct Found {
    std::size_t k;
    double t;
    double norm;
  };
  std::vector<Found> found;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double ga = phi[k].dot(dphi[k]);
    const double gb = phi[k + 1].dot(dphi[k + 1]);
    if (!(ga < 0.0 && gb >= 0.0)) continue;
    const double h = s[k + 1].t - s[k].t;
    auto hermite = [&](double u, Vec2& val, Vec2& der) {
      const double u2 = u * u, u3 = u2 * u;
      val = (2 * u3 - 3 * u2 + 1) * phi[k] + (u3 - 2 * u2 + u) * h * dphi[k] +
            (-2 * u3 + 3 * u2) * phi[k + 1] + (u3 - u2) * h * dphi[k + 1];
      der = ((6 * u2 - 6 * u) * phi[k] + (-6 * u2 + 6 * u) * phi[k + 1]) / h +
            (3 * u2 - 4 * u + 1) * dphi[k] + (3 * u2 - 2 * u) * dphi[k + 1];
    };
    double lo = 0.0, hi = 1.0;
    Vec2 v, d;
    while ((hi - lo) * h > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      hermite(mid, v, d);
      if (v.dot(d) < 0.0) lo = mid; else hi = mid;
    }
    const double u = 0.5 * (lo + hi);
    hermite(u, v, d);
    found.push_back({k, s[k].t + u * h, v.norm()});
    out.minima.push_back({s[k].t + u * h, v.norm()});
  }

  const double t0 = s.front().t, tf = s.back().t;
  const double threshold = std::max(kPhiEpsilon, opts.rel_threshold * phi_max);
  std::vector<double> times;
  for (const auto& m : found) {
    if (m.norm > threshold) continue;
    if (m.t - t0 < opts.jump_window || tf - m.t < opts.jump_window) continue;
    const double w = (m.t - s[m.k].t) / (s[m.k + 1].t - s[m.k].t);
    TrajectorySample mid;
    mid.x = (1 - w) * s[m.k].x + w * s[m.k + 1].x;
    mid.p = (1 - w) * s[m.k].p + w * s[m.k + 1].p;
    const double speed = ((1 - w) * dphi[m.k] + w * dphi[m.k + 1]).norm();
    double half = opts.jump_window;
    if (speed > 0.0) half = std::max(half, opts.jump_scale * m.norm / speed);
    half = std::min({half, m.t - t0, tf - m.t});
    // Last row at or before t - half, first row at or after t + half.
    auto after_it = std::lower_bound(
        s.begin(), s.end(), m.t + half,
        [](const TrajectorySample& r, double t) { return r.t < t; });
    if (after_it == s.end()) --after_it;
    auto before_it = std::upper_bound(
        s.begin(), s.end(), m.t - half,
        [](double t, const TrajectorySample& r) { return t < r.t; });
    if (before_it != s.begin()) --before_it;
    EventRow e;
    e.t = m.t;
    e.order = classify_switch(row_point(mid), params).order;
    e.phi_norm = m.norm;
    e.control_jump_rad = angle_between(before_it->u.vec(), after_it->u.vec());
    out.events.push_back(e);
    times.push_back(m.t);
  }
  out.chattering = detect_chattering(times);
  return out;
}

}  // namespace rocketopt
