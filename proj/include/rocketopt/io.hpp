#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rocketopt/direct.hpp"
#include "rocketopt/odeint.hpp"

namespace rocketopt {

/// Column names of trajectory.csv in file order.
const std::vector<std::string>& trajectory_columns();

void write_trajectory_csv(const std::string& path,
                          const std::vector<TrajectorySample>& samples);
/// Throws kInvalidInput on a missing file, a wrong header or a bad row.
std::vector<TrajectorySample> read_trajectory_csv(const std::string& path);

struct EventRow {
  double t = 0.0;
  int order = 0;
  double control_jump_rad = 0.0;
  double phi_norm = 0.0;
};

std::vector<EventRow> event_rows(const std::vector<SwitchEvent>& events);
void write_events_csv(const std::string& path,
                      const std::vector<EventRow>& events);
std::vector<EventRow> read_events_csv(const std::string& path);

struct RunSummary {
  std::string scenario;
  std::string solver;  ///< "indirect" or "direct"
  double t_f = 0.0;
  double cost = 0.0;
  std::optional<double> lambda3_star;  ///< empty when lambda3 = 1 converged
  std::vector<double> switch_times;
  bool chattering_flag = false;
  double residual_norm = 0.0;
  double wall_time_s = 0.0;
};

/// summary.json with a fixed key order. Pretty-printed, trailing newline.
std::string summary_json(const RunSummary& s);
void write_summary_json(const std::string& path, const RunSummary& s);
RunSummary read_summary_json(const std::string& path);

/// Converts direct-method samples to trajectory rows. The costate is the
/// adjoint estimate carried by the samples and H uses the min-time form.
std::vector<TrajectorySample> direct_trajectory(
    const std::vector<DirectSample>& samples, const RocketParams& params);

struct TrajectoryAnalysis {
  std::vector<PhiMinimum> minima;
  std::vector<EventRow> events;
  ChatteringReport chattering;
  double max_abs_hamiltonian = 0.0;
};

/// Recovers switching events from sampled rows alone. Phi and dPhi/dt are
/// known at every row, so each interval carries a cubic Hermite model of
/// Phi whose closest approach to the origin gives the event time and
/// |Phi|min. Thresholds and jump windows follow `opts` exactly as on a
/// dense trajectory.
TrajectoryAnalysis analyze_trajectory(const std::vector<TrajectorySample>& s,
                                      const RocketParams& params,
                                      const EventOptions& opts = {});

}  // namespace rocketopt
