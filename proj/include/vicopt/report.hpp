#pragma once

// Output files. Every CSV starts with one '#' comment line holding the
// resolved scenario (compact JSON) and the seed, then a column header, then
// data rows. Floats are written with 9 significant digits.
//
// trajectory.csv  t, e1..e6, edot1..edot6, F1..F6, u1..u18, h_min, events
// updates.csv     tick, t, apply_tick, status, iterations, kkt_residual,
//                 cost_before, cost_after, u1..u18
// metrics.txt     one "key: value" line per metric, "N/A" when unavailable
// comparison.csv  scenario, mode, approaching_time, settling_time,
//                 steady_force_variance, min_barrier, fitave_total

#include "vicopt/fig2.hpp"
#include "vicopt/runtime.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

namespace vicopt {

/// printf("%.9g"); NaN and infinities as "nan", "inf", "-inf".
std::string format_number(double v);
/// format_number(value) or "N/A" when not converged.
std::string format_metric(const MetricValue& m);

/// Compact scenario JSON plus seed, without the leading '#'.
std::string provenance_line(const Scenario& scenario);

void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log, const Scenario& scenario);
void write_updates_csv(std::ostream& out, const TrajectoryLog& log, const Scenario& scenario);
void write_metrics_text(std::ostream& out, const MetricsReport& metrics, const TrajectoryLog& log);

struct ComparisonRow {
  std::string scenario;
  ModeResult result;
};
void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);
/// Aligned plain-text table with the same columns.
void write_comparison_text(std::ostream& out, const std::vector<ComparisonRow>& rows);

/// Long format: run, t, e, e_dot, F for the three single-axis trajectories.
void write_fig2_csv(std::ostream& out, const Fig2Result& result);
void write_fig2_summary(std::ostream& out, const Fig2Result& result);

/// Opens `path` for writing (creating parent directories); throws Error
/// naming the path on failure.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace vicopt
