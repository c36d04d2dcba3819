#include "vicopt/report.hpp"

#include "vicopt/scenario_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>

namespace vicopt {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string format_metric(const MetricValue& m) { return m.converged ? format_number(m.value) : "N/A"; }

std::string provenance_line(const Scenario& scenario) {
  return "scenario=" + scenario_to_json(scenario, -1) + " seed=" + std::to_string(scenario.seed);
}

namespace {

template <typename Vec>
void put_vector(std::ostream& out, const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ',' << format_number(v(i));
}

void put_columns(std::ostream& out, const char* prefix, int count) {
  for (int i = 1; i <= count; ++i) out << ',' << prefix << i;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log, const Scenario& scenario) {
  out << "# " << provenance_line(scenario) << '\n';
  out << 't';
  put_columns(out, "e", kAxes);
  put_columns(out, "edot", kAxes);
  put_columns(out, "F", kAxes);
  put_columns(out, "u", kGainDim);
  out << ",h_min,events\n";
  for (const auto& r : log.ticks) {
    out << format_number(r.t);
    put_vector(out, r.e);
    put_vector(out, r.e_dot);
    put_vector(out, r.force);
    put_vector(out, r.u);
    out << ',' << format_number(r.h_min) << ',' << r.events << '\n';
  }
}

void write_updates_csv(std::ostream& out, const TrajectoryLog& log, const Scenario& scenario) {
  out << "# " << provenance_line(scenario) << '\n';
  out << "tick,t,apply_tick,status,iterations,kkt_residual,cost_before,cost_after";
  put_columns(out, "u", kGainDim);
  out << '\n';
  for (const auto& u : log.updates) {
    out << u.tick << ',' << format_number(u.t) << ',' << u.apply_tick << ',' << to_string(u.report.status) << ','
        << u.report.iterations << ',' << format_number(u.report.kkt_residual) << ',' << format_number(u.cost_before)
        << ',' << format_number(u.cost_after);
    put_vector(out, u.u_star);
    out << '\n';
  }
}

void write_metrics_text(std::ostream& out, const MetricsReport& m, const TrajectoryLog& log) {
  out << "scenario: " << log.scenario_name << '\n';
  out << "mode: " << to_string(log.mode) << '\n';
  out << "seed: " << log.seed << '\n';
  out << "ticks: " << log.ticks.size() << '\n';
  out << "updates: " << log.updates.size() << '\n';
  out << "terminated: " << (log.terminated ? "yes (" + log.terminal_event + ")" : std::string("no")) << '\n';
  out << "contact_axis: " << m.contact_axis << '\n';
  out << "approaching_time_s: " << format_metric(m.approaching_time) << '\n';
  out << "settling_time_s: " << format_metric(m.settling_time) << '\n';
  out << "steady_force_variance: " << format_metric(m.steady_force_variance) << '\n';
  out << "min_barrier: " << format_metric(m.min_barrier) << '\n';
  out << "fitave_total: " << format_number(m.fitave_total) << '\n';
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "scenario,mode,approaching_time,settling_time,steady_force_variance,min_barrier,fitave_total\n";
  for (const auto& row : rows) {
    const auto& m = row.result.metrics;
    out << row.scenario << ',' << to_string(row.result.mode) << ',' << format_metric(m.approaching_time) << ','
        << format_metric(m.settling_time) << ',' << format_metric(m.steady_force_variance) << ','
        << format_metric(m.min_barrier) << ',' << format_number(m.fitave_total) << '\n';
  }
}

void write_comparison_text(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  const std::vector<std::string> header{"scenario",  "mode",        "approach [s]", "settle [s]",
                                        "F var [N^2]", "min h [m]", "FITAVE"};
  std::vector<std::vector<std::string>> cells{header};
  for (const auto& row : rows) {
    const auto& m = row.result.metrics;
    cells.push_back({row.scenario, std::string(to_string(row.result.mode)), format_metric(m.approaching_time),
                     format_metric(m.settling_time), format_metric(m.steady_force_variance),
                     format_metric(m.min_barrier), format_number(m.fitave_total)});
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  }
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      out << std::left << std::setw(static_cast<int>(width[c])) << line[c] << (c + 1 < line.size() ? "  " : "\n");
    }
  }
}

void write_fig2_csv(std::ostream& out, const Fig2Result& result) {
  out << "run,t,e,e_dot,F\n";
  for (const auto& run : result.runs) {
    for (const auto& s : run.window.samples) {
      out << run.label << ',' << format_number(s.t) << ',' << format_number(s.e(0)) << ','
          << format_number(s.e_dot(0)) << ',' << format_number(s.force(0)) << '\n';
    }
  }
}

void write_fig2_summary(std::ostream& out, const Fig2Result& result) {
  const auto& c = result.config;
  out << "1-DoF surface contact: start e0=" << format_number(c.e0) << ", surface at e="
      << format_number(c.surface.location) << ", stiffness " << format_number(c.surface.stiffness)
      << " N/m, horizon " << format_number(c.horizon) << " s\n";
  out << "run,M,K_d,K_p,fitave,itae,touch_time,contact_velocity_peak,solver_status\n";
  for (const auto& run : result.runs) {
    const double m = 1.0 / run.u(kInvMassBlock);
    out << run.label << ',' << format_number(m) << ',' << format_number(m * run.u(kDampingBlock)) << ','
        << format_number(m * run.u(kStiffnessBlock)) << ',' << format_number(run.fitave) << ','
        << format_number(run.itae) << ',' << (run.touched ? format_number(run.touch_time) : "N/A") << ','
        << format_number(run.contact_velocity_peak) << ','
        << (run.label == "manual" ? std::string("fixed") : std::string(to_string(run.report.status))) << '\n';
  }
  const auto& r = result.runs;
  const bool ordered = r[0].fitave <= r[1].fitave && r[0].fitave <= r[2].fitave;
  out << "fitave_ordering: " << (ordered ? "fitave-optimal is lowest" : "VIOLATED") << '\n';
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace vicopt
