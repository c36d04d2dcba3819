#pragma once

// Two-rate executive: a safety QP every tick around the latest optimized
// gains, and a FITAVE gain re-optimization over the buffered force window
// every buffer_period seconds. Also the constant-gain baseline and the
// episode metrics.

#include "vicopt/config.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace vicopt {

/// Bit flags stored in TickRecord::events.
enum TickEvent : std::uint32_t {
  kEventUpdateStarted = 1u << 0,
  kEventUpdateApplied = 1u << 1,
  /// The safety QP moved u away from u*.
  kEventSafetyActive = 1u << 2,
  /// Safety QP infeasible; the min-max relaxation was applied.
  kEventRelaxed = 1u << 3,
  kEventQpFailure = 1u << 4,
  kEventNonFinite = 1u << 5,
};

struct TickRecord {
  double t = 0.0;
  Vector6 e = Vector6::Zero();
  Vector6 e_dot = Vector6::Zero();
  Wrench force = Wrench::Zero();
  /// Gains applied over [t, t + dt).
  GainVector u = GainVector::Zero();
  /// Barrier values h (upper, lower per active axis); empty without a safe set.
  std::vector<double> barriers;
  double h_min = std::numeric_limits<double>::infinity();
  /// min over barrier rows of a.u + b at the applied u.
  double min_row = std::numeric_limits<double>::infinity();
  std::uint32_t events = 0;
};

struct UpdateRecord {
  int tick = 0;
  double t = 0.0;
  int apply_tick = 0;
  GainVector u_before = GainVector::Zero();
  GainVector u_star = GainVector::Zero();
  double cost_before = 0.0;
  double cost_after = 0.0;
  SolveReport report;
};

struct TrajectoryLog {
  std::string scenario_name;
  std::uint64_t seed = 0;
  ControlMode mode = ControlMode::SafeOnGoVic;
  double dt = kMaxStep;
  std::vector<TickRecord> ticks;
  std::vector<UpdateRecord> updates;
  bool terminated = false;
  std::string terminal_event;

  /// Ticks with t in [t0, t1) as a cost window whose origin is t0.
  TrajectoryWindow window(double t0, double t1) const;
};

/// Low-frequency problem: minimize the configured cost of re-simulating the
/// window under candidate gains, warm-started at `warm`.
SolveReport optimize_gains(const TrajectoryWindow& window, const GainVector& warm, const Scenario& scenario,
                           std::uint64_t seed);

/// Runs one deterministic episode. A diverging integration ends the episode
/// with terminated=true instead of throwing.
TrajectoryLog run_episode(const Scenario& scenario);

/// A metric that may be unavailable ("N/A" / not converged).
struct MetricValue {
  double value = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;

  static MetricValue of(double v) { return {v, true}; }
  static MetricValue not_converged(double v = std::numeric_limits<double>::quiet_NaN()) { return {v, false}; }
};

struct MetricsReport {
  int contact_axis = 0;
  MetricValue approaching_time;
  MetricValue settling_time;
  /// Raw value is always computed; converged only when the error settled.
  MetricValue steady_force_variance;
  MetricValue min_barrier;
  double fitave_total = 0.0;
};

/// `axis` < 0 picks the axis with the largest initial error.
MetricsReport compute_metrics(const TrajectoryLog& log, const MetricsConfig& config, int axis = -1);

struct ModeResult {
  ControlMode mode;
  MetricsReport metrics;
  TrajectoryLog log;
};

/// Runs the scenario once per mode with the same seed. Needs >= 2 modes.
std::vector<ModeResult> compare_baselines(const Scenario& scenario, const std::vector<ControlMode>& modes);

}  // namespace vicopt
