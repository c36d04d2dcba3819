#pragma once

// Time-weighted trajectory costs and rollout-based evaluation of a candidate
// gain vector over a horizon.

#include "vicopt/dynamics.hpp"
#include "vicopt/environment.hpp"

#include <span>
#include <variant>
#include <vector>

namespace vicopt {

struct WindowSample {
  double t = 0.0;
  Vector6 e = Vector6::Zero();
  Vector6 e_dot = Vector6::Zero();
  Wrench force = Wrench::Zero();
};

/// Uniformly sampled trajectory segment. Cost time weights are measured from
/// origin_time, which is normally samples.front().t.
struct TrajectoryWindow {
  std::vector<WindowSample> samples;
  double dt = kMaxStep;
  double origin_time = 0.0;

  /// Throws ValidationError on empty or non-uniform windows.
  void validate() const;
  PlantState initial_state() const;
};

/// Trapezoidal integral of (t - origin) * sum_i |e_i(t)|.
double itae(const TrajectoryWindow& window);
/// Trapezoidal integral of (t - origin) * sum_i |e_dot_i(t)|.
double fitave(const TrajectoryWindow& window);

enum class CostKind { Fitave, Itae };

enum class RolloutMode {
  /// Re-integrate the error dynamics under the candidate gains.
  Resimulate,
  /// Keep the recorded states inside g2 and only integrate e_ddot = g2(x_rec) u.
  RecordedState,
};

/// Recorded force samples, zero-order held over each sample period. The
/// referenced samples must outlive the rollout call.
struct ReplayForce {
  std::span<const WindowSample> samples;
  double dt = kMaxStep;
};

/// The true contact model, integrated with `substeps` RK4 steps per sample.
struct LiveForce {
  const Environment* environment = nullptr;
  int substeps = 1;
};

using ForceSource = std::variant<ReplayForce, LiveForce>;

struct RolloutOptions {
  double horizon = 3.0;
  double dt = kMaxStep;
  CostKind cost = CostKind::Fitave;
  RolloutMode mode = RolloutMode::Resimulate;
};

/// Simulates from `init` under constant u. Replay sources define their own
/// length (one step per recorded sample, horizon ignored). The returned window
/// includes the initial sample. Throws NonFiniteError.
TrajectoryWindow rollout(const GainVector& u, const PlantState& init, const ForceSource& source,
                         const RolloutOptions& options);

/// Cost of `rollout`; +infinity when the rollout diverges.
double rollout_cost(const GainVector& u, const PlantState& init, const ForceSource& source,
                    const RolloutOptions& options);

double window_cost(const TrajectoryWindow& window, CostKind kind);

}  // namespace vicopt
