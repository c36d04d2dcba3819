#pragma once

#include "vicopt/environment.hpp"
#include "vicopt/objective.hpp"
#include "vicopt/optimizer.hpp"
#include "vicopt/safety.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace vicopt {

enum class ControlMode { SafeOnGoVic, ConstantGain };

std::string_view to_string(ControlMode mode);
/// Accepts "safe_ongo_vic" and "constant_gain"; throws ValidationError.
ControlMode parse_control_mode(std::string_view text);

struct LoopConfig {
  double tick_rate = 125.0;
  /// Low-frequency period T; also the length of the force buffer.
  double buffer_period = 3.0;
  double gamma = 5.0;
  ControlMode mode = ControlMode::SafeOnGoVic;
  /// Simulated time between starting a low-frequency solve and applying it.
  double solve_latency = 0.0;
  /// RK4 substeps per tick for stiff contact.
  int substeps = 1;
  CostKind cost = CostKind::Fitave;
  RolloutMode rollout = RolloutMode::Resimulate;
  QpOptions qp;
  SqpOptions sqp;

  void validate() const;
  double dt() const { return 1.0 / tick_rate; }
};

struct MetricsConfig {
  double touch_force = 0.5;
  double settling_band = 0.02;
  double settling_floor = 1e-3;
  double dwell = 1.0;
  double steady_window = 3.0;
  /// -1: first surface axis, else the axis with the largest initial error.
  int contact_axis = -1;

  void validate() const;
};

/// Ranges for random positive initialization, in physical units.
struct InitialGains {
  bool randomize = true;
  std::array<double, 2> mass{0.5, 5.0};
  std::array<double, 2> damping{5.0, 50.0};
  std::array<double, 2> stiffness{50.0, 500.0};
  /// Used when randomize is false.
  ImpedanceGains fixed;

  void validate() const;
};

struct Scenario {
  std::string name;
  double episode_length = 10.0;
  std::uint64_t seed = 0;
  PlantState initial;
  Environment environment;
  /// When set, replaces the scripted disturbance with a seeded one.
  std::optional<RandomDisturbanceSpec> random_disturbance;
  std::optional<BoxSafeSet> safe_set;
  LoopConfig loop;
  GainBounds bounds;
  InitialGains initial_gains;
  /// Gains of the constant-gain baseline.
  ImpedanceGains constant_gains;
  MetricsConfig metrics;
  std::string output_dir;

  void validate() const;

  /// Scripted profile, or the random one drawn from `seed`.
  DisturbanceProfile resolved_disturbance() const;
  /// Seeded initial gain vector, clamped to the bounds.
  GainVector initial_input() const;
  int contact_axis() const;
};

}  // namespace vicopt
