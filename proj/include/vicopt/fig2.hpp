#pragma once

// 1-DoF surface-contact study: a point starting at e0 approaches a stiff
// spring surface at e = 1 under impedance control. Gains are chosen three
// ways (FITAVE-optimal, ITAE-optimal, a manual set) and the resulting
// trajectories are compared.

#include "vicopt/objective.hpp"
#include "vicopt/optimizer.hpp"

#include <array>
#include <string>
#include <vector>

namespace vicopt {

struct Fig2Config {
  ContactSurface surface{0, 1.0, 1e4, 0.0, -1};
  double e0 = 2.0;
  double horizon = 5.0;
  double dt = 1.0 / 125.0;
  int substeps = 10;
  /// Box on the optimized (K'_d, K'_p, 1/M) of the single axis.
  std::array<double, 3> lower{0.5, 5.0, 0.1};
  std::array<double, 3> upper{40.0, 100.0, 2.0};
  /// Hand-tuned comparison set (M, K_d, K_p).
  std::array<double, 3> manual{1.0, 6.0, 30.0};
  /// Multi-start points for both optimizations, as (K'_d, K'_p, 1/M).
  std::vector<std::array<double, 3>> starts{{5.0, 20.0, 1.0}, {20.0, 60.0, 0.5}, {2.0, 10.0, 1.5}};
  SqpOptions sqp{60, 1e-7, 1e-5, 10, 0, 1e-4, 30, {1e-10, 200}};
};

struct Fig2Trajectory {
  std::string label;
  GainVector u = GainVector::Ones();
  TrajectoryWindow window;
  double fitave = 0.0;
  double itae = 0.0;
  bool touched = false;
  double touch_time = 0.0;
  /// max |e_dot| from first touch to the end of the horizon.
  double contact_velocity_peak = 0.0;
  SolveReport report;
};

struct Fig2Result {
  Fig2Config config;
  /// FITAVE-optimized, ITAE-optimized, manual.
  std::array<Fig2Trajectory, 3> runs;
  double wall_time = 0.0;
};

/// Gain vector with the axis-0 entries set from (K'_d, K'_p, 1/M) and every
/// other axis at 1.
GainVector single_axis_input(double kd_prime, double kp_prime, double inv_mass);

Fig2Result reproduce_fig2(const Fig2Config& config = {});

}  // namespace vicopt
