#pragma once

// Simulated surroundings of the impedance-controlled end effector: one-sided
// spring surfaces, scripted or seeded disturbance wrenches, and a reference
// schedule that moves the desired position.

#include "vicopt/types.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace vicopt {

/// Penalty-spring plane normal to one axis, in error coordinates.
/// Penetration is penetration_sign * (e - location); contact engages strictly
/// beyond the surface and never pulls (no adhesion).
struct ContactSurface {
  int axis = 2;
  double location = 0.0;
  double stiffness = 1e4;
  double damping = 0.0;
  int penetration_sign = 1;

  void validate() const;
};

Wrench surface_force(const PlantState& state, const ContactSurface& surface);

enum class SegmentShape { Constant, HalfSine };

/// Wrench applied on [t_start, t_end). HalfSine scales the wrench by
/// sin(pi (t - t_start) / (t_end - t_start)).
struct DisturbanceSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  Wrench wrench = Wrench::Zero();
  SegmentShape shape = SegmentShape::Constant;

  Wrench at(double t) const;
};

struct DisturbanceProfile {
  std::vector<DisturbanceSegment> segments;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Generator for seeded human-push stand-ins: one push at a time, random
/// axis/direction/magnitude/duration, separated by random gaps.
struct RandomDisturbanceSpec {
  double t_begin = 0.5;
  double t_end = 10.0;
  std::array<double, 2> duration{0.3, 1.0};
  std::array<double, 2> gap{0.3, 1.5};
  std::array<double, 2> magnitude{5.0, 20.0};
  std::array<bool, kAxes> axes{true, true, true, false, false, false};
  SegmentShape shape = SegmentShape::HalfSine;

  void validate() const;
};

DisturbanceProfile make_random_disturbance(const RandomDisturbanceSpec& spec, std::uint64_t seed);

/// Sum of the active segments at t; zero outside every segment.
Wrench disturbance_at(const DisturbanceProfile& profile, double t);

enum class Interpolation { Hold, Linear };

struct Waypoint {
  double t = 0.0;
  Vector6 position = Vector6::Zero();
};

struct ReferenceSchedule {
  std::vector<Waypoint> waypoints;
  Interpolation interpolation = Interpolation::Hold;

  void validate() const;
};

/// Desired position at t; zero when the schedule is empty.
Vector6 reference_at(const ReferenceSchedule& schedule, double t);

/// Everything that produces a wrench on the end effector.
struct Environment {
  std::vector<ContactSurface> surfaces;
  DisturbanceProfile disturbance;
  ReferenceSchedule reference;

  void validate() const;

  /// Surface reaction with surfaces fixed in the world: when the reference has
  /// moved by `reference_shift` since t=0 the surfaces move by -shift in
  /// error coordinates.
  Wrench contact_wrench(const PlantState& state, const Vector6& reference_shift) const;

  Wrench total_wrench(const PlantState& state, const Vector6& reference_shift) const {
    return contact_wrench(state, reference_shift) + disturbance_at(disturbance, state.t);
  }
};

}  // namespace vicopt
