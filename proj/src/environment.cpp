#include "vicopt/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace vicopt {

void ContactSurface::validate() const {
  if (axis < 0 || axis >= kAxes) throw ValidationError("surface axis must be in [0, 5]");
  if (!(stiffness > 0.0) || !std::isfinite(stiffness)) throw ValidationError("surface stiffness must be > 0");
  if (!(damping >= 0.0) || !std::isfinite(damping)) throw ValidationError("surface damping must be >= 0");
  if (penetration_sign != 1 && penetration_sign != -1) {
    throw ValidationError("surface penetration_sign must be +1 or -1");
  }
  if (!std::isfinite(location)) throw ValidationError("surface location must be finite");
}

Wrench surface_force(const PlantState& state, const ContactSurface& surface) {
  Wrench f = Wrench::Zero();
  const int i = surface.axis;
  const double sign = surface.penetration_sign;
  const double penetration = sign * (state.e(i) - surface.location);
  if (penetration <= 0.0) return f;
  double fi = -sign * surface.stiffness * penetration - surface.damping * state.e_dot(i);
  // Damping may not turn the push into a pull.
  if (sign * fi > 0.0) fi = 0.0;
  f(i) = fi;
  return f;
}

Wrench DisturbanceSegment::at(double t) const {
  if (t < t_start || t >= t_end) return Wrench::Zero();
  if (shape == SegmentShape::Constant) return wrench;
  return wrench * std::sin(std::numbers::pi * (t - t_start) / (t_end - t_start));
}

void DisturbanceProfile::validate() const {
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const auto& s = segments[k];
    if (!(s.t_start < s.t_end)) throw ValidationError("disturbance segment needs t_start < t_end");
    if (!s.wrench.allFinite()) throw ValidationError("disturbance wrench must be finite");
    if (k > 0 && s.t_start < segments[k - 1].t_end) {
      throw ValidationError("disturbance segments must be ordered and non-overlapping");
    }
  }
}

void RandomDisturbanceSpec::validate() const {
  auto range_ok = [](const std::array<double, 2>& r) { return r[0] >= 0.0 && r[0] <= r[1]; };
  if (!(t_begin >= 0.0 && t_begin < t_end)) throw ValidationError("random disturbance needs 0 <= t_begin < t_end");
  if (!range_ok(duration) || duration[1] <= 0.0) throw ValidationError("random disturbance duration range invalid");
  if (!range_ok(gap)) throw ValidationError("random disturbance gap range invalid");
  if (!range_ok(magnitude)) throw ValidationError("random disturbance magnitude range invalid");
  if (std::none_of(axes.begin(), axes.end(), [](bool b) { return b; })) {
    throw ValidationError("random disturbance needs at least one axis");
  }
}

DisturbanceProfile make_random_disturbance(const RandomDisturbanceSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double lo, double hi) {
    return lo + (hi - lo) * std::generate_canonical<double, 53>(rng);
  };
  std::vector<int> axes;
  for (int i = 0; i < kAxes; ++i) {
    if (spec.axes[i]) axes.push_back(i);
  }

  DisturbanceProfile profile;
  profile.seed = seed;
  double t = spec.t_begin + uniform(spec.gap[0], spec.gap[1]);
  while (true) {
    const double duration = std::max(uniform(spec.duration[0], spec.duration[1]), 1e-3);
    if (t + duration > spec.t_end) break;
    DisturbanceSegment seg;
    seg.t_start = t;
    seg.t_end = t + duration;
    seg.shape = spec.shape;
    const int axis = axes[static_cast<std::size_t>(uniform(0.0, static_cast<double>(axes.size()))) %
                          axes.size()];
    const double direction = uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0;
    seg.wrench(axis) = direction * uniform(spec.magnitude[0], spec.magnitude[1]);
    profile.segments.push_back(seg);
    t = seg.t_end + uniform(spec.gap[0], spec.gap[1]);
  }
  return profile;
}

Wrench disturbance_at(const DisturbanceProfile& profile, double t) {
  Wrench w = Wrench::Zero();
  for (const auto& s : profile.segments) {
    if (s.t_start > t) break;
    w += s.at(t);
  }
  return w;
}

void ReferenceSchedule::validate() const {
  for (std::size_t k = 0; k < waypoints.size(); ++k) {
    if (!waypoints[k].position.allFinite() || !std::isfinite(waypoints[k].t)) {
      throw ValidationError("reference waypoints must be finite");
    }
    if (k > 0 && !(waypoints[k].t > waypoints[k - 1].t)) {
      throw ValidationError("reference waypoint times must be strictly increasing");
    }
  }
}

Vector6 reference_at(const ReferenceSchedule& schedule, double t) {
  const auto& w = schedule.waypoints;
  if (w.empty()) return Vector6::Zero();
  if (t <= w.front().t) return w.front().position;
  if (t >= w.back().t) return w.back().position;
  // First waypoint strictly after t; its predecessor is the active one.
  auto next = std::upper_bound(w.begin(), w.end(), t,
                               [](double value, const Waypoint& wp) { return value < wp.t; });
  const Waypoint& a = *(next - 1);
  if (schedule.interpolation == Interpolation::Hold) return a.position;
  const Waypoint& b = *next;
  const double s = (t - a.t) / (b.t - a.t);
  return a.position + s * (b.position - a.position);
}

void Environment::validate() const {
  for (const auto& s : surfaces) s.validate();
  disturbance.validate();
  reference.validate();
}

Wrench Environment::contact_wrench(const PlantState& state, const Vector6& reference_shift) const {
  Wrench w = Wrench::Zero();
  for (const auto& s : surfaces) {
    ContactSurface shifted = s;
    shifted.location -= reference_shift(s.axis);
    w += surface_force(state, shifted);
  }
  return w;
}

}  // namespace vicopt
