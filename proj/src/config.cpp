#include "vicopt/config.hpp"

#include "vicopt/dynamics.hpp"

#include <cmath>
#include <random>

namespace vicopt {

std::string_view to_string(ControlMode mode) {
  return mode == ControlMode::SafeOnGoVic ? "safe_ongo_vic" : "constant_gain";
}

ControlMode parse_control_mode(std::string_view text) {
  if (text == "safe_ongo_vic") return ControlMode::SafeOnGoVic;
  if (text == "constant_gain") return ControlMode::ConstantGain;
  throw ValidationError("unknown control mode '" + std::string(text) +
                        "' (expected safe_ongo_vic or constant_gain)");
}

void LoopConfig::validate() const {
  if (!(tick_rate > 0.0) || !std::isfinite(tick_rate)) throw ValidationError("loop: tick_rate must be > 0");
  if (1.0 / tick_rate > kMaxStep * (1.0 + 1e-12)) {
    throw ValidationError("loop: tick_rate must be >= 125 Hz (integration step limit)");
  }
  if (!(buffer_period >= 1.0 / tick_rate)) throw ValidationError("loop: buffer_period must be >= 1/tick_rate");
  if (!(gamma > 0.0)) throw ValidationError("loop: gamma must be > 0");
  if (!(solve_latency >= 0.0)) throw ValidationError("loop: solve_latency must be >= 0");
  if (substeps < 1) throw ValidationError("loop: substeps must be >= 1");
  if (qp.max_iter < 1 || !(qp.tol > 0.0)) throw ValidationError("loop: invalid QP options");
  if (sqp.max_iter < 1 || !(sqp.tol > 0.0) || !(sqp.fd_step > 0.0)) {
    throw ValidationError("loop: invalid SQP options");
  }
}

void MetricsConfig::validate() const {
  if (!(touch_force >= 0.0)) throw ValidationError("metrics: touch_force must be >= 0");
  if (!(settling_band > 0.0)) throw ValidationError("metrics: settling_band must be > 0");
  if (!(settling_floor >= 0.0)) throw ValidationError("metrics: settling_floor must be >= 0");
  if (!(dwell >= 0.0)) throw ValidationError("metrics: dwell must be >= 0");
  if (!(steady_window > 0.0)) throw ValidationError("metrics: steady_window must be > 0");
  if (contact_axis < -1 || contact_axis >= kAxes) throw ValidationError("metrics: contact_axis out of range");
}

void InitialGains::validate() const {
  auto ok = [](const std::array<double, 2>& r) { return r[0] > 0.0 && r[0] <= r[1] && std::isfinite(r[1]); };
  if (randomize) {
    if (!ok(mass) || !ok(damping) || !ok(stiffness)) {
      throw ValidationError("initial_gains: ranges must satisfy 0 < lo <= hi");
    }
  } else if (!fixed.positive()) {
    throw ValidationError("initial_gains: fixed gains must be strictly positive");
  }
}

void Scenario::validate() const {
  if (name.empty()) throw ValidationError("scenario: name must not be empty");
  if (!(episode_length > 0.0) || !std::isfinite(episode_length)) {
    throw ValidationError("scenario: episode_length must be > 0");
  }
  if (!initial.finite()) throw ValidationError("scenario: initial state must be finite");
  environment.validate();
  if (random_disturbance) {
    random_disturbance->validate();
    if (!environment.disturbance.segments.empty()) {
      throw ValidationError("scenario: use either scripted or random disturbance segments, not both");
    }
  }
  if (safe_set) safe_set->validate();
  loop.validate();
  bounds.validate();
  initial_gains.validate();
  if (!constant_gains.positive()) throw ValidationError("scenario: constant_gains must be strictly positive");
  metrics.validate();
}

DisturbanceProfile Scenario::resolved_disturbance() const {
  if (random_disturbance) return make_random_disturbance(*random_disturbance, seed);
  return environment.disturbance;
}

GainVector Scenario::initial_input() const {
  if (!initial_gains.randomize) return bounds.clamp(input_from_gains(initial_gains.fixed));
  // Separate stream from the disturbance generator.
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    0x9a1u};
  std::mt19937_64 rng(seq);
  auto draw = [&rng](const std::array<double, 2>& r) {
    return r[0] + (r[1] - r[0]) * std::generate_canonical<double, 53>(rng);
  };
  ImpedanceGains g;
  for (int i = 0; i < kAxes; ++i) {
    g.mass(i) = draw(initial_gains.mass);
    g.damping(i) = draw(initial_gains.damping);
    g.stiffness(i) = draw(initial_gains.stiffness);
  }
  return bounds.clamp(input_from_gains(g));
}

int Scenario::contact_axis() const {
  if (metrics.contact_axis >= 0) return metrics.contact_axis;
  if (!environment.surfaces.empty()) return environment.surfaces.front().axis;
  int axis = 0;
  initial.e.cwiseAbs().maxCoeff(&axis);
  return axis;
}

}  // namespace vicopt
