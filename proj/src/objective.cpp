#include "vicopt/objective.hpp"

#include <cmath>
#include <limits>

namespace vicopt {

void TrajectoryWindow::validate() const {
  if (samples.empty()) throw ValidationError("trajectory window is empty");
  if (!(dt > 0.0)) throw ValidationError("trajectory window needs dt > 0");
  for (std::size_t k = 1; k < samples.size(); ++k) {
    if (std::abs(samples[k].t - samples[k - 1].t - dt) > 1e-9) {
      throw ValidationError("trajectory window is not uniformly sampled");
    }
  }
}

PlantState TrajectoryWindow::initial_state() const {
  const auto& s = samples.front();
  return PlantState{s.e, s.e_dot, s.t};
}

namespace {

template <typename Integrand>
double weighted_trapezoid(const TrajectoryWindow& w, Integrand&& magnitude) {
  double sum = 0.0;
  double prev = 0.0;
  for (std::size_t k = 0; k < w.samples.size(); ++k) {
    const auto& s = w.samples[k];
    const double value = (s.t - w.origin_time) * magnitude(s);
    if (k > 0) sum += 0.5 * (prev + value) * (s.t - w.samples[k - 1].t);
    prev = value;
  }
  return sum;
}

}  // namespace

double itae(const TrajectoryWindow& window) {
  return weighted_trapezoid(window, [](const WindowSample& s) { return s.e.cwiseAbs().sum(); });
}

double fitave(const TrajectoryWindow& window) {
  return weighted_trapezoid(window, [](const WindowSample& s) { return s.e_dot.cwiseAbs().sum(); });
}

double window_cost(const TrajectoryWindow& window, CostKind kind) {
  return kind == CostKind::Fitave ? fitave(window) : itae(window);
}

namespace {

TrajectoryWindow resimulate_replay(const GainVector& u, const PlantState& init, const ReplayForce& src) {
  TrajectoryWindow out;
  out.dt = src.dt;
  out.origin_time = init.t;
  const std::size_t n = src.samples.size();
  out.samples.reserve(n + 1);
  PlantState s = init;
  for (std::size_t k = 0; k < n; ++k) {
    const Wrench& f = src.samples[k].force;
    out.samples.push_back({s.t, s.e, s.e_dot, f});
    s = rk4_step(s, u, [&f](const PlantState&) -> const Wrench& { return f; }, src.dt);
    s.t = init.t + static_cast<double>(k + 1) * src.dt;
    if (!s.finite()) throw NonFiniteError("rollout diverged");
  }
  const Wrench held = n > 0 ? src.samples[n - 1].force : Wrench::Zero();
  out.samples.push_back({s.t, s.e, s.e_dot, held});
  return out;
}

TrajectoryWindow recorded_state_replay(const GainVector& u, const PlantState& init, const ReplayForce& src) {
  // e_dot(t) = e_dot(0) + int_0^t g2(x_rec) u, with the recorded states held
  // fixed inside g2; e(t) follows by integrating that velocity.
  TrajectoryWindow out;
  out.dt = src.dt;
  out.origin_time = init.t;
  const std::size_t n = src.samples.size();
  out.samples.reserve(n);
  Vector6 e = init.e;
  Vector6 e_dot = init.e_dot;
  Vector6 prev_acc = Vector6::Zero();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& rec = src.samples[k];
    const Vector6 acc = assemble_g2(PlantState{rec.e, rec.e_dot, rec.t}, rec.force) * u;
    if (k > 0) {
      const Vector6 next_e_dot = e_dot + 0.5 * src.dt * (prev_acc + acc);
      e += 0.5 * src.dt * (e_dot + next_e_dot);
      e_dot = next_e_dot;
    }
    prev_acc = acc;
    out.samples.push_back({init.t + static_cast<double>(k) * src.dt, e, e_dot, rec.force});
  }
  if (!(e.allFinite() && e_dot.allFinite())) throw NonFiniteError("rollout diverged");
  return out;
}

TrajectoryWindow simulate_live(const GainVector& u, const PlantState& init, const LiveForce& src,
                               const RolloutOptions& opt) {
  if (src.environment == nullptr) throw std::invalid_argument("live force source without environment");
  const Environment& env = *src.environment;
  const Vector6 no_shift = Vector6::Zero();
  auto force = [&](const PlantState& p) { return env.total_wrench(p, no_shift); };

  const auto steps = static_cast<std::size_t>(std::llround(opt.horizon / opt.dt));
  TrajectoryWindow out;
  out.dt = opt.dt;
  out.origin_time = init.t;
  out.samples.reserve(steps + 1);
  const double h = opt.dt / src.substeps;
  PlantState s = init;
  for (std::size_t k = 0; k <= steps; ++k) {
    out.samples.push_back({s.t, s.e, s.e_dot, force(s)});
    if (k == steps) break;
    for (int j = 0; j < src.substeps; ++j) s = rk4_step(s, u, force, h);
    s.t = init.t + static_cast<double>(k + 1) * opt.dt;
    if (!s.finite()) throw NonFiniteError("rollout diverged");
  }
  return out;
}

}  // namespace

TrajectoryWindow rollout(const GainVector& u, const PlantState& init, const ForceSource& source,
                         const RolloutOptions& options) {
  if (!(options.dt > 0.0)) throw std::invalid_argument("rollout dt must be > 0");
  if (const auto* replay = std::get_if<ReplayForce>(&source)) {
    if (options.mode == RolloutMode::RecordedState) return recorded_state_replay(u, init, *replay);
    return resimulate_replay(u, init, *replay);
  }
  if (!(options.horizon > 0.0)) throw std::invalid_argument("rollout horizon must be > 0");
  return simulate_live(u, init, std::get<LiveForce>(source), options);
}

double rollout_cost(const GainVector& u, const PlantState& init, const ForceSource& source,
                    const RolloutOptions& options) {
  try {
    const double c = window_cost(rollout(u, init, source, options), options.cost);
    return std::isfinite(c) ? c : std::numeric_limits<double>::infinity();
  } catch (const NonFiniteError&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace vicopt
