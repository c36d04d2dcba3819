#include "vicopt/runtime.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <stdexcept>

namespace vicopt {

TrajectoryWindow TrajectoryLog::window(double t0, double t1) const {
  TrajectoryWindow w;
  w.dt = dt;
  w.origin_time = t0;
  const double eps = 1e-9;
  for (const auto& r : ticks) {
    if (r.t + eps >= t0 && r.t < t1 - eps) w.samples.push_back({r.t, r.e, r.e_dot, r.force});
  }
  return w;
}

SolveReport optimize_gains(const TrajectoryWindow& window, const GainVector& warm, const Scenario& scenario,
                           std::uint64_t seed) {
  window.validate();
  const PlantState init = window.initial_state();
  const ForceSource source = ReplayForce{window.samples, window.dt};
  RolloutOptions ro;
  ro.dt = window.dt;
  ro.horizon = static_cast<double>(window.samples.size()) * window.dt;
  ro.cost = scenario.loop.cost;
  ro.mode = scenario.loop.rollout;

  const CostFunction cost = [&](const Eigen::VectorXd& u) {
    return rollout_cost(GainVector(u), init, source, ro);
  };
  SqpOptions opts = scenario.loop.sqp;
  opts.seed = seed;
  const Box box{scenario.bounds.lower, scenario.bounds.upper};
  return sqp_solve(cost, warm, box, opts);
}

namespace {

struct PendingUpdate {
  GainVector u;
  int apply_tick = 0;
};

int update_tick(int index, const LoopConfig& loop) {
  return static_cast<int>(std::floor(index * loop.buffer_period * loop.tick_rate + 1e-9));
}

}  // namespace

TrajectoryLog run_episode(const Scenario& scenario) {
  scenario.validate();
  const LoopConfig& loop = scenario.loop;
  const double dt = loop.dt();
  const int n_ticks = static_cast<int>(std::llround(scenario.episode_length * loop.tick_rate));
  const int buffer_len = std::max(1, static_cast<int>(std::llround(loop.buffer_period * loop.tick_rate)));
  const int latency_ticks = static_cast<int>(std::llround(loop.solve_latency * loop.tick_rate));
  const bool adaptive = loop.mode == ControlMode::SafeOnGoVic;

  Environment env = scenario.environment;
  env.disturbance = scenario.resolved_disturbance();
  const BarrierParams barrier{loop.gamma};

  TrajectoryLog log;
  log.scenario_name = scenario.name;
  log.seed = scenario.seed;
  log.mode = loop.mode;
  log.dt = dt;
  log.ticks.reserve(static_cast<std::size_t>(n_ticks));

  GainVector u_star = adaptive ? scenario.initial_input() : input_from_gains(scenario.constant_gains);
  std::optional<PendingUpdate> pending;
  std::deque<WindowSample> buffer;
  int next_update = 1;

  PlantState x = scenario.initial;
  x.t = 0.0;
  const Vector6 reference0 = reference_at(env.reference, 0.0);
  Vector6 reference_prev = reference0;

  for (int k = 0; k < n_ticks; ++k) {
    TickRecord rec;
    const double t = static_cast<double>(k) * dt;
    x.t = t;

    // A reference jump moves the error by the opposite amount.
    const Vector6 reference = reference_at(env.reference, t);
    if (reference != reference_prev) {
      x.e -= reference - reference_prev;
      reference_prev = reference;
    }
    const Vector6 shift = reference - reference0;

    if (adaptive && k == update_tick(next_update, loop)) {
      ++next_update;
      if (static_cast<int>(buffer.size()) == buffer_len) {
        TrajectoryWindow window;
        window.dt = dt;
        window.samples.assign(buffer.begin(), buffer.end());
        window.origin_time = window.samples.front().t;
        UpdateRecord up;
        up.tick = k;
        up.t = t;
        up.apply_tick = k + latency_ticks;
        up.u_before = u_star;
        RolloutOptions ro;
        ro.dt = dt;
        ro.cost = loop.cost;
        ro.mode = loop.rollout;
        up.cost_before = rollout_cost(u_star, window.initial_state(), ReplayForce{window.samples, dt}, ro);
        up.report = optimize_gains(window, u_star, scenario, scenario.seed + static_cast<std::uint64_t>(k));
        up.u_star = GainVector(up.report.solution);
        up.cost_after = up.report.objective;
        rec.events |= kEventUpdateStarted;
        if (up.report.status != SolveStatus::NonFiniteCost) pending = PendingUpdate{up.u_star, up.apply_tick};
        log.updates.push_back(std::move(up));
      }
    }
    if (pending && k >= pending->apply_tick) {
      u_star = pending->u;
      pending.reset();
      rec.events |= kEventUpdateApplied;
    }

    const Wrench force = env.total_wrench(x, shift);
    GainVector u = u_star;
    std::vector<ConstraintRow> rows;
    std::vector<BarrierValue> barriers;
    if (scenario.safe_set) {
      barriers = barrier_values(x, *scenario.safe_set);
      rows.reserve(barriers.size());
      for (const auto& b : barriers) rows.push_back(constraint_row(x, force, b, barrier));
    }
    if (adaptive) {
      const SolveReport qp = safety_filter(u_star, rows, scenario.bounds, loop.qp);
      if (qp.status == SolveStatus::Relaxed) {
        rec.events |= kEventRelaxed;
      } else if (qp.status != SolveStatus::Optimal) {
        rec.events |= kEventQpFailure;
      }
      u = GainVector(qp.solution);
      if ((u - u_star).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + u_star.cwiseAbs().maxCoeff())) {
        rec.events |= kEventSafetyActive;
      }
    }

    rec.t = t;
    rec.e = x.e;
    rec.e_dot = x.e_dot;
    rec.force = force;
    rec.u = u;
    for (const auto& b : barriers) {
      rec.barriers.push_back(b.h);
      rec.h_min = std::min(rec.h_min, b.h);
    }
    for (const auto& r : rows) rec.min_row = std::min(rec.min_row, r.value(u));

    buffer.push_back({t, x.e, x.e_dot, force});
    if (static_cast<int>(buffer.size()) > buffer_len) buffer.pop_front();

    try {
      const ForceField field = [&env, &shift](const PlantState& s) { return env.total_wrench(s, shift); };
      x = integrate_step(x, u, field, dt, loop.substeps);
    } catch (const NonFiniteError& err) {
      rec.events |= kEventNonFinite;
      log.ticks.push_back(std::move(rec));
      log.terminated = true;
      log.terminal_event = err.what();
      break;
    }
    log.ticks.push_back(std::move(rec));
  }
  return log;
}

MetricsReport compute_metrics(const TrajectoryLog& log, const MetricsConfig& config, int axis) {
  if (log.ticks.empty()) throw std::invalid_argument("compute_metrics: empty log");
  config.validate();
  const auto& ticks = log.ticks;
  const auto n = ticks.size();
  if (axis < 0) ticks.front().e.cwiseAbs().maxCoeff(&axis);

  MetricsReport m;
  m.contact_axis = axis;

  std::size_t contact = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(ticks[k].force(axis)) > config.touch_force) {
      m.approaching_time = MetricValue::of(ticks[k].t);
      contact = k;
      break;
    }
  }

  // First tick (from first touch) after which |e - e_ss| stays in the band for
  // the whole dwell window.
  const double e0 = ticks.front().e(axis);
  const double e_ss = ticks.back().e(axis);
  const double band = std::max(config.settling_band * std::abs(e0), config.settling_floor);
  const auto dwell = static_cast<std::size_t>(std::llround(config.dwell / log.dt));
  std::vector<std::size_t> run(n + 1, 0);
  for (std::size_t k = n; k-- > 0;) {
    run[k] = std::abs(ticks[k].e(axis) - e_ss) <= band ? run[k + 1] + 1 : 0;
  }
  for (std::size_t k = contact; k < n; ++k) {
    if (run[k] >= dwell + 1) {
      m.settling_time = MetricValue::of(ticks[k].t);
      break;
    }
  }

  const auto window = std::min(n, static_cast<std::size_t>(std::max<long long>(
                                      2, std::llround(config.steady_window / log.dt))));
  double mean = 0.0;
  for (std::size_t k = n - window; k < n; ++k) mean += ticks[k].force(axis);
  mean /= static_cast<double>(window);
  double var = 0.0;
  for (std::size_t k = n - window; k < n; ++k) {
    const double d = ticks[k].force(axis) - mean;
    var += d * d;
  }
  var = window > 1 ? var / static_cast<double>(window - 1) : 0.0;
  m.steady_force_variance = m.settling_time.converged ? MetricValue::of(var) : MetricValue::not_converged(var);

  double h_min = std::numeric_limits<double>::infinity();
  bool any_barrier = false;
  for (const auto& r : ticks) {
    if (!r.barriers.empty()) {
      any_barrier = true;
      h_min = std::min(h_min, r.h_min);
    }
  }
  if (any_barrier) m.min_barrier = MetricValue::of(h_min);

  TrajectoryWindow all;
  all.dt = log.dt;
  all.origin_time = ticks.front().t;
  all.samples.reserve(n);
  for (const auto& r : ticks) all.samples.push_back({r.t, r.e, r.e_dot, r.force});
  m.fitave_total = fitave(all);
  return m;
}

std::vector<ModeResult> compare_baselines(const Scenario& scenario, const std::vector<ControlMode>& modes) {
  if (modes.size() < 2) throw std::invalid_argument("compare_baselines needs at least two modes");
  std::vector<ModeResult> out;
  out.reserve(modes.size());
  for (ControlMode mode : modes) {
    Scenario s = scenario;
    s.loop.mode = mode;
    TrajectoryLog log = run_episode(s);
    MetricsReport metrics = compute_metrics(log, s.metrics, s.contact_axis());
    out.push_back({mode, metrics, std::move(log)});
  }
  return out;
}

}  // namespace vicopt
