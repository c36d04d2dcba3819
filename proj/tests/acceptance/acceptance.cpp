// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//
// Environment knobs:
//   VICOPT_SOLVE_TIME_LIMIT  wall-time limit [s] for the single low-frequency
//                            solve (default 1.0), for slow CI machines.

#include "vicopt/fig2.hpp"
#include "vicopt/report.hpp"
#include "vicopt/runtime.hpp"
#include "vicopt/scenario_io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace vicopt;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = VICOPT_SCENARIO_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit;  // seconds
  std::function<Outcome()> check;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---- 1: single-axis contact study ----
Outcome fig2_ordering() {
  const Fig2Result r = reproduce_fig2();
  const auto& fit = r.runs[0];
  const auto& ita = r.runs[1];
  const auto& man = r.runs[2];
  const bool cost_order = fit.fitave <= ita.fitave && fit.fitave <= man.fitave;
  const bool peak_order = fit.contact_velocity_peak < ita.contact_velocity_peak &&
                          fit.contact_velocity_peak < man.contact_velocity_peak;
  std::ostringstream d;
  d << "FITAVE fitave/itae/manual = " << format_number(fit.fitave) << "/" << format_number(ita.fitave) << "/"
    << format_number(man.fitave) << ", contact |e_dot| peak = " << format_number(fit.contact_velocity_peak) << "/"
    << format_number(ita.contact_velocity_peak) << "/" << format_number(man.contact_velocity_peak);
  return {cost_order && peak_order, d.str()};
}

// ---- 2: box invariance under random pushes ----
Outcome box_invariance() {
  const Scenario base = load_scenario(kScenarios / "exp1_box_disturbance.json");
  double worst = std::numeric_limits<double>::infinity();
  int infeasible_ticks = 0;
  int failed = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Scenario s = base;
    s.seed = seed;
    // Alternate between moderate and heavy pushes.
    if (seed % 2 == 0) s.random_disturbance->magnitude = {20.0, 60.0};
    const TrajectoryLog log = run_episode(s);
    const MetricsReport m = compute_metrics(log, s.metrics);
    for (const auto& r : log.ticks) {
      if (r.events & (kEventRelaxed | kEventQpFailure)) ++infeasible_ticks;
    }
    if (log.terminated || !m.min_barrier.converged || m.min_barrier.value < -1e-3) ++failed;
    if (m.min_barrier.converged) worst = std::min(worst, m.min_barrier.value);
  }
  std::ostringstream d;
  d << "100 episodes, worst min_barrier " << format_number(worst) << " m, episodes below -1e-3: " << failed
    << ", infeasible QP ticks: " << infeasible_ticks;
  return {failed == 0 && infeasible_ticks == 0, d.str()};
}

// ---- 3: barrier constraint row vs flow derivative ----
Outcome constraint_oracle() {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> pos(-0.9, 0.9), vel(-2.0, 2.0), force(-30.0, 30.0);
  std::uniform_real_distribution<double> log_gain(-1.0, 2.0), gamma_d(0.2, 20.0);
  const BoxSafeSet set;
  double worst = 0.0;
  int samples = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    PlantState s;
    Wrench f;
    GainVector u;
    for (int i = 0; i < kAxes; ++i) {
      s.e(i) = pos(rng);
      s.e_dot(i) = vel(rng);
      f(i) = force(rng);
    }
    for (int i = 0; i < kGainDim; ++i) u(i) = std::pow(10.0, log_gain(rng));
    const BarrierParams params{gamma_d(rng)};
    const auto constant = [&f](const PlantState&) { return f; };
    const double delta = 1e-5;
    const PlantState fwd = rk4_step(s, u, constant, delta);
    const PlantState bwd = rk4_step(s, u, constant, -delta);
    const auto bs = barrier_values(s, set);
    const auto bf = barrier_values(fwd, set);
    const auto bb = barrier_values(bwd, set);
    // One (state, u, F, gamma) sample: check every barrier of the box.
    for (std::size_t j = 0; j < bs.size(); ++j) {
      const double dh = (extended_barrier(fwd, bf[j], params) - extended_barrier(bwd, bb[j], params)) / (2.0 * delta);
      const double expected = dh + params.gamma * extended_barrier(s, bs[j], params);
      const double got = constraint_row(s, f, bs[j], params).value(u);
      worst = std::max(worst, std::abs(got - expected) / std::max(std::abs(expected), 1e-6));
    }
    ++samples;
  }
  return {worst <= 1e-4, std::to_string(samples) + " samples, max relative error " + format_number(worst)};
}

// ---- 4: gain map round trip ----
Outcome gain_round_trip() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> log_u(-6.0, 6.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    GainVector u;
    for (int i = 0; i < kGainDim; ++i) u(i) = std::pow(10.0, log_u(rng));
    const GainVector back = input_from_gains(recover_gains(u));
    worst = std::max(worst, (back - u).cwiseQuotient(u).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-12, "1000 vectors, max relative error " + format_number(worst)};
}

// ---- 5: RK4 convergence order ----
double oscillator_error(double dt) {
  // e'' + 2 z w e' + w^2 e = 0, e(0)=1, e'(0)=0.
  const double zeta = 0.1, omega = 5.0, t_end = 2.0;
  GainVector u = GainVector::Ones();
  u.segment<kAxes>(kDampingBlock).setConstant(2.0 * zeta * omega);
  u.segment<kAxes>(kStiffnessBlock).setConstant(omega * omega);
  PlantState s;
  s.e.setConstant(1.0);
  const ForceField none = [](const PlantState&) { return Wrench::Zero(); };
  const int n = static_cast<int>(std::llround(t_end / dt));
  for (int k = 0; k < n; ++k) s = integrate_step(s, u, none, dt);
  const double wd = omega * std::sqrt(1.0 - zeta * zeta);
  const double exact =
      std::exp(-zeta * omega * t_end) * (std::cos(wd * t_end) + zeta * omega / wd * std::sin(wd * t_end));
  return std::abs(s.e(0) - exact);
}

Outcome integrator_order() {
  const double e1 = oscillator_error(kMaxStep);
  const double e2 = oscillator_error(kMaxStep / 2.0);
  const double e3 = oscillator_error(kMaxStep / 4.0);
  const double r1 = e1 / e2, r2 = e2 / e3;
  const bool ok = r1 >= 12.0 && r1 <= 20.0 && r2 >= 12.0 && r2 <= 20.0;
  return {ok, "error ratios " + fmt("%.3f", r1) + ", " + fmt("%.3f", r2)};
}

// ---- 6: solver correctness ----
QpProblem random_qp(std::mt19937_64& rng, int n, int m, int rank) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> slack(0.0, 1.0);
  Eigen::MatrixXd L(n, rank);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < rank; ++j) L(i, j) = g(rng);
  QpProblem p;
  p.H = L * L.transpose();
  p.c = Eigen::VectorXd::NullaryExpr(n, [&] { return 3.0 * g(rng); });
  const Eigen::VectorXd x0 = Eigen::VectorXd::NullaryExpr(n, [&] { return g(rng); });
  p.A.resize(m + 2 * n, n);
  p.b.resize(m + 2 * n);
  for (int r = 0; r < m; ++r) {
    for (int j = 0; j < n; ++j) p.A(r, j) = g(rng);
    p.b(r) = -p.A.row(r).dot(x0) + slack(rng);
  }
  p.A.bottomRows(2 * n).setZero();
  for (int i = 0; i < n; ++i) {
    p.A(m + 2 * i, i) = 1.0;
    p.A(m + 2 * i + 1, i) = -1.0;
    p.b(m + 2 * i) = 5.0;
    p.b(m + 2 * i + 1) = 5.0;
  }
  return p;
}

// Halving the window each level keeps the true optimum inside it even when
// the best coarse point sits some way along a slanted edge.
Eigen::Vector2d grid_minimum(const QpProblem& p) {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double width = 5.0;
  const int n = 200;
  for (int level = 0; level < 18; ++level, width *= 0.5) {
    double best = std::numeric_limits<double>::infinity();
    Eigen::Vector2d arg = center;
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const Eigen::Vector2d x = center + width * Eigen::Vector2d(2.0 * i / n - 1.0, 2.0 * j / n - 1.0);
        if (((p.A * x + p.b).array() < 0.0).any()) continue;
        if (const double f = p.objective(x); f < best) {
          best = f;
          arg = x;
        }
      }
    }
    center = arg;
  }
  return center;
}

Outcome solver_correctness() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(2, 18), rows(0, 30);
  double worst_kkt = 0.0;
  int not_optimal = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = dim(rng);
    const QpProblem p = random_qp(rng, n, rows(rng), std::max(1, n - trial % 4));
    const SolveReport r = qp_solve(p);
    if (r.status != SolveStatus::Optimal) ++not_optimal;
    worst_kkt = std::max(worst_kkt, kkt_residual(p, r.solution, r.multipliers).max());
  }

  double worst_grid = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const QpProblem p = random_qp(rng, 2, 3, 2);
    const SolveReport r = qp_solve(p);
    worst_grid = std::max(worst_grid, (r.solution - grid_minimum(p)).cwiseAbs().maxCoeff());
  }

  const CostFunction sines = [](const Eigen::VectorXd& u) { return u.array().sin().sum(); };
  const Box box{Eigen::VectorXd::Constant(kGainDim, -10.0), Eigen::VectorXd::Constant(kGainDim, 10.0)};
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  double worst_grad = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd x = Eigen::VectorXd::NullaryExpr(kGainDim, [&] { return d(rng); });
    const Eigen::VectorXd fd = finite_difference_gradient(sines, x, sines(x), box, 1e-5);
    const Eigen::VectorXd exact = x.array().cos();
    worst_grad = std::max(worst_grad, (fd - exact).norm() / exact.norm());
  }

  const GainVector u_star = GainVector::LinSpaced(0.5, 30.0);
  std::vector<ConstraintRow> inactive;
  PlantState rest;
  for (const auto& b : barrier_values(rest, BoxSafeSet{})) {
    inactive.push_back(constraint_row(rest, Wrench::Zero(), b, BarrierParams{}));
  }
  const SolveReport filt = safety_filter(u_star, inactive, GainBounds{});
  const double moved = (GainVector(filt.solution) - u_star).cwiseAbs().maxCoeff();

  const bool ok = not_optimal == 0 && worst_kkt <= 1e-8 && worst_grid <= 2e-3 && worst_grad < 1e-5 &&
                  filt.status == SolveStatus::Optimal && moved == 0.0;
  std::ostringstream s;
  s << "KKT max " << format_number(worst_kkt) << " (non-optimal " << not_optimal << "), grid gap "
    << format_number(worst_grid) << ", FD gradient rel " << format_number(worst_grad) << ", filter moved u* by "
    << format_number(moved);
  return {ok, s.str()};
}

// ---- 7: boards comparison ----
Outcome boards_comparison() {
  bool ok = true;
  std::ostringstream d;
  for (const char* board : {"exp2_plastic", "exp2_metal", "exp2_wood"}) {
    const Scenario s = load_scenario(kScenarios / (std::string(board) + ".json"));
    const auto results = compare_baselines(s, {ControlMode::ConstantGain, ControlMode::SafeOnGoVic});
    const auto& cgic = results[0].metrics;
    const auto& ours = results[1].metrics;
    // A baseline that never settles counts as slower.
    const bool settle = ours.settling_time.converged &&
                        (!cgic.settling_time.converged || ours.settling_time.value < cgic.settling_time.value);
    const bool variance = ours.steady_force_variance.converged &&
                          ours.steady_force_variance.value < cgic.steady_force_variance.value;
    const auto& log = results[1].log;
    bool cost = false;
    double pre = NAN, post = NAN;
    if (!log.updates.empty()) {
      const double t = log.updates.front().t;
      pre = fitave(log.window(t - 3.0, t));
      post = fitave(log.window(t, t + 3.0));
      cost = post < pre;
    }
    ok = ok && settle && variance && cost;
    d << board << ": settle " << format_metric(ours.settling_time) << " vs " << format_metric(cgic.settling_time)
      << ", var " << format_metric(ours.steady_force_variance) << " vs "
      << format_number(cgic.steady_force_variance.value) << ", FITAVE " << format_number(post) << " < "
      << format_number(pre) << "; ";
  }
  return {ok, d.str()};
}

// ---- 8: solve time ----
Outcome solve_time() {
  double limit = 1.0;
  if (const char* env = std::getenv("VICOPT_SOLVE_TIME_LIMIT")) limit = std::atof(env);
  Scenario s = load_scenario(kScenarios / "exp2_metal.json");
  s.episode_length = 3.0;
  const TrajectoryLog log = run_episode(s);
  const TrajectoryWindow window = log.window(0.0, 3.0);
  const GainVector warm = log.ticks.back().u;
  const auto start = std::chrono::steady_clock::now();
  const SolveReport r = optimize_gains(window, warm, s, s.seed);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream d;
  d << window.samples.size() << " samples, " << kGainDim << " variables, " << fmt("%.3f", wall) << " s (limit "
    << fmt("%.3g", limit) << " s), status " << to_string(r.status) << ", " << r.iterations << " iterations";
  return {window.samples.size() == 375 && wall < limit, d.str()};
}

// ---- 9: determinism ----
Outcome determinism() {
  int scenarios = 0;
  int mismatched = 0;
  for (const auto& entry : fs::directory_iterator(kScenarios)) {
    if (entry.path().extension() != ".json") continue;
    const Scenario s = load_scenario(entry.path());
    std::ostringstream a, b;
    write_trajectory_csv(a, run_episode(s), s);
    write_trajectory_csv(b, run_episode(s), s);
    ++scenarios;
    if (a.str() != b.str()) ++mismatched;
  }
  return {scenarios > 0 && mismatched == 0,
          std::to_string(scenarios) + " scenarios re-run, " + std::to_string(mismatched) + " differ"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "single-axis contact: FITAVE-optimal gains give lowest FITAVE and contact speed", 30.0, fig2_ordering},
      {2, "box safe set holds over 100 seeded push episodes", 120.0, box_invariance},
      {3, "barrier constraint row equals flow derivative of h'", 10.0, constraint_oracle},
      {4, "gain map round trip", 1.0, gain_round_trip},
      {5, "RK4 global error ratio under dt halving", 5.0, integrator_order},
      {6, "QP KKT, grid oracle, FD gradients, inactive safety filter", 60.0, solver_correctness},
      {7, "adaptive gains beat constant gains on three boards", 300.0, boards_comparison},
      {8, "single low-frequency solve time", 60.0, solve_time},
      {9, "byte-identical trajectory CSV on re-run", 120.0, determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.check();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = wall < c.time_limit;
    const bool pass = out.pass && in_time;
    if (!pass) ++failures;
    std::printf("[%s] criterion %d: %s | %s | %.2f s (limit %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                out.detail.c_str(), wall, c.time_limit);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
