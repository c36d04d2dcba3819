#include "vicopt/runtime.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace vicopt;

namespace {

Scenario contact_scenario(double stiffness) {
  Scenario s;
  s.name = "board";
  s.seed = 1;
  s.episode_length = 15.0;
  s.initial.e(2) = 0.3;
  s.environment.surfaces.push_back({2, 0.05, stiffness, 0.0, -1});
  s.loop.substeps = 10;
  s.bounds.lower.segment<kAxes>(kDampingBlock).setConstant(1.0);
  s.bounds.upper.segment<kAxes>(kDampingBlock).setConstant(100.0);
  s.bounds.lower.segment<kAxes>(kStiffnessBlock).setConstant(5.0);
  s.bounds.upper.segment<kAxes>(kStiffnessBlock).setConstant(400.0);
  s.bounds.lower.segment<kAxes>(kInvMassBlock).setConstant(0.05);
  s.bounds.upper.segment<kAxes>(kInvMassBlock).setConstant(2.0);
  s.initial_gains.mass = {0.5, 2.0};
  s.initial_gains.damping = {2.0, 20.0};
  s.initial_gains.stiffness = {50.0, 300.0};
  s.constant_gains.stiffness.setConstant(100.0);
  s.metrics.contact_axis = 2;
  return s;
}

// Log whose contact-axis error decays as exp(-t) with constant force.
TrajectoryLog synthetic_log(double t_end, double force) {
  TrajectoryLog log;
  log.dt = kMaxStep;
  const int n = static_cast<int>(std::llround(t_end / log.dt));
  for (int k = 0; k < n; ++k) {
    TickRecord r;
    r.t = k * log.dt;
    r.e(0) = std::exp(-r.t);
    r.e_dot(0) = -std::exp(-r.t);
    r.force(0) = force;
    log.ticks.push_back(r);
  }
  return log;
}

}  // namespace

TEST(RunEpisode, EquilibriumStaysAtRest) {
  Scenario s;
  s.name = "rest";
  s.episode_length = 7.0;
  s.safe_set = BoxSafeSet{};
  const TrajectoryLog log = run_episode(s);
  ASSERT_EQ(log.ticks.size(), 875u);
  for (const auto& r : log.ticks) {
    EXPECT_TRUE(r.e.isZero(0.0));
    EXPECT_TRUE(r.e_dot.isZero(0.0));
    EXPECT_EQ(r.events & (kEventSafetyActive | kEventRelaxed | kEventQpFailure), 0u);
  }
  EXPECT_FALSE(log.terminated);
}

TEST(RunEpisode, TicksAreStrictlyIncreasing) {
  const TrajectoryLog log = run_episode(contact_scenario(2e4));
  for (std::size_t k = 1; k < log.ticks.size(); ++k) EXPECT_GT(log.ticks[k].t, log.ticks[k - 1].t);
  EXPECT_EQ(log.ticks.size(), 15u * 125u);
}

TEST(RunEpisode, UpdateScheduleAndLatency) {
  Scenario s = contact_scenario(2e4);
  s.episode_length = 10.0;
  s.loop.solve_latency = 0.2;
  const TrajectoryLog log = run_episode(s);
  ASSERT_EQ(log.updates.size(), 3u);
  for (std::size_t j = 0; j < log.updates.size(); ++j) {
    const int tick = static_cast<int>(375 * (j + 1));
    EXPECT_EQ(log.updates[j].tick, tick);
    EXPECT_EQ(log.updates[j].apply_tick, tick + 25);
    EXPECT_TRUE(log.ticks[static_cast<std::size_t>(tick)].events & kEventUpdateStarted);
    EXPECT_TRUE(log.ticks[static_cast<std::size_t>(tick + 25)].events & kEventUpdateApplied);
    // The previous gains stay in force while the solve is in flight.
    EXPECT_EQ(log.ticks[static_cast<std::size_t>(tick + 24)].u, log.updates[j].u_before);
    EXPECT_EQ(log.ticks[static_cast<std::size_t>(tick + 25)].u, log.updates[j].u_star);
  }
}

TEST(RunEpisode, ConstantGainNeverChanges) {
  Scenario s = contact_scenario(2e4);
  s.loop.mode = ControlMode::ConstantGain;
  const TrajectoryLog log = run_episode(s);
  const GainVector u = input_from_gains(s.constant_gains);
  EXPECT_TRUE(log.updates.empty());
  for (const auto& r : log.ticks) EXPECT_EQ(r.u, u);
}

TEST(RunEpisode, SameSeedSameLog) {
  Scenario s = contact_scenario(1e5);
  s.random_disturbance = RandomDisturbanceSpec{};
  const TrajectoryLog a = run_episode(s);
  const TrajectoryLog b = run_episode(s);
  ASSERT_EQ(a.ticks.size(), b.ticks.size());
  for (std::size_t k = 0; k < a.ticks.size(); ++k) {
    EXPECT_EQ(a.ticks[k].e, b.ticks[k].e);
    EXPECT_EQ(a.ticks[k].u, b.ticks[k].u);
    EXPECT_EQ(a.ticks[k].force, b.ticks[k].force);
  }
}

TEST(RunEpisode, FirstUpdateLowersWindowCost) {
  const TrajectoryLog log = run_episode(contact_scenario(5e3));
  ASSERT_FALSE(log.updates.empty());
  const double t_update = log.updates.front().t;
  const double pre = fitave(log.window(t_update - 3.0, t_update));
  const double post = fitave(log.window(t_update, t_update + 3.0));
  EXPECT_LT(post, pre);
}

TEST(RunEpisode, BoxHoldsUnderPushes) {
  Scenario s;
  s.name = "pushes";
  s.seed = 5;
  BoxSafeSet box;
  box.lower.setConstant(-0.1);
  box.upper.setConstant(0.1);
  s.safe_set = box;
  RandomDisturbanceSpec spec;
  spec.magnitude = {20.0, 60.0};
  s.random_disturbance = spec;
  s.bounds.lower.segment<kAxes>(kDampingBlock).setConstant(1.0);
  s.bounds.upper.segment<kAxes>(kDampingBlock).setConstant(100.0);
  s.bounds.lower.segment<kAxes>(kStiffnessBlock).setConstant(1.0);
  s.bounds.upper.segment<kAxes>(kStiffnessBlock).setConstant(400.0);
  s.bounds.lower.segment<kAxes>(kInvMassBlock).setConstant(0.05);
  s.bounds.upper.segment<kAxes>(kInvMassBlock).setConstant(2.0);
  s.initial_gains.mass = {1.0, 2.0};
  s.initial_gains.damping = {5.0, 10.0};
  s.initial_gains.stiffness = {10.0, 30.0};
  const TrajectoryLog log = run_episode(s);
  const MetricsReport m = compute_metrics(log, s.metrics);
  ASSERT_TRUE(m.min_barrier.converged);
  EXPECT_GE(m.min_barrier.value, -1e-3);
  for (const auto& r : log.ticks) EXPECT_EQ(r.events & kEventRelaxed, 0u);
}

TEST(ComputeMetrics, ExponentialSettlesAtLn50) {
  const TrajectoryLog log = synthetic_log(15.0, 3.0);
  const MetricsReport m = compute_metrics(log, MetricsConfig{}, 0);
  ASSERT_TRUE(m.settling_time.converged);
  EXPECT_NEAR(m.settling_time.value, std::log(50.0), log.dt);
  ASSERT_TRUE(m.approaching_time.converged);
  EXPECT_EQ(m.approaching_time.value, 0.0);
}

TEST(ComputeMetrics, ConstantForceHasZeroVariance) {
  const MetricsReport m = compute_metrics(synthetic_log(15.0, 3.0), MetricsConfig{}, 0);
  ASSERT_TRUE(m.steady_force_variance.converged);
  EXPECT_EQ(m.steady_force_variance.value, 0.0);
}

TEST(ComputeMetrics, NoTouchMeansNoApproach) {
  const MetricsReport m = compute_metrics(synthetic_log(5.0, 0.1), MetricsConfig{}, 0);
  EXPECT_FALSE(m.approaching_time.converged);
  EXPECT_FALSE(m.min_barrier.converged);
}

TEST(CompareBaselines, ProposedSettlesFasterOnStiffBoard) {
  const auto results = compare_baselines(contact_scenario(1e5), {ControlMode::ConstantGain, ControlMode::SafeOnGoVic});
  ASSERT_EQ(results.size(), 2u);
  const auto& cgic = results[0].metrics;
  const auto& ours = results[1].metrics;
  ASSERT_TRUE(ours.settling_time.converged);
  ASSERT_TRUE(cgic.settling_time.converged);
  EXPECT_LT(ours.settling_time.value, cgic.settling_time.value);
  EXPECT_LT(ours.steady_force_variance.value, cgic.steady_force_variance.value);
}

TEST(CompareBaselines, IdenticalModesIdenticalReports) {
  const auto results = compare_baselines(contact_scenario(2e4), {ControlMode::SafeOnGoVic, ControlMode::SafeOnGoVic});
  EXPECT_EQ(results[0].metrics.settling_time.value, results[1].metrics.settling_time.value);
  EXPECT_EQ(results[0].metrics.fitave_total, results[1].metrics.fitave_total);
  EXPECT_EQ(results[0].metrics.steady_force_variance.value, results[1].metrics.steady_force_variance.value);
}

TEST(CompareBaselines, NeedsTwoModes) {
  EXPECT_THROW(compare_baselines(contact_scenario(2e4), {ControlMode::SafeOnGoVic}), std::invalid_argument);
}
