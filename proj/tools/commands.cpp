#include "commands.hpp"

#include "vicopt/report.hpp"
#include "vicopt/runtime.hpp"
#include "vicopt/scenario_io.hpp"

#include <spdlog/spdlog.h>

#include <cstdlib>
#include <future>

namespace vicopt::cli {

namespace fs = std::filesystem;

void configure_logging() {
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("VICOPT_LOG_LEVEL");
  const std::string level = env ? env : "info";
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "warn") {
    spdlog::set_level(spdlog::level::warn);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    spdlog::set_level(spdlog::level::info);
    if (level != "info") spdlog::warn("VICOPT_LOG_LEVEL='{}' not recognized, using info", level);
  }
}

Scenario load_with_overrides(const fs::path& path, const Overrides& overrides) {
  Scenario s = load_scenario(path);
  if (overrides.seed) s.seed = *overrides.seed;
  if (overrides.latency) s.loop.solve_latency = *overrides.latency;
  s.validate();
  return s;
}

namespace {

// Shared error handling: maps exceptions to exit statuses.
template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    spdlog::error("parse error: {}", e.what());
    return kExitInvalidScenario;
  } catch (const ValidationError& e) {
    spdlog::error("invalid scenario: {}", e.what());
    return kExitInvalidScenario;
  } catch (const std::invalid_argument& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitIo;
  }
}

fs::path resolve_out(const fs::path& out_dir, const Scenario& s) {
  if (!out_dir.empty()) return out_dir;
  if (!s.output_dir.empty()) return s.output_dir;
  return fs::path("out") / s.name;
}

void log_metrics(const MetricsReport& m) {
  spdlog::info("approaching {} s, settling {} s, force variance {}, min barrier {}", format_metric(m.approaching_time),
               format_metric(m.settling_time), format_metric(m.steady_force_variance), format_metric(m.min_barrier));
}

}  // namespace

int cmd_run(const fs::path& scenario_path, const fs::path& out_dir, const Overrides& overrides) {
  return guarded([&] {
    const Scenario s = load_with_overrides(scenario_path, overrides);
    spdlog::debug("resolved scenario: {}", scenario_to_json(s, -1));
    const fs::path dir = resolve_out(out_dir, s);
    spdlog::info("running '{}' ({}, seed {}) for {} s", s.name, to_string(s.loop.mode), s.seed, s.episode_length);

    const TrajectoryLog log = run_episode(s);
    const MetricsReport metrics = compute_metrics(log, s.metrics, s.contact_axis());
    for (const auto& u : log.updates) {
      spdlog::debug("update at t={:.3f}: {} after {} iterations, cost {:.6g} -> {:.6g}", u.t,
                    to_string(u.report.status), u.report.iterations, u.cost_before, u.cost_after);
    }
    {
      auto out = open_output(dir / "trajectory.csv");
      write_trajectory_csv(out, log, s);
    }
    {
      auto out = open_output(dir / "updates.csv");
      write_updates_csv(out, log, s);
    }
    {
      auto out = open_output(dir / "metrics.txt");
      write_metrics_text(out, metrics, log);
    }
    log_metrics(metrics);
    spdlog::info("wrote {}", dir.string());
    if (log.terminated) {
      spdlog::error("episode terminated at t={:.4f}: {}", log.ticks.back().t, log.terminal_event);
      return static_cast<int>(kExitTerminal);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_fig2(const fs::path& out_dir) {
  return guarded([&] {
    const fs::path dir = out_dir.empty() ? fs::path("out") / "fig2" : out_dir;
    spdlog::info("optimizing single-axis gains under FITAVE and ITAE");
    const Fig2Result result = reproduce_fig2();
    {
      auto out = open_output(dir / "fig2_trajectories.csv");
      write_fig2_csv(out, result);
    }
    {
      auto out = open_output(dir / "fig2_summary.txt");
      write_fig2_summary(out, result);
    }
    for (const auto& run : result.runs) {
      spdlog::info("{}: FITAVE {:.6g}, ITAE {:.6g}, contact velocity peak {:.4g}", run.label, run.fitave, run.itae,
                   run.contact_velocity_peak);
    }
    spdlog::info("wrote {} ({:.2f} s)", dir.string(), result.wall_time);
    const auto& r = result.runs;
    return (r[0].fitave <= r[1].fitave && r[0].fitave <= r[2].fitave) ? static_cast<int>(kExitOk)
                                                                      : static_cast<int>(kExitTerminal);
  });
}

int cmd_compare(const std::vector<fs::path>& scenario_paths, const std::vector<std::string>& modes,
                const fs::path& out_dir, const Overrides& overrides) {
  return guarded([&] {
    if (modes.size() < 2) throw std::invalid_argument("compare needs at least two modes (got " +
                                                      std::to_string(modes.size()) + ")");
    if (scenario_paths.empty()) throw std::invalid_argument("compare needs at least one scenario");
    std::vector<ControlMode> parsed;
    for (const auto& m : modes) parsed.push_back(parse_control_mode(m));
    std::vector<Scenario> scenarios;
    for (const auto& p : scenario_paths) scenarios.push_back(load_with_overrides(p, overrides));

    // Episodes are independent and deterministic, so scenarios run concurrently.
    std::vector<std::future<std::vector<ModeResult>>> jobs;
    for (const auto& s : scenarios) {
      jobs.push_back(std::async(std::launch::async, [&s, &parsed] { return compare_baselines(s, parsed); }));
    }
    std::vector<ComparisonRow> rows;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      for (auto& r : jobs[i].get()) {
        spdlog::info("{} / {}:", scenarios[i].name, to_string(r.mode));
        log_metrics(r.metrics);
        rows.push_back({scenarios[i].name, std::move(r)});
      }
    }
    const fs::path dir = out_dir.empty() ? fs::path("out") / "compare" : out_dir;
    {
      auto out = open_output(dir / "comparison.csv");
      write_comparison_csv(out, rows);
    }
    {
      auto out = open_output(dir / "comparison.txt");
      write_comparison_text(out, rows);
    }
    spdlog::info("wrote {}", dir.string());
    return static_cast<int>(kExitOk);
  });
}

int cmd_validate(const fs::path& scenario_path) {
  return guarded([&] {
    const Scenario s = load_scenario(scenario_path);
    spdlog::info("'{}' is valid", s.name);
    spdlog::debug("resolved scenario: {}", scenario_to_json(s, -1));
    return static_cast<int>(kExitOk);
  });
}

}  // namespace vicopt::cli
