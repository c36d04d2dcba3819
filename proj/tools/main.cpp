#include "commands.hpp"

#include <CLI11.hpp>

int main(int argc, char** argv) {
  vicopt::cli::configure_logging();

  CLI::App app{"vicopt: safe online variable impedance control simulator"};
  app.require_subcommand(1);

  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> latency;

  auto* run = app.add_subcommand("run", "Run one episode and write trajectory.csv, updates.csv, metrics.txt");
  std::string run_path;
  run->add_option("scenario", run_path, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output directory");
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--latency", latency, "Simulated low-frequency solve latency [s]")->check(CLI::NonNegativeNumber);

  auto* fig2 = app.add_subcommand("fig2", "1-DoF FITAVE vs ITAE vs manual gains contact study");
  fig2->add_option("--out", out, "Output directory");

  auto* compare = app.add_subcommand("compare", "Compare control modes on one or more scenarios");
  std::vector<std::string> compare_paths;
  std::vector<std::string> modes{"constant_gain", "safe_ongo_vic"};
  compare->add_option("scenarios", compare_paths, "Scenario files")->required()->check(CLI::ExistingFile);
  compare->add_option("--modes", modes, "Modes to compare (at least two)")->delimiter(',');
  compare->add_option("--out", out, "Output directory");
  compare->add_option("--seed", seed, "Override every scenario seed");
  compare->add_option("--latency", latency, "Simulated solve latency [s]")->check(CLI::NonNegativeNumber);

  auto* validate = app.add_subcommand("validate", "Parse and validate a scenario file");
  std::string validate_path;
  validate->add_option("scenario", validate_path, "Scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(vicopt::cli::kExitUsage);
  }

  const vicopt::cli::Overrides overrides{seed, latency};
  if (*run) return vicopt::cli::cmd_run(run_path, out, overrides);
  if (*fig2) return vicopt::cli::cmd_fig2(out);
  if (*compare) {
    std::vector<std::filesystem::path> paths(compare_paths.begin(), compare_paths.end());
    return vicopt::cli::cmd_compare(paths, modes, out, overrides);
  }
  return vicopt::cli::cmd_validate(validate_path);
}
