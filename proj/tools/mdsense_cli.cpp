// mdsense: command-line front end.
//
//   mdsense sweep  --config FILE     alpha sweep -> results.csv (+ SVG charts)
//   mdsense run    --config FILE     single alpha, per-iteration trajectories
//   mdsense check  [--seed N]        invariant suite, exit 1 on any failure
//   mdsense bounds --config FILE     recovery-bound values for the config
//
// Exit codes: 0 success, 1 invariant failure, 2 config error, 3 runtime failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mdsense/experiment.hpp"
#include "mdsense/kernels.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvariantFailure = 1;
constexpr int kConfigError = 2;
constexpr int kRuntimeFailure = 3;

mdsense::ExperimentConfig load(const std::string& path, const std::string& output_override) {
  mdsense::ExperimentConfig cfg = mdsense::load_config(path);
  if (!output_override.empty()) cfg.output_dir = output_override;
  return cfg;
}

void print_rows(const std::vector<mdsense::ResultRow>& rows) {
  std::printf("%-14s %-12s %-12s %-12s %-12s %-12s %8s\n", "algorithm", "alpha", "risk", "nuclear",
              "eff_rank", "recon", "iters");
  for (const auto& row : rows) {
    std::printf("%-14s %-12.4g %-12.4g %-12.6g %-12.6g %-12.4g %8d%s\n", row.algorithm.c_str(), row.alpha,
                row.final_risk, row.nuclear_norm, row.effective_rank, row.recon_error, row.iters_run,
                row.error.empty() ? "" : "  FAILED");
  }
}

int cmd_sweep(const std::string& config, const std::string& out_dir) {
  mdsense::ExperimentConfig cfg = load(config, out_dir);
  const mdsense::Problem problem = mdsense::build_problem(cfg);
  const auto rows = mdsense::run_alpha_sweep(cfg, problem);
  const auto written = mdsense::emit_outputs(rows, cfg);
  if (cfg.archive) mdsense::write_archive(problem, cfg);
  print_rows(rows);
  int failed = 0;
  for (const auto& row : rows) {
    if (!row.error.empty()) {
      ++failed;
      std::cerr << "cell " << row.algorithm << " alpha=" << row.alpha << ": " << row.error << '\n';
    }
  }
  if (failed) std::cerr << failed << " cell(s) failed; see failures.csv\n";
  for (const auto& p : written) std::cout << "wrote " << p.string() << '\n';
  return kOk;
}

int cmd_run(const std::string& config, const std::string& out_dir) {
  mdsense::ExperimentConfig cfg = load(config, out_dir);
  if (cfg.experiment == mdsense::ExperimentKind::AlphaSweep && cfg.alpha_grid.size() != 1) {
    throw mdsense::Error(mdsense::ErrorKind::ConfigError, "run takes exactly one alpha_grid value");
  }
  const mdsense::Problem problem = mdsense::build_problem(cfg);
  std::vector<mdsense::ResultRow> rows;
  std::filesystem::create_directories(cfg.output_dir);
  bool failed = false;
  for (const auto& spec : cfg.algorithms) {
    const mdsense::CellOutcome cell = mdsense::run_cell(problem, spec, cfg.alpha_grid.front(), cfg);
    const auto path = std::filesystem::path(cfg.output_dir) / ("trajectory_" + spec.name + ".csv");
    std::ofstream out(path);
    mdsense::write_trajectory_csv(out, cell.trajectory);
    if (!out) throw mdsense::Error(mdsense::ErrorKind::IoError, "cannot write " + path.string());
    std::cout << "wrote " << path.string() << '\n';
    if (!cell.row.error.empty()) {
      failed = true;
      std::cerr << spec.name << ": " << cell.row.error << '\n';
    }
    rows.push_back(cell.row);
  }
  for (const auto& p : mdsense::emit_outputs(rows, cfg)) std::cout << "wrote " << p.string() << '\n';
  print_rows(rows);
  return failed ? kRuntimeFailure : kOk;
}

int cmd_check(std::uint64_t seed) {
  const auto results = mdsense::run_invariant_suite(seed);
  bool ok = true;
  for (const auto& r : results) {
    std::printf("%s %-38s measured=%.3e threshold=%.1e\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                r.measured, r.threshold);
    ok = ok && r.passed;
  }
  std::printf("%zu checks, %s\n", results.size(), ok ? "all passed" : "FAILURES");
  return ok ? kOk : kInvariantFailure;
}

int cmd_bounds(const std::string& config) {
  const mdsense::ExperimentConfig cfg = mdsense::load_config(config);
  mdsense::print_bounds(std::cout, cfg, mdsense::compute_bounds(cfg));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  mdsense::kernels::configure_threads_from_env();

  CLI::App app{"Mirror-descent matrix sensing experiments"};
  app.require_subcommand(1);
  std::string config;
  std::string out_dir;
  std::uint64_t seed = 0;

  auto* sweep = app.add_subcommand("sweep", "Run an alpha sweep and write results.csv / SVG charts");
  sweep->add_option("--config", config, "Experiment config file")->required();
  sweep->add_option("--output-dir", out_dir, "Override output_dir from the config");
  auto* run = app.add_subcommand("run", "Run each algorithm once and write per-iteration trajectories");
  run->add_option("--config", config, "Experiment config file")->required();
  run->add_option("--output-dir", out_dir, "Override output_dir from the config");
  auto* check = app.add_subcommand("check", "Run the invariant suite");
  check->add_option("--seed", seed, "Seed for the randomized instances");
  auto* bounds = app.add_subcommand("bounds", "Print recovery-bound values for a config");
  bounds->add_option("--config", config, "Experiment config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*sweep) return cmd_sweep(config, out_dir);
    if (*run) return cmd_run(config, out_dir);
    if (*check) return cmd_check(seed);
    if (*bounds) return cmd_bounds(config);
  } catch (const mdsense::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == mdsense::ErrorKind::ConfigError ? kConfigError : kRuntimeFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kConfigError;
}
