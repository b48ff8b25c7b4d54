#pragma once

// Declarative experiments: alpha sweeps over initialization size, single runs
// with full trajectories, the cross-module invariant suite, and the recovery
// bound report. Configs are flat "key = value" text files.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mdsense/error.hpp"
#include "mdsense/metrics.hpp"
#include "mdsense/mirror_maps.hpp"
#include "mdsense/optimizers.hpp"
#include "mdsense/sensing.hpp"

namespace mdsense {

enum class ExperimentKind { AlphaSweep, SingleRun, InvariantSuite };
enum class EnsembleChoice { GaussianSym, GaussianRect, Completion };

/// One algorithm column of a sweep. `name` is one of
///   md-entropy, md-hypentropy, exp-gradient, gd-psd, gd-sym
/// and alpha sets the initialization as follows:
///   md-entropy     X0 = alpha I
///   md-hypentropy  beta = alpha, X0 = 0
///   exp-gradient   U0 = V0 = (alpha/2) I
///   gd-psd         U0 = sqrt(alpha) I
///   gd-sym         U0 = V0 = sqrt(alpha/2) I
struct AlgorithmSpec {
  std::string name;
  double step = 1.0;

  Algorithm algorithm() const;
  /// Only psd-capable problems (square, symmetric ensemble) accept these.
  bool needs_psd() const;
};

/// Parses "md-entropy@1" style entries; a missing step takes the default
/// (1 for mirror descent and exponentiated gradient, 0.25 for the GD variants).
AlgorithmSpec parse_algorithm(const std::string& text);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::AlphaSweep;
  int n = 50;
  int nprime = 50;
  int r = 5;
  int m = 750;
  EnsembleChoice ensemble = EnsembleChoice::GaussianSym;
  std::vector<AlgorithmSpec> algorithms;
  std::vector<double> alpha_grid;
  std::uint64_t seed = 0;
  std::string output_dir = "mdsense_out";
  bool emit_svg = true;

  int max_iters = 5000;
  double risk_tol = 1e-12;
  bool replacement = false;  // completion sampling
  bool include_nucmin = true;
  bool archive = false;      // also write ensemble.txt / ground_truth.txt
  int snapshot_every = 0;    // run: dense snapshots for bregman_to_final

  // bounds
  double delta = 0.1;
  double c = 2.0;
  int rip_trials = 10000;

  /// Throws Error(ConfigError) on inconsistent settings.
  void validate() const;
  /// True when the planted matrix is PSD and the ensemble symmetric.
  bool psd_problem() const;
};

/// Throws Error(ConfigError) on unknown keys or unparsable values.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

std::string to_string(EnsembleChoice e);
std::string to_string(ExperimentKind e);

/// The shared instance of an experiment: X*, the ensemble and y = A(X*).
struct Problem {
  GroundTruth truth;
  SensingEnsemble ensemble;
  Observations obs;
  bool psd = false;
};

Problem build_problem(const ExperimentConfig& cfg);

struct ResultRow {
  double alpha = 0.0;
  std::string algorithm;
  double final_risk = 0.0;
  double nuclear_norm = 0.0;
  double effective_rank = 0.0;
  double recon_error = 0.0;
  int iters_run = 0;
  double wall_ms = 0.0;
  /// Empty on success; otherwise "Kind: message" of the failure. The numbers
  /// then describe the last good iterate.
  std::string error;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

inline constexpr const char* kCsvHeader =
    "alpha,algorithm,final_risk,nuclear_norm,effective_rank,recon_error,iters_run,wall_ms";

/// One cell of a sweep: runs `spec` at `alpha` on the problem.
struct CellOutcome {
  ResultRow row;
  Trajectory trajectory;
};
CellOutcome run_cell(const Problem& problem, const AlgorithmSpec& spec, double alpha,
                     const ExperimentConfig& cfg);

/// One row per (alpha, algorithm) plus the "ground-truth" and "nucmin"
/// reference rows (alpha = 0). Rows are sorted by algorithm, then by
/// descending alpha. Cells run concurrently when threads are available.
std::vector<ResultRow> run_alpha_sweep(const ExperimentConfig& cfg, const Problem& problem);
std::vector<ResultRow> run_alpha_sweep(const ExperimentConfig& cfg);

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
/// Parses a results.csv body written by write_results_csv.
std::vector<ResultRow> read_results_csv(std::istream& in);

/// Writes results.csv, failures.csv (only if some row failed) and, with
/// emit_svg, nuclear_norm.svg / effective_rank.svg / recon_error.svg.
/// Returns the paths written.
std::vector<std::filesystem::path> emit_outputs(const std::vector<ResultRow>& rows,
                                                const ExperimentConfig& cfg);

/// ensemble.txt and ground_truth.txt in the output directory.
std::vector<std::filesystem::path> write_archive(const Problem& problem, const ExperimentConfig& cfg);

/// Line chart of one metric against log10(alpha). Reference rows become
/// horizontal lines.
std::string render_svg(const std::vector<ResultRow>& rows, const std::string& metric);

/// Per-iteration log: iter,risk,nuclear_norm,effective_rank,recon_error,bregman_to_final
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

struct InvariantResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
};

/// Cross-module checks on small randomized instances. Never throws for a
/// failed check; an exception inside a check is reported as a failure.
std::vector<InvariantResult> run_invariant_suite(std::uint64_t seed);

struct BoundReport {
  double nuclear_star = 0.0;
  double mu0 = 0.0;
  double mu1 = 0.0;
  std::optional<double> rip_delta;  // dense ensembles only
  struct Row {
    double alpha = 0.0;
    BoundValue theorem3;
    std::optional<CompletionBound> theorem4;
    std::string note;  // set when the parameter is outside the theorem's range
  };
  std::vector<Row> rows;
};

BoundReport compute_bounds(const ExperimentConfig& cfg);
void print_bounds(std::ostream& out, const ExperimentConfig& cfg, const BoundReport& report);

}  // namespace mdsense
