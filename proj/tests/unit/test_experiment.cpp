#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "assertions.hpp"
#include "mdsense/experiment.hpp"

using namespace mdsense;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"(
# tiny sweep
experiment = alpha_sweep
n = 6
nprime = 6
r = 1
m = 60
ensemble = gaussian_sym
algorithms = md-entropy@1, gd-psd@0.25
alpha_grid = 1e-1,1e-2,1e-3,1e-4,1e-5,1e-6,1e-7,1e-8,1e-9,1e-10
seed = 11
max_iters = 200
emit_svg = false
)";

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mdsense_test_" + name);
  fs::remove_all(dir);
  return dir;
}

void drop_wall(std::vector<ResultRow>& rows) {
  for (ResultRow& r : rows) r.wall_ms = 0.0;
}

}  // namespace

TEST(Config, ParsesKeysAndComments) {
  const ExperimentConfig cfg = parse(kSmall);
  EXPECT_EQ(cfg.n, 6);
  EXPECT_EQ(cfg.m, 60);
  EXPECT_EQ(cfg.ensemble, EnsembleChoice::GaussianSym);
  ASSERT_EQ(cfg.algorithms.size(), 2u);
  EXPECT_EQ(cfg.algorithms[0].name, "md-entropy");
  EXPECT_EQ(cfg.algorithms[1].step, 0.25);
  ASSERT_EQ(cfg.alpha_grid.size(), 10u);
  EXPECT_EQ(cfg.alpha_grid.back(), 1e-10);
  EXPECT_EQ(cfg.seed, 11u);
  EXPECT_FALSE(cfg.emit_svg);
  EXPECT_TRUE(cfg.psd_problem());
}

TEST(Config, AlgorithmDefaults) {
  EXPECT_EQ(parse_algorithm("md-entropy").step, 1.0);
  EXPECT_EQ(parse_algorithm("exp-gradient").step, 1.0);
  EXPECT_EQ(parse_algorithm("gd-psd").step, 0.25);
  EXPECT_EQ(parse_algorithm(" gd-sym @ 0.5 ").step, 0.5);
  EXPECT_EQ(parse_algorithm("md-hypentropy").algorithm(), Algorithm::MirrorDescent);
  EXPECT_FALSE(parse_algorithm("md-hypentropy").needs_psd());
  EXPECT_TRUE(parse_algorithm("gd-sym").needs_psd());
  EXPECT_ERROR_KIND(parse_algorithm("sgd"), ConfigError);
  EXPECT_ERROR_KIND(parse_algorithm("gd-psd@fast"), ConfigError);
}

TEST(Config, Rejections) {
  const std::string base = "n = 4\nnprime = 4\nr = 1\nm = 10\nalgorithms = md-entropy\nalpha_grid = 0.1\n";
  EXPECT_NO_THROW(parse(base));
  EXPECT_ERROR_KIND(parse(base + "n = 5\n"), ConfigError);
  EXPECT_ERROR_KIND(parse(base + "colour = red\n"), ConfigError);
  EXPECT_ERROR_KIND(parse(base + "seed =\n"), ConfigError);
  EXPECT_ERROR_KIND(parse(base + "just words\n"), ConfigError);
  EXPECT_ERROR_KIND(parse(base + "max_iters = 10.5\n"), ConfigError);
  EXPECT_ERROR_KIND(parse(base + "emit_svg = maybe\n"), ConfigError);
  EXPECT_ERROR_KIND(parse(base + "ensemble = bernoulli\n"), ConfigError);
  EXPECT_ERROR_KIND(parse(base + "delta = 1.5\n"), ConfigError);
  EXPECT_ERROR_KIND(parse(base + "c = 1\n"), ConfigError);
  EXPECT_ERROR_KIND(parse("n = 4\nnprime = 4\nr = 5\nm = 10\nalgorithms = md-entropy\nalpha_grid = 0.1\n"),
                    ConfigError);
  EXPECT_ERROR_KIND(parse("n = 4\nnprime = 4\nr = 1\nm = 10\nalgorithms = md-entropy\nalpha_grid = -1\n"),
                    ConfigError);
  EXPECT_ERROR_KIND(parse("n = 4\nnprime = 4\nr = 1\nm = 10\nalgorithms = md-entropy\n"), ConfigError);
  // entropy on a rectangular problem
  EXPECT_ERROR_KIND(parse("n = 4\nnprime = 5\nr = 1\nm = 10\nensemble = gaussian_rect\n"
                          "algorithms = md-entropy\nalpha_grid = 0.1\n"),
                    ConfigError);
  EXPECT_ERROR_KIND(parse("n = 2\nnprime = 2\nr = 1\nm = 5\nensemble = completion\n"
                          "algorithms = gd-psd\nalpha_grid = 0.1\n"),
                    ConfigError);
  EXPECT_ERROR_KIND(load_config("/nonexistent/mdsense.cfg"), ConfigError);
}

TEST(Config, InvariantSuiteNeedsNoGrid) {
  EXPECT_NO_THROW(parse("experiment = invariant_suite\n"));
}

TEST(Sweep, RowAccountingAndOrder) {
  const ExperimentConfig cfg = parse(kSmall);
  const std::vector<ResultRow> rows = run_alpha_sweep(cfg);
  ASSERT_EQ(rows.size(), 22u);
  int md = 0, gd = 0, refs = 0;
  for (const ResultRow& r : rows) {
    EXPECT_TRUE(r.error.empty()) << r.algorithm << " " << r.alpha << ": " << r.error;
    if (r.algorithm == "md-entropy") ++md;
    else if (r.algorithm == "gd-psd") ++gd;
    else {
      ++refs;
      EXPECT_EQ(r.alpha, 0.0);
    }
  }
  EXPECT_EQ(md, 10);
  EXPECT_EQ(gd, 10);
  EXPECT_EQ(refs, 2);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].algorithm == rows[i - 1].algorithm) EXPECT_GT(rows[i - 1].alpha, rows[i].alpha);
    else EXPECT_LT(rows[i - 1].algorithm, rows[i].algorithm);
  }
}

TEST(Sweep, DeterministicAcrossRuns) {
  const ExperimentConfig cfg = parse(kSmall);
  auto a = run_alpha_sweep(cfg);
  auto b = run_alpha_sweep(cfg);
  drop_wall(a);
  drop_wall(b);
  EXPECT_EQ(a, b);
  std::ostringstream sa, sb;
  write_results_csv(sa, a);
  write_results_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(Sweep, ReferenceRowsIndependentOfGrid) {
  ExperimentConfig cfg = parse(kSmall);
  auto full = run_alpha_sweep(cfg);
  cfg.alpha_grid = {1e-3};
  auto one = run_alpha_sweep(cfg);
  drop_wall(full);
  drop_wall(one);
  const auto find = [](const std::vector<ResultRow>& rows, const std::string& name) {
    for (const ResultRow& r : rows)
      if (r.algorithm == name) return r;
    return ResultRow{};
  };
  EXPECT_EQ(find(full, "ground-truth"), find(one, "ground-truth"));
  EXPECT_EQ(find(full, "nucmin"), find(one, "nucmin"));
  EXPECT_FALSE(find(one, "nucmin").algorithm.empty());
}

TEST(Sweep, FailedCellIsRecordedNotThrown) {
  ExperimentConfig cfg = parse(kSmall);
  const Problem p = build_problem(cfg);
  const CellOutcome out = run_cell(p, parse_algorithm("gd-psd@50"), 0.1, cfg);
  EXPECT_FALSE(out.row.error.empty());
  EXPECT_EQ(out.row.algorithm, "gd-psd");
  EXPECT_EQ(out.row.alpha, 0.1);
  EXPECT_TRUE(std::isfinite(out.row.final_risk));
}

TEST(Csv, RoundTripKeepsEveryBit) {
  std::vector<ResultRow> rows(2);
  rows[0] = {1e-7, "md-entropy", 1.0 / 3.0, 0.1 + 0.2, 1.0000000000000002, 5e-324, 42, 12.5, ""};
  rows[1] = {0.0, "nucmin", 0.0, 2.0 / 7.0, 1.0, 1e300, 7, 0.0, ""};
  std::stringstream s;
  write_results_csv(s, rows);
  EXPECT_EQ(s.str().substr(0, s.str().find('\n')), kCsvHeader);
  EXPECT_EQ(read_results_csv(s), rows);
}

TEST(Csv, MalformedInput) {
  std::istringstream no_header("1,2,3\n");
  EXPECT_ERROR_KIND(read_results_csv(no_header), IoError);
  std::istringstream short_line(std::string(kCsvHeader) + "\n1,md-entropy,3\n");
  EXPECT_ERROR_KIND(read_results_csv(short_line), IoError);
  std::istringstream bad_number(std::string(kCsvHeader) + "\nx,md-entropy,1,1,1,1,1,1\n");
  EXPECT_ERROR_KIND(read_results_csv(bad_number), IoError);
}

TEST(Outputs, WithoutSvgOnlyResults) {
  ExperimentConfig cfg = parse(kSmall);
  cfg.output_dir = scratch("nosvg").string();
  cfg.alpha_grid = {1e-2};
  const auto written = emit_outputs(run_alpha_sweep(cfg), cfg);
  ASSERT_EQ(written.size(), 1u);
  EXPECT_EQ(written[0].filename(), "results.csv");
  int files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(cfg.output_dir)) ++files;
  EXPECT_EQ(files, 1);
  std::ifstream in(written[0]);
  EXPECT_EQ(read_results_csv(in).size(), 4u);
}

TEST(Outputs, SvgAndFailures) {
  ExperimentConfig cfg = parse(kSmall);
  cfg.output_dir = scratch("svg").string();
  cfg.emit_svg = true;
  std::vector<ResultRow> rows = run_alpha_sweep(cfg);
  rows[0].error = "Divergence: \"boom\"";
  const auto written = emit_outputs(rows, cfg);
  EXPECT_EQ(written.size(), 5u);
  EXPECT_TRUE(fs::exists(fs::path(cfg.output_dir) / "failures.csv"));
  std::ifstream svg(fs::path(cfg.output_dir) / "nuclear_norm.svg");
  std::stringstream body;
  body << svg.rdbuf();
  EXPECT_EQ(body.str().rfind("<svg", 0), 0u);
  EXPECT_NE(body.str().find("</svg>"), std::string::npos);
  EXPECT_NE(body.str().find("md-entropy"), std::string::npos);
  EXPECT_NE(body.str().find("nucmin"), std::string::npos);
  EXPECT_ERROR_KIND(emit_outputs({}, cfg), InvalidArgument);
}

TEST(Outputs, ArchiveReadsBack) {
  ExperimentConfig cfg = parse(kSmall);
  cfg.output_dir = scratch("archive").string();
  const Problem p = build_problem(cfg);
  const auto paths = write_archive(p, cfg);
  ASSERT_EQ(paths.size(), 2u);
  std::ifstream ens_in(paths[0]);
  const SensingEnsemble ens = read_ensemble(ens_in);
  EXPECT_EQ(ens.size(), p.ensemble.size());
  EXPECT_EQ(measure(ens, p.truth.matrix).y, p.obs.y);
}

TEST(Outputs, TrajectoryCsv) {
  ExperimentConfig cfg = parse(kSmall);
  cfg.max_iters = 5;
  cfg.risk_tol = 0.0;
  const Problem p = build_problem(cfg);
  const CellOutcome out = run_cell(p, parse_algorithm("md-entropy"), 0.1, cfg);
  std::ostringstream s;
  write_trajectory_csv(s, out.trajectory);
  const std::string text = s.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "iter,risk,nuclear_norm,effective_rank,recon_error,bregman_to_final");
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), out.trajectory.records.size() + 1);
}

TEST(Bounds, ReportForGaussianAndCompletion) {
  ExperimentConfig cfg = parse(kSmall);
  cfg.rip_trials = 50;
  const BoundReport rep = compute_bounds(cfg);
  EXPECT_EQ(rep.rows.size(), 10u);
  ASSERT_TRUE(rep.rip_delta.has_value());
  EXPECT_GT(*rep.rip_delta, 0.0);
  EXPECT_GT(rep.nuclear_star, 0.0);
  EXPECT_GE(rep.mu0, 1.0 - 1e-12);
  for (const auto& row : rep.rows) EXPECT_FALSE(row.theorem4.has_value());
  std::ostringstream out;
  print_bounds(out, cfg, rep);
  EXPECT_NE(out.str().find("rip_estimate="), std::string::npos);

  cfg.ensemble = EnsembleChoice::Completion;
  cfg.m = 30;
  const BoundReport comp = compute_bounds(cfg);
  EXPECT_FALSE(comp.rip_delta.has_value());
  for (const auto& row : comp.rows) {
    if (row.note.empty()) EXPECT_TRUE(row.theorem4.has_value());
  }
  std::ostringstream out2;
  print_bounds(out2, cfg, comp);
  EXPECT_NE(out2.str().find("sample_requirement"), std::string::npos);
}

TEST(Invariants, SuitePasses) {
  for (std::uint64_t seed : {0u, 5u}) {
    for (const InvariantResult& r : run_invariant_suite(seed)) {
      EXPECT_TRUE(r.passed) << r.name << " measured=" << r.measured << " threshold=" << r.threshold;
    }
  }
}
