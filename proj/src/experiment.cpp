#include "mdsense/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "mdsense/kernels.hpp"
#include "mdsense/nucmin.hpp"

namespace mdsense {

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); }

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    config_error("key '" + key + "': cannot parse '" + text + "' as a number");
  }
  return v;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& text) {
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    config_error("key '" + key + "': cannot parse '" + text + "' as an integer");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  config_error("key '" + key + "': expected true or false, got '" + text + "'");
}

double default_step(const std::string& name) {
  return (name == "gd-psd" || name == "gd-sym") ? 0.25 : 1.0;
}

const std::set<std::string>& algorithm_names() {
  static const std::set<std::string> names = {"md-entropy", "md-hypentropy", "exp-gradient", "gd-psd",
                                              "gd-sym"};
  return names;
}

ResultRow row_from_trajectory(const Trajectory& traj, double alpha, const std::string& name) {
  ResultRow row;
  row.alpha = alpha;
  row.algorithm = name;
  row.iters_run = traj.iters_run;
  if (!traj.records.empty()) {
    const IterRecord& last = traj.records.back();
    row.final_risk = last.risk;
    row.nuclear_norm = last.nuclear_norm;
    row.effective_rank = last.effective_rank;
    row.recon_error = last.recon_error.value_or(0.0);
  }
  return row;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

ResultRow ground_truth_row(const Problem& p) {
  ResultRow row;
  row.algorithm = "ground-truth";
  row.final_risk = risk(p.ensemble, p.obs, p.truth.matrix);
  row.nuclear_norm = nuclear_norm(p.truth.matrix);
  row.effective_rank = effective_rank(p.truth.matrix);
  return row;
}

ResultRow nucmin_row(const Problem& p) {
  const auto start = std::chrono::steady_clock::now();
  NucminConfig nc;
  nc.psd = p.psd;
  ResultRow row;
  row.algorithm = "nucmin";
  Matrix x;
  try {
    NucminResult res = nucmin(p.ensemble, p.obs, nc);
    x = std::move(res.x);
    row.iters_run = res.iters;
  } catch (const NucminNotConverged& err) {
    x = err.best().x;
    row.iters_run = nc.max_iters;
    row.error = err.what();
  } catch (const Error& err) {
    row.error = err.what();
    row.wall_ms = elapsed_ms(start);
    return row;
  }
  row.final_risk = risk(p.ensemble, p.obs, x);
  const Vector s = singular_values(x);
  row.nuclear_norm = s.sum();
  row.effective_rank = effective_rank_of_spectrum(s);
  row.recon_error = recon_error(x, p.truth.matrix);
  row.wall_ms = elapsed_ms(start);
  return row;
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.algorithm != b.algorithm) return a.algorithm < b.algorithm;
    return a.alpha > b.alpha;
  });
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

}  // namespace

// ---------------------------------------------------------------------------
// Algorithms and config

Algorithm AlgorithmSpec::algorithm() const {
  if (name == "md-entropy" || name == "md-hypentropy") return Algorithm::MirrorDescent;
  if (name == "exp-gradient") return Algorithm::ExpGradient;
  if (name == "gd-psd") return Algorithm::GdFactoredPsd;
  if (name == "gd-sym") return Algorithm::GdFactoredSym;
  config_error("unknown algorithm '" + name + "'");
}

bool AlgorithmSpec::needs_psd() const { return name != "md-hypentropy"; }

AlgorithmSpec parse_algorithm(const std::string& text) {
  AlgorithmSpec spec;
  const auto at = text.find('@');
  spec.name = trim(text.substr(0, at));
  if (!algorithm_names().count(spec.name)) {
    config_error("unknown algorithm '" + spec.name +
                 "' (expected md-entropy, md-hypentropy, exp-gradient, gd-psd or gd-sym)");
  }
  spec.step = at == std::string::npos ? default_step(spec.name)
                                      : parse_double("algorithms", trim(text.substr(at + 1)));
  return spec;
}

std::string to_string(EnsembleChoice e) {
  switch (e) {
    case EnsembleChoice::GaussianSym: return "gaussian_sym";
    case EnsembleChoice::GaussianRect: return "gaussian_rect";
    case EnsembleChoice::Completion: return "completion";
  }
  return "?";
}

std::string to_string(ExperimentKind e) {
  switch (e) {
    case ExperimentKind::AlphaSweep: return "alpha_sweep";
    case ExperimentKind::SingleRun: return "single_run";
    case ExperimentKind::InvariantSuite: return "invariant_suite";
  }
  return "?";
}

bool ExperimentConfig::psd_problem() const {
  return ensemble != EnsembleChoice::GaussianRect && n == nprime;
}

void ExperimentConfig::validate() const {
  if (n < 1 || nprime < 1 || m < 1) config_error("n, nprime and m must be >= 1");
  if (r < 1 || r > std::min(n, nprime)) config_error("r must lie in [1, min(n, nprime)]");
  if (ensemble == EnsembleChoice::GaussianSym && n != nprime) {
    config_error("gaussian_sym needs n = nprime");
  }
  if (ensemble == EnsembleChoice::Completion && !replacement &&
      static_cast<std::int64_t>(m) > static_cast<std::int64_t>(n) * nprime) {
    config_error("completion without replacement needs m <= n * nprime");
  }
  if (max_iters < 1) config_error("max_iters must be >= 1");
  if (!(risk_tol >= 0.0)) config_error("risk_tol must be >= 0");
  if (snapshot_every < 0) config_error("snapshot_every must be >= 0");
  if (!(delta >= 0.0 && delta < 1.0)) config_error("delta must lie in [0, 1)");
  if (!(c > 1.0)) config_error("c must exceed 1");
  if (rip_trials < 1) config_error("rip_trials must be >= 1");
  for (double a : alpha_grid) {
    if (!(a > 0.0)) config_error("alpha_grid entries must be positive");
  }
  if (experiment == ExperimentKind::InvariantSuite) return;
  if (alpha_grid.empty()) config_error("alpha_grid must not be empty");
  if (experiment == ExperimentKind::SingleRun && alpha_grid.size() != 1) {
    config_error("single_run takes exactly one alpha_grid value");
  }
  if (algorithms.empty()) config_error("algorithms must not be empty");
  std::set<std::string> seen;
  for (const AlgorithmSpec& spec : algorithms) {
    if (!seen.insert(spec.name).second) config_error("algorithm '" + spec.name + "' listed twice");
    if (!(spec.step > 0.0)) config_error("step of '" + spec.name + "' must be positive");
    if (spec.needs_psd() && !psd_problem()) {
      config_error("'" + spec.name + "' needs a square symmetric problem (gaussian_sym or square completion)");
    }
  }
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      config_error("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) config_error("key '" + key + "' given twice");
    if (val.empty()) config_error("key '" + key + "' has no value");

    if (key == "experiment") {
      if (val == "alpha_sweep") cfg.experiment = ExperimentKind::AlphaSweep;
      else if (val == "single_run") cfg.experiment = ExperimentKind::SingleRun;
      else if (val == "invariant_suite") cfg.experiment = ExperimentKind::InvariantSuite;
      else config_error("unknown experiment '" + val + "'");
    } else if (key == "n") {
      cfg.n = parse_int<int>(key, val);
    } else if (key == "nprime") {
      cfg.nprime = parse_int<int>(key, val);
    } else if (key == "r") {
      cfg.r = parse_int<int>(key, val);
    } else if (key == "m") {
      cfg.m = parse_int<int>(key, val);
    } else if (key == "ensemble") {
      if (val == "gaussian_sym") cfg.ensemble = EnsembleChoice::GaussianSym;
      else if (val == "gaussian_rect") cfg.ensemble = EnsembleChoice::GaussianRect;
      else if (val == "completion") cfg.ensemble = EnsembleChoice::Completion;
      else config_error("unknown ensemble '" + val + "'");
    } else if (key == "algorithms") {
      for (const std::string& item : split(val, ',')) cfg.algorithms.push_back(parse_algorithm(item));
    } else if (key == "alpha_grid") {
      for (const std::string& item : split(val, ',')) cfg.alpha_grid.push_back(parse_double(key, item));
    } else if (key == "seed") {
      cfg.seed = parse_int<std::uint64_t>(key, val);
    } else if (key == "output_dir") {
      cfg.output_dir = val;
    } else if (key == "emit_svg") {
      cfg.emit_svg = parse_bool(key, val);
    } else if (key == "max_iters") {
      cfg.max_iters = parse_int<int>(key, val);
    } else if (key == "risk_tol") {
      cfg.risk_tol = parse_double(key, val);
    } else if (key == "replacement") {
      cfg.replacement = parse_bool(key, val);
    } else if (key == "include_nucmin") {
      cfg.include_nucmin = parse_bool(key, val);
    } else if (key == "archive") {
      cfg.archive = parse_bool(key, val);
    } else if (key == "snapshot_every") {
      cfg.snapshot_every = parse_int<int>(key, val);
    } else if (key == "delta") {
      cfg.delta = parse_double(key, val);
    } else if (key == "c") {
      cfg.c = parse_double(key, val);
    } else if (key == "rip_trials") {
      cfg.rip_trials = parse_int<int>(key, val);
    } else {
      config_error("unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config file " + path.string());
  return parse_config(in);
}

// ---------------------------------------------------------------------------
// Problem and cells

Problem build_problem(const ExperimentConfig& cfg) {
  cfg.validate();
  const bool psd = cfg.psd_problem();
  GroundTruth truth = psd ? gen_lowrank_psd(cfg.n, cfg.r, cfg.seed)
                          : gen_lowrank_rect(cfg.n, cfg.nprime, cfg.r, cfg.seed);
  SensingEnsemble ens = [&] {
    switch (cfg.ensemble) {
      case EnsembleChoice::GaussianSym: return gen_gaussian_sym(cfg.n, cfg.m, cfg.seed);
      case EnsembleChoice::GaussianRect: return gen_gaussian_rect(cfg.n, cfg.nprime, cfg.m, cfg.seed);
      case EnsembleChoice::Completion:
        return gen_completion(cfg.n, cfg.nprime, cfg.m, cfg.seed, cfg.replacement, psd);
    }
    config_error("unknown ensemble");
  }();
  Observations obs = measure(ens, truth.matrix);
  return {std::move(truth), std::move(ens), std::move(obs), psd};
}

CellOutcome run_cell(const Problem& problem, const AlgorithmSpec& spec, double alpha,
                     const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const Eigen::Index n = problem.ensemble.rows();
  const Eigen::Index np = problem.ensemble.cols();
  RunConfig rc;
  rc.algorithm = spec.algorithm();
  rc.step = spec.step;
  rc.max_iters = cfg.max_iters;
  rc.risk_tol = cfg.risk_tol;
  rc.init_alpha = alpha;
  rc.snapshot_every = cfg.snapshot_every;
  const RunContext ctx{&problem.truth.matrix};
  const Matrix eye = Matrix::Identity(n, np);

  CellOutcome out;
  try {
    if (spec.name == "md-entropy") {
      rc.map = MirrorMapSpec::entropy();
      out.trajectory = mirror_descent(*rc.map, problem.ensemble, problem.obs, alpha * eye, rc, ctx);
    } else if (spec.name == "md-hypentropy") {
      rc.map = MirrorMapSpec::hypentropy(alpha, problem.psd ? MapDomain::Symmetric : MapDomain::Rectangular);
      out.trajectory = mirror_descent(*rc.map, problem.ensemble, problem.obs, Matrix::Zero(n, np), rc, ctx);
    } else if (spec.name == "exp-gradient") {
      out.trajectory = exp_gradient(problem.ensemble, problem.obs, 0.5 * alpha * eye, 0.5 * alpha * eye, rc, ctx);
    } else if (spec.name == "gd-psd") {
      out.trajectory = gd_factored_psd(problem.ensemble, problem.obs, std::sqrt(alpha) * eye, rc, ctx);
    } else {
      const Matrix u0 = std::sqrt(0.5 * alpha) * eye;
      out.trajectory = gd_factored_sym(problem.ensemble, problem.obs, u0, u0, rc, ctx);
    }
    if (rc.map && cfg.snapshot_every > 0) fill_bregman_to_final(*rc.map, out.trajectory);
    out.row = row_from_trajectory(out.trajectory, alpha, spec.name);
  } catch (const RunFailure& err) {
    out.trajectory = err.partial();
    out.row = row_from_trajectory(out.trajectory, alpha, spec.name);
    out.row.error = err.what();
  } catch (const std::exception& err) {
    out.row.alpha = alpha;
    out.row.algorithm = spec.name;
    out.row.error = err.what();
  }
  out.row.wall_ms = elapsed_ms(start);
  return out;
}

std::vector<ResultRow> run_alpha_sweep(const ExperimentConfig& cfg, const Problem& problem) {
  cfg.validate();
  struct Cell {
    const AlgorithmSpec* spec;
    double alpha;
  };
  std::vector<Cell> cells;
  for (const AlgorithmSpec& spec : cfg.algorithms)
    for (double a : cfg.alpha_grid) cells.push_back({&spec, a});

  std::vector<ResultRow> rows(cells.size());
  const long count = static_cast<long>(cells.size());
  // Cells share only the immutable problem; each writes its own slot.
#pragma omp parallel for schedule(dynamic, 1) if (kernels::max_threads() > 1)
  for (long i = 0; i < count; ++i) {
    const Cell& cell = cells[static_cast<std::size_t>(i)];
    rows[static_cast<std::size_t>(i)] = run_cell(problem, *cell.spec, cell.alpha, cfg).row;
  }

  rows.push_back(ground_truth_row(problem));
  if (cfg.include_nucmin) rows.push_back(nucmin_row(problem));
  sort_rows(rows);
  return rows;
}

std::vector<ResultRow> run_alpha_sweep(const ExperimentConfig& cfg) {
  const Problem problem = build_problem(cfg);
  return run_alpha_sweep(cfg, problem);
}

// ---------------------------------------------------------------------------
// Output

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kCsvHeader << '\n';
  for (const ResultRow& row : rows) {
    out << format_double(row.alpha) << ',' << row.algorithm << ',' << format_double(row.final_risk) << ','
        << format_double(row.nuclear_norm) << ',' << format_double(row.effective_rank) << ','
        << format_double(row.recon_error) << ',' << row.iters_run << ',' << format_double(row.wall_ms)
        << '\n';
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader) {
    throw Error(ErrorKind::IoError, "results file does not start with the expected header");
  }
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    std::string item;
    std::istringstream fields(line);
    while (std::getline(fields, item, ',')) f.push_back(item);
    if (f.size() != 8) throw Error(ErrorKind::IoError, "malformed results line: " + line);
    try {
      ResultRow row;
      row.alpha = parse_double("alpha", f[0]);
      row.algorithm = f[1];
      row.final_risk = parse_double("final_risk", f[2]);
      row.nuclear_norm = parse_double("nuclear_norm", f[3]);
      row.effective_rank = parse_double("effective_rank", f[4]);
      row.recon_error = parse_double("recon_error", f[5]);
      row.iters_run = parse_int<int>("iters_run", f[6]);
      row.wall_ms = parse_double("wall_ms", f[7]);
      rows.push_back(std::move(row));
    } catch (const Error& err) {
      throw Error(ErrorKind::IoError, std::string("malformed results line: ") + err.what());
    }
  }
  return rows;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "iter,risk,nuclear_norm,effective_rank,recon_error,bregman_to_final\n";
  for (const IterRecord& rec : traj.records) {
    out << rec.iter << ',' << format_double(rec.risk) << ',' << format_double(rec.nuclear_norm) << ','
        << format_double(rec.effective_rank) << ','
        << (rec.recon_error ? format_double(*rec.recon_error) : std::string()) << ','
        << (rec.bregman_to_final ? format_double(*rec.bregman_to_final) : std::string()) << '\n';
  }
}

std::vector<std::filesystem::path> emit_outputs(const std::vector<ResultRow>& rows,
                                                const ExperimentConfig& cfg) {
  if (rows.empty()) throw Error(ErrorKind::InvalidArgument, "no rows to write");
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());

  std::vector<fs::path> written;
  const auto open = [&](const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    written.push_back(path);
    return out;
  };
  const auto finish = [](std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) throw Error(ErrorKind::IoError, "write to " + path.string() + " failed");
  };

  {
    const fs::path path = dir / "results.csv";
    std::ofstream out = open(path);
    write_results_csv(out, rows);
    finish(out, path);
  }
  const bool any_failed =
      std::any_of(rows.begin(), rows.end(), [](const ResultRow& r) { return !r.error.empty(); });
  if (any_failed) {
    const fs::path path = dir / "failures.csv";
    std::ofstream out = open(path);
    out << "alpha,algorithm,error\n";
    for (const ResultRow& row : rows) {
      if (!row.error.empty()) out << format_double(row.alpha) << ',' << row.algorithm << ',' << csv_quote(row.error) << '\n';
    }
    finish(out, path);
  }
  if (cfg.emit_svg) {
    for (const char* metric : {"nuclear_norm", "effective_rank", "recon_error"}) {
      const fs::path path = dir / (std::string(metric) + ".svg");
      std::ofstream out = open(path);
      out << render_svg(rows, metric);
      finish(out, path);
    }
  }
  return written;
}

std::vector<std::filesystem::path> write_archive(const Problem& problem, const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());
  const fs::path ens_path = dir / "ensemble.txt";
  const fs::path truth_path = dir / "ground_truth.txt";
  std::ofstream ens_out(ens_path, std::ios::binary);
  write_ensemble(ens_out, problem.ensemble);
  std::ofstream truth_out(truth_path, std::ios::binary);
  write_ground_truth(truth_out, problem.truth, cfg.seed);
  ens_out.flush();
  truth_out.flush();
  if (!ens_out || !truth_out) throw Error(ErrorKind::IoError, "cannot write archive to " + dir.string());
  return {ens_path, truth_path};
}

// ---------------------------------------------------------------------------
// Bounds

BoundReport compute_bounds(const ExperimentConfig& cfg) {
  const Problem p = build_problem(cfg);
  BoundReport rep;
  const Svd dec = svd(p.truth.matrix);
  rep.nuclear_star = dec.singulars.sum();
  const Matrix u = dec.left.leftCols(cfg.r);
  const Matrix v = dec.right.leftCols(cfg.r);
  rep.mu0 = std::max(coherence(u), coherence(v));
  rep.mu1 = (u * v.transpose()).cwiseAbs().maxCoeff() *
            std::sqrt(static_cast<double>(cfg.n) * cfg.nprime / cfg.r);
  if (p.ensemble.kind() == EnsembleKind::DenseMatrices) {
    rep.rip_delta = rip_estimate(p.ensemble, cfg.r, cfg.rip_trials, cfg.seed);
  }

  std::vector<double> grid = cfg.alpha_grid;
  if (grid.empty()) {
    for (int k = 1; k <= 10; ++k) grid.push_back(std::pow(10.0, -k));
  }
  for (double a : grid) {
    BoundReport::Row row;
    row.alpha = a;
    BoundInputs b;
    b.nuclear_star = rep.nuclear_star;
    b.n = std::min(cfg.n, cfg.nprime);
    b.nprime = std::max(cfg.n, cfg.nprime);
    b.r = cfg.r;
    b.delta = cfg.delta;
    b.beta = a;
    b.alpha = a;
    b.m = cfg.m;
    b.c = cfg.c;
    b.mu0 = rep.mu0;
    b.mu1 = rep.mu1;
    try {
      row.theorem3 = theorem3_bound(b, p.psd);
      if (cfg.ensemble == EnsembleChoice::Completion) row.theorem4 = theorem4_bound(b, p.psd);
    } catch (const Error& err) {
      row.theorem3 = {std::numeric_limits<double>::infinity(), true};
      row.note = err.what();
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

void print_bounds(std::ostream& out, const ExperimentConfig& cfg, const BoundReport& rep) {
  const bool psd = cfg.psd_problem();
  out << "n=" << cfg.n << " nprime=" << cfg.nprime << " r=" << cfg.r << " m=" << cfg.m
      << " ensemble=" << to_string(cfg.ensemble) << " form=" << (psd ? "entropy" : "hypentropy") << '\n';
  out << "nuclear_star=" << format_double(rep.nuclear_star) << " mu0=" << format_double(rep.mu0)
      << " mu1=" << format_double(rep.mu1) << '\n';
  out << "delta=" << format_double(cfg.delta) << " c_delta=" << format_double(c_delta(cfg.delta));
  if (rep.rip_delta) out << " rip_estimate=" << format_double(*rep.rip_delta) << " (lower bound, " << cfg.rip_trials << " probes)";
  out << '\n';
  out << (psd ? "alpha" : "beta") << ",theorem3,theorem3_vacuous";
  const bool completion = cfg.ensemble == EnsembleChoice::Completion;
  if (completion) out << ",theorem4,theorem4_vacuous,sample_requirement,requirement_met,success_probability,probability_vacuous";
  out << ",note\n";
  for (const BoundReport::Row& row : rep.rows) {
    out << format_double(row.alpha) << ',' << format_double(row.theorem3.value) << ','
        << (row.theorem3.vacuous ? "true" : "false");
    if (completion) {
      if (row.theorem4) {
        const CompletionBound& t4 = *row.theorem4;
        out << ',' << format_double(t4.bound.value) << ',' << (t4.bound.vacuous ? "true" : "false") << ','
            << t4.sample_requirement << ',' << (t4.requirement_met ? "true" : "false") << ','
            << format_double(t4.failure_prob_complement) << ',' << (t4.probability_vacuous ? "true" : "false");
      } else {
        out << ",,,,,,";
      }
    }
    out << ',' << (row.note.empty() ? "" : csv_quote(row.note)) << '\n';
  }
}

}  // namespace mdsense
