#include "mdsense/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "mdsense/error.hpp"
#include "mdsense/kernels.hpp"
#include "mdsense/rng.hpp"

namespace mdsense {

namespace {

std::span<const double> as_span(const Matrix& x) {
  return {x.data(), static_cast<std::size_t>(x.size())};
}

void require_shape(const SensingEnsemble& ens, const Matrix& x) {
  if (x.rows() != ens.rows() || x.cols() != ens.cols()) {
    std::ostringstream msg;
    msg << "matrix is " << x.rows() << "x" << x.cols() << ", ensemble expects " << ens.rows()
        << "x" << ens.cols();
    throw Error(ErrorKind::ShapeMismatch, msg.str());
  }
}

void require_observations(const SensingEnsemble& ens, const Observations& obs) {
  if (obs.y.size() != ens.size()) {
    throw Error(ErrorKind::ShapeMismatch, "observation count differs from ensemble size");
  }
}

Matrix gaussian(RandomStream& stream, int rows, int cols) {
  Matrix g(rows, cols);
  for (Eigen::Index j = 0; j < g.cols(); ++j)
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = stream.normal();
  return g;
}

}  // namespace

// ---------------------------------------------------------------------------
// SensingEnsemble

SensingEnsemble SensingEnsemble::dense(std::vector<Matrix> matrices, std::uint64_t seed) {
  if (matrices.empty()) throw Error(ErrorKind::InvalidArgument, "ensemble needs m >= 1");
  const Eigen::Index rows = matrices.front().rows();
  const Eigen::Index cols = matrices.front().cols();
  Matrix stacked(static_cast<Eigen::Index>(matrices.size()), rows * cols);
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    const Matrix& a = matrices[i];
    if (a.rows() != rows || a.cols() != cols) {
      throw Error(ErrorKind::ShapeMismatch, "sensing matrices differ in shape");
    }
    if (!a.allFinite()) throw Error(ErrorKind::DomainError, "sensing matrix has non-finite entries");
    stacked.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::RowVectorXd>(a.data(), a.size());
  }
  return dense_stacked(std::move(stacked), rows, cols, seed);
}

SensingEnsemble SensingEnsemble::dense_stacked(Matrix stacked, Eigen::Index rows, Eigen::Index cols,
                                               std::uint64_t seed) {
  if (rows < 1 || cols < 1 || stacked.rows() < 1 || stacked.cols() != rows * cols) {
    throw Error(ErrorKind::ShapeMismatch, "stacked ensemble has inconsistent dimensions");
  }
  SensingEnsemble ens;
  ens.kind_ = EnsembleKind::DenseMatrices;
  ens.rows_ = rows;
  ens.cols_ = cols;
  ens.m_ = stacked.rows();
  ens.seed_ = seed;
  ens.stacked_ = std::move(stacked);
  if (rows == cols) {
    bool exact = true;
    bool close = true;
    for (Eigen::Index i = 0; i < ens.m_ && close; ++i) {
      const Matrix a = ens.matrix(i);
      const double asym = (a - a.transpose()).norm();
      exact = exact && asym == 0.0;
      close = asym <= 1e-14 * std::max(1.0, a.norm());
    }
    ens.all_symmetric_ = close;
    // Symmetric ensembles get a half-size copy; the dense passes are
    // bandwidth bound, so this halves the cost of measure and adjoint.
    if (exact) {
      ens.packed_.resize(ens.m_, rows * (rows + 1) / 2);
      Eigen::Index p = 0;
      for (Eigen::Index j = 0; j < rows; ++j)
        for (Eigen::Index i = 0; i <= j; ++i) ens.packed_.col(p++) = ens.stacked_.col(j * rows + i);
    }
  }
  return ens;
}

SensingEnsemble SensingEnsemble::completion(Eigen::Index rows, Eigen::Index cols,
                                            std::vector<EntryIndex> indices, bool symmetric,
                                            std::uint64_t seed) {
  if (rows < 1 || cols < 1 || indices.empty()) {
    throw Error(ErrorKind::InvalidArgument, "completion mask needs a shape and m >= 1 indices");
  }
  if (symmetric && rows != cols) {
    throw Error(ErrorKind::NonSquare, "symmetrized completion requires a square shape");
  }
  for (const EntryIndex& idx : indices) {
    if (idx.row < 0 || idx.row >= rows || idx.col < 0 || idx.col >= cols) {
      throw Error(ErrorKind::ShapeMismatch, "completion index out of range");
    }
  }
  SensingEnsemble ens;
  ens.kind_ = EnsembleKind::CompletionMask;
  ens.rows_ = rows;
  ens.cols_ = cols;
  ens.m_ = static_cast<Eigen::Index>(indices.size());
  ens.seed_ = seed;
  ens.symmetric_ = symmetric;
  ens.indices_ = std::move(indices);
  ens.all_symmetric_ =
      rows == cols && (symmetric || std::all_of(ens.indices_.begin(), ens.indices_.end(),
                                                [](const EntryIndex& e) { return e.row == e.col; }));
  return ens;
}

Matrix SensingEnsemble::matrix(Eigen::Index i) const {
  if (i < 0 || i >= m_) throw Error(ErrorKind::InvalidArgument, "sensing matrix index out of range");
  if (kind_ == EnsembleKind::DenseMatrices) {
    Matrix a(rows_, cols_);
    Eigen::Map<Eigen::RowVectorXd>(a.data(), a.size()) = stacked_.row(i);
    return a;
  }
  Matrix a = Matrix::Zero(rows_, cols_);
  const EntryIndex& idx = indices_[static_cast<std::size_t>(i)];
  if (symmetric_) {
    a(idx.row, idx.col) += 0.5;
    a(idx.col, idx.row) += 0.5;
  } else {
    a(idx.row, idx.col) = 1.0;
  }
  return a;
}

// ---------------------------------------------------------------------------
// Generators

GroundTruth gen_lowrank_psd(int n, int r, std::uint64_t seed) {
  if (n < 1 || r < 1 || r > n) throw Error(ErrorKind::InvalidRank, "need 1 <= r <= n");
  RandomStream stream(seed, "ground_truth.psd");
  const Matrix u = gaussian(stream, n, r);
  Matrix x = u * u.transpose();
  x = (0.5 * (x + x.transpose())).eval();
  // Nuclear norm of a PSD matrix is its trace.
  x /= x.trace();
  return {std::move(x), r, true};
}

GroundTruth gen_lowrank_rect(int n, int nprime, int r, std::uint64_t seed) {
  if (n < 1 || nprime < 1 || r < 1 || r > std::min(n, nprime)) {
    throw Error(ErrorKind::InvalidRank, "need 1 <= r <= min(n, nprime)");
  }
  RandomStream stream(seed, "ground_truth.rect");
  const Matrix u = gaussian(stream, n, r);
  const Matrix v = gaussian(stream, nprime, r);
  Matrix x = u * v.transpose();
  x /= singular_values(x).sum();
  return {std::move(x), r, false};
}

SensingEnsemble gen_gaussian_sym(int n, int m, std::uint64_t seed) {
  if (n < 1 || m < 1) throw Error(ErrorKind::InvalidArgument, "need n, m >= 1");
  RandomStream stream(seed, "ensemble.gaussian_sym");
  Matrix stacked(m, static_cast<Eigen::Index>(n) * n);
  for (int i = 0; i < m; ++i) {
    const Matrix b = gaussian(stream, n, n);
    const Matrix a = 0.5 * (b + b.transpose());
    stacked.row(i) = Eigen::Map<const Eigen::RowVectorXd>(a.data(), a.size());
  }
  return SensingEnsemble::dense_stacked(std::move(stacked), n, n, seed);
}

SensingEnsemble gen_gaussian_rect(int n, int nprime, int m, std::uint64_t seed) {
  if (n < 1 || nprime < 1 || m < 1) throw Error(ErrorKind::InvalidArgument, "need n, nprime, m >= 1");
  RandomStream stream(seed, "ensemble.gaussian_rect");
  Matrix stacked(m, static_cast<Eigen::Index>(n) * nprime);
  for (int i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < stacked.cols(); ++j) stacked(i, j) = stream.normal();
  return SensingEnsemble::dense_stacked(std::move(stacked), n, nprime, seed);
}

SensingEnsemble gen_completion(int n, int nprime, int m, std::uint64_t seed, bool replacement,
                               bool symmetric) {
  if (n < 1 || nprime < 1 || m < 1) throw Error(ErrorKind::InvalidArgument, "need n, nprime, m >= 1");
  const std::uint64_t cells = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(nprime);
  if (!replacement && static_cast<std::uint64_t>(m) > cells) {
    std::ostringstream msg;
    msg << "cannot draw " << m << " distinct entries from " << cells;
    throw Error(ErrorKind::TooManySamples, msg.str());
  }
  RandomStream stream(seed, "ensemble.completion");
  std::vector<EntryIndex> indices;
  indices.reserve(static_cast<std::size_t>(m));
  const auto to_index = [nprime](std::uint64_t flat) {
    return EntryIndex{static_cast<Eigen::Index>(flat / static_cast<std::uint64_t>(nprime)),
                      static_cast<Eigen::Index>(flat % static_cast<std::uint64_t>(nprime))};
  };
  if (replacement) {
    for (int i = 0; i < m; ++i) indices.push_back(to_index(stream.below(cells)));
  } else {
    // Partial Fisher-Yates over the flattened cells.
    std::vector<std::uint64_t> pool(cells);
    std::iota(pool.begin(), pool.end(), std::uint64_t{0});
    for (int i = 0; i < m; ++i) {
      const std::uint64_t j = static_cast<std::uint64_t>(i) + stream.below(cells - static_cast<std::uint64_t>(i));
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
      indices.push_back(to_index(pool[static_cast<std::size_t>(i)]));
    }
  }
  return SensingEnsemble::completion(n, nprime, std::move(indices), symmetric, seed);
}

// ---------------------------------------------------------------------------
// Measurement, risk and gradient

double inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::ShapeMismatch, "inner product of differently shaped matrices");
  }
  return (a.array() * b.array()).sum();
}

Observations measure(const SensingEnsemble& ens, const Matrix& x) {
  require_shape(ens, x);
  Vector y(ens.size());
  if (ens.kind() == EnsembleKind::CompletionMask) {
    kernels::path_counters().sparse.fetch_add(1, std::memory_order_relaxed);
    const auto& idx = ens.indices();
    for (Eigen::Index i = 0; i < ens.size(); ++i) {
      const EntryIndex& e = idx[static_cast<std::size_t>(i)];
      y[i] = ens.symmetric_mask() ? 0.5 * (x(e.row, e.col) + x(e.col, e.row)) : x(e.row, e.col);
    }
    return {std::move(y)};
  }
  kernels::path_counters().dense.fetch_add(1, std::memory_order_relaxed);
  if (ens.packed().size() > 0) {
    // <A, X> = sum_{i<=j} A_ij (X_ij + X_ji) for i < j, A_ii X_ii on the diagonal.
    const Eigen::Index n = ens.rows();
    Vector xp(ens.packed().cols());
    Eigen::Index p = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < j; ++i) xp[p++] = x(i, j) + x(j, i);
      xp[p++] = x(j, j);
    }
    kernels::measure_parallel(ens.packed(), {xp.data(), static_cast<std::size_t>(xp.size())},
                              {y.data(), static_cast<std::size_t>(y.size())});
    return {std::move(y)};
  }
  kernels::measure_parallel(ens.stacked(), as_span(x), {y.data(), static_cast<std::size_t>(y.size())});
  return {std::move(y)};
}

Matrix adjoint(const SensingEnsemble& ens, const Vector& w) {
  if (w.size() != ens.size()) throw Error(ErrorKind::ShapeMismatch, "weight vector length differs from m");
  Matrix out = Matrix::Zero(ens.rows(), ens.cols());
  if (ens.kind() == EnsembleKind::CompletionMask) {
    kernels::path_counters().sparse.fetch_add(1, std::memory_order_relaxed);
    const auto& idx = ens.indices();
    for (Eigen::Index i = 0; i < ens.size(); ++i) {
      const EntryIndex& e = idx[static_cast<std::size_t>(i)];
      if (ens.symmetric_mask()) {
        out(e.row, e.col) += 0.5 * w[i];
        out(e.col, e.row) += 0.5 * w[i];
      } else {
        out(e.row, e.col) += w[i];
      }
    }
    return out;
  }
  kernels::path_counters().dense.fetch_add(1, std::memory_order_relaxed);
  if (ens.packed().size() > 0) {
    Vector packed(ens.packed().cols());
    kernels::adjoint_parallel(ens.packed(), {w.data(), static_cast<std::size_t>(w.size())},
                              {packed.data(), static_cast<std::size_t>(packed.size())});
    Eigen::Index p = 0;
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      for (Eigen::Index i = 0; i <= j; ++i) out(i, j) = out(j, i) = packed[p++];
    return out;
  }
  kernels::adjoint_parallel(ens.stacked(), {w.data(), static_cast<std::size_t>(w.size())},
                            {out.data(), static_cast<std::size_t>(out.size())});
  return out;
}

double risk(const SensingEnsemble& ens, const Observations& obs, const Matrix& x) {
  require_observations(ens, obs);
  const Vector residual = measure(ens, x).y - obs.y;
  return residual.squaredNorm() / (2.0 * static_cast<double>(ens.size()));
}

Matrix risk_grad(const SensingEnsemble& ens, const Observations& obs, const Matrix& x) {
  require_observations(ens, obs);
  const Vector residual = measure(ens, x).y - obs.y;
  return adjoint(ens, residual / static_cast<double>(ens.size()));
}

double mean_squared_spectral_norm(const SensingEnsemble& ens) {
  double total = 0.0;
  if (ens.kind() == EnsembleKind::CompletionMask) {
    for (const EntryIndex& e : ens.indices()) {
      const double norm = (ens.symmetric_mask() && e.row != e.col) ? 0.5 : 1.0;
      total += norm * norm;
    }
  } else {
    for (Eigen::Index i = 0; i < ens.size(); ++i) {
      const double norm = singular_values(ens.matrix(i))[0];
      total += norm * norm;
    }
  }
  return total / static_cast<double>(ens.size());
}

// ---------------------------------------------------------------------------
// Diagnostics

double rip_estimate(const SensingEnsemble& ens, int r, int trials, std::uint64_t seed) {
  const Eigen::Index n = ens.rows();
  const Eigen::Index nprime = ens.cols();
  if (r < 1 || r > std::min(n, nprime)) throw Error(ErrorKind::InvalidRank, "need 1 <= r <= min(n, n')");
  if (trials < 1) throw Error(ErrorKind::InvalidArgument, "need trials >= 1");
  RandomStream stream(seed, "diagnostics.rip");
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Matrix g = gaussian(stream, static_cast<int>(n), r);
    const Matrix h = gaussian(stream, static_cast<int>(nprime), r);
    Matrix probe = g * h.transpose();
    probe /= probe.norm();
    const Vector y = measure(ens, probe).y;
    const double gain = std::sqrt(y.squaredNorm() / static_cast<double>(ens.size()));
    worst = std::max(worst, std::abs(gain - 1.0));
  }
  return worst;
}

double coherence(const Matrix& basis) {
  const Eigen::Index n = basis.rows();
  const Eigen::Index r = basis.cols();
  if (r < 1 || r > n) throw Error(ErrorKind::NotOrthonormal, "basis must be n x r with 1 <= r <= n");
  const double defect = (basis.transpose() * basis - Matrix::Identity(r, r)).norm();
  if (!(defect <= 1e-8)) {
    std::ostringstream msg;
    msg << "columns are not orthonormal (defect " << defect << ")";
    throw Error(ErrorKind::NotOrthonormal, msg.str());
  }
  // ||P_U e_i||^2 = ||U^T e_i||^2, the squared norm of row i.
  const double max_row = basis.rowwise().squaredNorm().maxCoeff();
  return static_cast<double>(n) / static_cast<double>(r) * max_row;
}

// ---------------------------------------------------------------------------
// Text container

namespace {

std::string kind_tag(const SensingEnsemble& ens) {
  if (ens.kind() == EnsembleKind::DenseMatrices) return "dense";
  return ens.symmetric_mask() ? "completion_sym" : "completion";
}

void write_number(std::ostream& out, double v) { out << std::setprecision(17) << v; }

}  // namespace

void write_ensemble(std::ostream& out, const SensingEnsemble& ens) {
  out << kind_tag(ens) << ' ' << ens.rows() << ' ' << ens.cols() << ' ' << ens.size() << ' '
      << ens.seed() << '\n';
  if (ens.kind() == EnsembleKind::CompletionMask) {
    for (const EntryIndex& e : ens.indices()) out << e.row << ' ' << e.col << '\n';
    return;
  }
  // One sensing matrix per line, entries in row-major order.
  for (Eigen::Index i = 0; i < ens.size(); ++i) {
    const Matrix a = ens.matrix(i);
    for (Eigen::Index r = 0; r < a.rows(); ++r)
      for (Eigen::Index c = 0; c < a.cols(); ++c) {
        if (r != 0 || c != 0) out << ' ';
        write_number(out, a(r, c));
      }
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::IoError, "failed writing ensemble");
}

SensingEnsemble read_ensemble(std::istream& in) {
  std::string tag;
  Eigen::Index rows = 0, cols = 0, m = 0;
  std::uint64_t seed = 0;
  if (!(in >> tag >> rows >> cols >> m >> seed) || rows < 1 || cols < 1 || m < 1) {
    throw Error(ErrorKind::IoError, "malformed ensemble header");
  }
  if (tag == "completion" || tag == "completion_sym") {
    std::vector<EntryIndex> indices(static_cast<std::size_t>(m));
    for (auto& e : indices) {
      if (!(in >> e.row >> e.col)) throw Error(ErrorKind::IoError, "truncated completion indices");
    }
    return SensingEnsemble::completion(rows, cols, std::move(indices), tag == "completion_sym", seed);
  }
  if (tag != "dense") throw Error(ErrorKind::IoError, "unknown ensemble kind '" + tag + "'");
  std::vector<Matrix> matrices;
  matrices.reserve(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    Matrix a(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c)
        if (!(in >> a(r, c))) throw Error(ErrorKind::IoError, "truncated sensing matrix");
    matrices.push_back(std::move(a));
  }
  return SensingEnsemble::dense(std::move(matrices), seed);
}

void write_ground_truth(std::ostream& out, const GroundTruth& truth, std::uint64_t seed) {
  const Matrix& x = truth.matrix;
  out << (truth.psd ? "ground_truth_psd" : "ground_truth_rect") << ' ' << x.rows() << ' '
      << x.cols() << ' ' << truth.rank << ' ' << seed << '\n';
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (c != 0) out << ' ';
      write_number(out, x(r, c));
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::IoError, "failed writing ground truth");
}

GroundTruth read_ground_truth(std::istream& in) {
  std::string tag;
  Eigen::Index rows = 0, cols = 0;
  int rank = 0;
  std::uint64_t seed = 0;
  if (!(in >> tag >> rows >> cols >> rank >> seed) || rows < 1 || cols < 1) {
    throw Error(ErrorKind::IoError, "malformed ground truth header");
  }
  if (tag != "ground_truth_psd" && tag != "ground_truth_rect") {
    throw Error(ErrorKind::IoError, "unknown ground truth kind '" + tag + "'");
  }
  Matrix x(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      if (!(in >> x(r, c))) throw Error(ErrorKind::IoError, "truncated ground truth");
  return {std::move(x), rank, tag == "ground_truth_psd"};
}

}  // namespace mdsense
