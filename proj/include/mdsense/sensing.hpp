#pragma once

// Ground-truth generation, measurement ensembles, the empirical risk
//   f(X) = 1/(2m) sum_i (<A_i, X> - y_i)^2
// and its gradient, and the RIP / coherence diagnostics.

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "mdsense/spectral.hpp"

namespace mdsense {

enum class EnsembleKind { DenseMatrices, CompletionMask };

struct EntryIndex {
  Eigen::Index row;
  Eigen::Index col;

  friend bool operator==(const EntryIndex&, const EntryIndex&) = default;
};

/// m sensing matrices of shape rows x cols. Immutable after construction.
///
/// DenseMatrices: `stacked` is m x (rows*cols); row i holds vec(A_i) in
/// column-major order.
/// CompletionMask: A_i = e_a e_b^T. With `symmetric` set, the operator is the
/// symmetrized A_i = (e_a e_b^T + e_b e_a^T) / 2, which observes the same value
/// on symmetric matrices and keeps gradients symmetric.
class SensingEnsemble {
 public:
  static SensingEnsemble dense(std::vector<Matrix> matrices, std::uint64_t seed = 0);
  static SensingEnsemble dense_stacked(Matrix stacked, Eigen::Index rows, Eigen::Index cols,
                                       std::uint64_t seed = 0);
  static SensingEnsemble completion(Eigen::Index rows, Eigen::Index cols,
                                    std::vector<EntryIndex> indices, bool symmetric = false,
                                    std::uint64_t seed = 0);

  EnsembleKind kind() const { return kind_; }
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  Eigen::Index size() const { return m_; }
  std::uint64_t seed() const { return seed_; }
  bool symmetric_mask() const { return symmetric_; }

  const Matrix& stacked() const { return stacked_; }
  const std::vector<EntryIndex>& indices() const { return indices_; }

  /// Dense form of A_i.
  Matrix matrix(Eigen::Index i) const;
  /// True when every A_i is symmetric (so risk gradients are symmetric).
  bool all_symmetric() const { return all_symmetric_; }
  /// For exactly symmetric dense ensembles: m x n(n+1)/2, the upper triangles
  /// of the A_i packed column by column. Empty otherwise.
  const Matrix& packed() const { return packed_; }

 private:
  SensingEnsemble() = default;

  EnsembleKind kind_ = EnsembleKind::DenseMatrices;
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  Eigen::Index m_ = 0;
  std::uint64_t seed_ = 0;
  bool symmetric_ = false;
  bool all_symmetric_ = false;
  Matrix stacked_;
  Matrix packed_;
  std::vector<EntryIndex> indices_;
};

struct Observations {
  Vector y;
};

struct GroundTruth {
  Matrix matrix;
  int rank = 0;
  bool psd = false;
};

GroundTruth gen_lowrank_psd(int n, int r, std::uint64_t seed);
GroundTruth gen_lowrank_rect(int n, int nprime, int r, std::uint64_t seed);

SensingEnsemble gen_gaussian_sym(int n, int m, std::uint64_t seed);
SensingEnsemble gen_gaussian_rect(int n, int nprime, int m, std::uint64_t seed);
SensingEnsemble gen_completion(int n, int nprime, int m, std::uint64_t seed, bool replacement,
                               bool symmetric = false);

/// Frobenius inner product <a, b> = tr(a^T b).
double inner(const Matrix& a, const Matrix& b);

Observations measure(const SensingEnsemble& ens, const Matrix& x);
double risk(const SensingEnsemble& ens, const Observations& obs, const Matrix& x);
Matrix risk_grad(const SensingEnsemble& ens, const Observations& obs, const Matrix& x);

/// Adjoint of the measurement map: sum_i w_i A_i.
Matrix adjoint(const SensingEnsemble& ens, const Vector& w);

/// (1/m) sum_i ||A_i||_2^2.
double mean_squared_spectral_norm(const SensingEnsemble& ens);

/// Monte Carlo lower bound on the (r, delta)-RIP constant. Trial t always
/// draws the same probe for a given seed, so more trials never decrease it.
double rip_estimate(const SensingEnsemble& ens, int r, int trials, std::uint64_t seed);

/// (n / r) max_i ||P_U e_i||^2 for a basis with orthonormal columns.
double coherence(const Matrix& basis);

/// Text container: one header line "kind n nprime m seed", then rows of numbers.
void write_ensemble(std::ostream& out, const SensingEnsemble& ens);
SensingEnsemble read_ensemble(std::istream& in);
/// Header "ground_truth_psd|ground_truth_rect n nprime rank seed", then n rows.
void write_ground_truth(std::ostream& out, const GroundTruth& truth, std::uint64_t seed);
GroundTruth read_ground_truth(std::istream& in);

}  // namespace mdsense
