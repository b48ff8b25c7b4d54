#pragma once

// Nuclear-norm minimization baseline:
//   argmin { ||X||_* : A(X) = y }          (optionally also X >= 0)
// solved by ADMM consensus splitting between the affine feasible set and the
// nuclear-norm proximal map.

#include <optional>

#include "mdsense/error.hpp"
#include "mdsense/sensing.hpp"

namespace mdsense {

struct NucminConfig {
  double penalty = 1.0;
  int max_iters = 20000;
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  bool psd = false;

  void validate() const;
};

/// Singular value soft-thresholding: U max(S - tau, 0) V^T.
Matrix svt_prox(const Matrix& x, double tau);
/// Eigenvalue soft-thresholding with clipping at zero: the proximal map of
/// tau ||X||_* restricted to the PSD cone (symmetric input).
Matrix psd_svt_prox(const Matrix& x, double tau);

/// Euclidean projection onto { Z : A(Z) = y }. The Gram matrix of the
/// measurement map is factored once and reused across calls.
class AffineProjector {
 public:
  AffineProjector(const SensingEnsemble& ens, const Observations& obs);

  Matrix project(const Matrix& x) const;
  /// True when the Gram matrix was singular and a 1e-10 ridge was applied.
  bool rank_deficient() const { return rank_deficient_; }

 private:
  const SensingEnsemble& ens_;
  const Observations& obs_;
  bool rank_deficient_ = false;
  Eigen::LDLT<Matrix> gram_;
};

Matrix affine_project(const SensingEnsemble& ens, const Observations& obs, const Matrix& x);

struct NucminResult {
  Matrix x;
  int iters = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool gram_rank_deficient = false;
};

class NucminNotConverged : public Error {
 public:
  NucminNotConverged(const std::string& what, NucminResult best)
      : Error(ErrorKind::MaxItersExceeded, what), best_(std::move(best)) {}
  const NucminResult& best() const { return best_; }

 private:
  NucminResult best_;
};

NucminResult nucmin(const SensingEnsemble& ens, const Observations& obs, const NucminConfig& cfg);

}  // namespace mdsense
