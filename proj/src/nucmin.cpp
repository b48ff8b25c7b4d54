#include "mdsense/nucmin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mdsense {

void NucminConfig::validate() const {
  if (!(penalty > 0.0)) throw Error(ErrorKind::InvalidArgument, "penalty must be > 0");
  if (max_iters < 1) throw Error(ErrorKind::InvalidArgument, "max_iters must be >= 1");
  if (!(primal_tol > 0.0) || !(dual_tol > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "tolerances must be > 0");
  }
}

Matrix svt_prox(const Matrix& x, double tau) {
  if (!(tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "tau must be > 0");
  return lift_rect(x, [tau](double s) { return std::max(s - tau, 0.0); });
}

Matrix psd_svt_prox(const Matrix& x, double tau) {
  if (!(tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "tau must be > 0");
  return lift_sym(x, [tau](double l) { return std::max(l - tau, 0.0); });
}

AffineProjector::AffineProjector(const SensingEnsemble& ens, const Observations& obs)
    : ens_(ens), obs_(obs) {
  if (obs.y.size() != ens.size()) {
    throw Error(ErrorKind::ShapeMismatch, "observation count differs from ensemble size");
  }
  if (ens.kind() == EnsembleKind::CompletionMask) return;
  Matrix gram = ens.stacked() * ens.stacked().transpose();
  gram_.compute(gram);
  const Vector d = gram_.vectorD().cwiseAbs();
  if (gram_.info() != Eigen::Success || d.minCoeff() <= 1e-12 * d.maxCoeff()) {
    rank_deficient_ = true;
    gram.diagonal().array() += 1e-10;
    gram_.compute(gram);
  }
}

Matrix AffineProjector::project(const Matrix& x) const {
  if (x.rows() != ens_.rows() || x.cols() != ens_.cols()) {
    throw Error(ErrorKind::ShapeMismatch, "matrix does not match the ensemble shape");
  }
  if (ens_.kind() == EnsembleKind::CompletionMask) {
    // Constraints on distinct entries are orthogonal, so applying them in
    // sequence is the exact projection; repeated entries become no-ops.
    Matrix out = x;
    const auto& idx = ens_.indices();
    for (Eigen::Index i = 0; i < ens_.size(); ++i) {
      const EntryIndex& e = idx[static_cast<std::size_t>(i)];
      const double target = obs_.y[i];
      if (ens_.symmetric_mask() && e.row != e.col) {
        const double shift = target - 0.5 * (out(e.row, e.col) + out(e.col, e.row));
        out(e.row, e.col) += shift;
        out(e.col, e.row) += shift;
      } else {
        out(e.row, e.col) = target;
      }
    }
    return out;
  }
  const Vector residual = measure(ens_, x).y - obs_.y;
  const Vector weights = gram_.solve(residual);
  return x - adjoint(ens_, weights);
}

Matrix affine_project(const SensingEnsemble& ens, const Observations& obs, const Matrix& x) {
  return AffineProjector(ens, obs).project(x);
}

NucminResult nucmin(const SensingEnsemble& ens, const Observations& obs, const NucminConfig& cfg) {
  cfg.validate();
  if (cfg.psd && ens.rows() != ens.cols()) {
    throw Error(ErrorKind::NonSquare, "PSD nuclear-norm minimization needs a square ensemble");
  }
  const AffineProjector projector(ens, obs);
  const double tau = 1.0 / cfg.penalty;
  const auto prox = [&](const Matrix& v) {
    return cfg.psd ? psd_svt_prox(0.5 * (v + v.transpose()), tau) : svt_prox(v, tau);
  };

  Matrix z = Matrix::Zero(ens.rows(), ens.cols());
  Matrix w = Matrix::Zero(ens.rows(), ens.cols());
  NucminResult best;
  best.gram_rank_deficient = projector.rank_deficient();
  double best_score = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= cfg.max_iters; ++k) {
    Matrix x = projector.project(z - w);
    if (cfg.psd) x = (0.5 * (x + x.transpose())).eval();
    Matrix z_next = prox(x + w);
    w += x - z_next;
    const double primal = (x - z_next).norm();
    const double dual = cfg.penalty * (z_next - z).norm();
    z = std::move(z_next);
    const double score = std::max(primal / cfg.primal_tol, dual / cfg.dual_tol);
    if (score < best_score) {
      best_score = score;
      best.x = x;
      best.iters = k;
      best.primal_residual = primal;
      best.dual_residual = dual;
    }
    if (primal <= cfg.primal_tol && dual <= cfg.dual_tol) {
      return {std::move(x), k, primal, dual, projector.rank_deficient()};
    }
  }
  std::ostringstream msg;
  msg << "no convergence in " << cfg.max_iters << " iterations (best primal "
      << best.primal_residual << ", dual " << best.dual_residual << ")";
  throw NucminNotConverged(msg.str(), std::move(best));
}

}  // namespace mdsense
