#include "mdsense/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "mdsense/metrics.hpp"

namespace mdsense {

void RunConfig::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw Error(ErrorKind::InvalidArgument, "step must be > 0");
  if (max_iters < 1) throw Error(ErrorKind::InvalidArgument, "max_iters must be >= 1");
  if (!(risk_tol >= 0.0)) throw Error(ErrorKind::InvalidArgument, "risk_tol must be >= 0");
  if (!(init_alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "init_alpha must be > 0");
  if (snapshot_every < 0) throw Error(ErrorKind::InvalidArgument, "snapshot_every must be >= 0");
}

namespace {

struct Evaluation {
  double risk;
  Matrix grad;
};

Evaluation evaluate(const SensingEnsemble& ens, const Observations& obs, const Matrix& x) {
  const Vector residual = measure(ens, x).y - obs.y;
  const double m = static_cast<double>(ens.size());
  return {residual.squaredNorm() / (2.0 * m), adjoint(ens, residual / m)};
}

Matrix sym(const Matrix& x) { return 0.5 * (x + x.transpose()); }

bool is_symmetric(const Matrix& x) {
  return x.rows() == x.cols() &&
         (x - x.transpose()).norm() <= kSymmetryTolerance * std::max(1.0, x.norm());
}

Vector abs_spectrum(const Matrix& x) {
  if (is_symmetric(x)) {
    Vector s = sym_eigenvalues(x).cwiseAbs();
    std::sort(s.data(), s.data() + s.size(), std::greater<>());
    return s;
  }
  return singular_values(x);
}

// Bookkeeping shared by all four algorithms.
class Recorder {
 public:
  Recorder(const RunConfig& cfg, RunContext ctx) : cfg_(cfg), ctx_(ctx) {}

  void record(int t, double risk, const Matrix& x, const Matrix* u = nullptr,
              const Matrix* v = nullptr) {
    IterRecord rec;
    rec.iter = t;
    rec.risk = risk;
    const Vector s = abs_spectrum(x);
    rec.nuclear_norm = s.sum();
    rec.effective_rank = effective_rank_of_spectrum(s);
    if (ctx_.truth != nullptr) rec.recon_error = recon_error(x, *ctx_.truth);
    traj_.records.push_back(rec);
    if (cfg_.snapshot_every > 0 && t % cfg_.snapshot_every == 0) {
      traj_.snapshots.push_back({t, x, u ? *u : Matrix(), v ? *v : Matrix()});
    }
  }

  Trajectory finish(int t, bool converged, const Matrix& x, const Matrix* u = nullptr,
                    const Matrix* v = nullptr) {
    traj_.iters_run = t;
    traj_.converged = converged;
    traj_.final_iterate = x;
    if (u) traj_.final_u = *u;
    if (v) traj_.final_v = *v;
    return std::move(traj_);
  }

  [[noreturn]] void fail(const Error& err, int t, const Matrix& x, const Matrix* u = nullptr,
                         const Matrix* v = nullptr) {
    std::ostringstream msg;
    msg << "run aborted at iteration " << t << ": " << err.what();
    throw RunFailure(err.kind(), msg.str(), finish(t, false, x, u, v));
  }

  void check_divergence(int t, double risk, const Matrix& x, const Matrix* u, const Matrix* v) {
    if (t == 0) initial_risk_ = risk;
    const bool blown = !std::isfinite(risk) ||
                       (initial_risk_ > 0.0 && risk > kDivergenceFactor * initial_risk_);
    if (blown) {
      std::ostringstream msg;
      msg << "risk " << risk << " exceeds " << kDivergenceFactor << " x initial risk "
          << initial_risk_;
      fail(Error(ErrorKind::Divergence, msg.str()), t, x, u, v);
    }
  }

 private:
  const RunConfig& cfg_;
  RunContext ctx_;
  Trajectory traj_;
  double initial_risk_ = 0.0;
};

void check_square_symmetric(const SensingEnsemble& ens, const char* who) {
  if (ens.rows() != ens.cols()) {
    throw Error(ErrorKind::NonSquare, std::string(who) + " needs a square ensemble");
  }
  if (!ens.all_symmetric()) {
    throw Error(ErrorKind::AsymmetricInput, std::string(who) + " needs symmetric sensing matrices");
  }
}

void check_shape(const SensingEnsemble& ens, const Matrix& x, const char* what) {
  if (x.rows() != ens.rows() || x.cols() != ens.cols()) {
    throw Error(ErrorKind::ShapeMismatch, std::string(what) + " does not match the ensemble shape");
  }
}

}  // namespace

Trajectory mirror_descent(const MirrorMapSpec& map, const SensingEnsemble& ens,
                          const Observations& obs, const Matrix& x0, const RunConfig& cfg,
                          RunContext ctx) {
  cfg.validate();
  check_shape(ens, x0, "initial iterate");
  const bool symmetric = map.symmetric();
  if (symmetric && !ens.all_symmetric()) {
    throw Error(ErrorKind::AsymmetricInput, "symmetric mirror descent needs symmetric sensing matrices");
  }

  Recorder rec(cfg, ctx);
  Matrix x = symmetric ? symmetrized(x0) : x0;
  // The dual iterate grad Phi(X_t) is carried forward instead of being
  // recomputed from X_t.
  Matrix dual = grad(map, x);
  for (int t = 0;; ++t) {
    Evaluation ev = evaluate(ens, obs, x);
    rec.record(t, ev.risk, x);
    if (ev.risk <= cfg.risk_tol) return rec.finish(t, true, x);
    if (t == cfg.max_iters) return rec.finish(t, false, x);
    dual -= cfg.step * ev.grad;
    if (symmetric) dual = sym(dual);
    try {
      Matrix next;
      if (map.kind() == MapKind::SpectralEntropy) {
        const SymEig eig = sym_eig(dual);
        const double top = eig.eigenvalues[0];
        const double bottom = eig.eigenvalues[eig.eigenvalues.size() - 1];
        if (std::max(std::abs(top), std::abs(bottom)) > kOverflowGuard) {
          throw Error(ErrorKind::Overflow, "spectral argument exceeds overflow guard");
        }
        // Collapse of the PSD iterate shows up as an eigenvalue under the floor.
        if (!(std::exp(bottom) > kEntropyInteriorFloor * std::max(1.0, std::exp(top)))) {
          throw Error(ErrorKind::NotPD, "entropy iterate collapsed below the interior floor");
        }
        next = lift_sym(eig, [](double l) { return std::exp(l); });
      } else {
        next = grad_inverse(map, dual);
      }
      if (!next.allFinite()) throw Error(ErrorKind::Overflow, "non-finite iterate");
      x = symmetric ? sym(next) : std::move(next);
    } catch (const Error& err) {
      rec.fail(err, t, x);
    }
  }
}

Trajectory exp_gradient(const SensingEnsemble& ens, const Observations& obs, const Matrix& u0,
                        const Matrix& v0, const RunConfig& cfg, RunContext ctx) {
  cfg.validate();
  check_square_symmetric(ens, "exp_gradient");
  check_shape(ens, u0, "U0");
  check_shape(ens, v0, "V0");
  Recorder rec(cfg, ctx);
  Matrix u = symmetrized(u0);
  Matrix v = symmetrized(v0);
  for (int t = 0;; ++t) {
    const Matrix x = u - v;
    Evaluation ev = evaluate(ens, obs, x);
    rec.record(t, ev.risk, x, &u, &v);
    if (ev.risk <= cfg.risk_tol) return rec.finish(t, true, x, &u, &v);
    if (t == cfg.max_iters) return rec.finish(t, false, x, &u, &v);
    try {
      const SymEig eig = sym_eig(ev.grad);
      const double eta = cfg.step;
      if (eta * eig.eigenvalues.cwiseAbs().maxCoeff() > kOverflowGuard) {
        throw Error(ErrorKind::Overflow, "exponent exceeds overflow guard");
      }
      const Matrix shrink = lift_sym(eig, [eta](double l) { return std::exp(-eta * l); });
      const Matrix grow = lift_sym(eig, [eta](double l) { return std::exp(eta * l); });
      u = 0.5 * (u * shrink + shrink * u);
      v = 0.5 * (v * grow + grow * v);
    } catch (const Error& err) {
      rec.fail(err, t, x, &u, &v);
    }
  }
}

Trajectory gd_factored_psd(const SensingEnsemble& ens, const Observations& obs, const Matrix& u0,
                           const RunConfig& cfg, RunContext ctx) {
  cfg.validate();
  check_shape(ens, u0, "U0");
  if (ens.rows() != ens.cols()) throw Error(ErrorKind::NonSquare, "gd_factored_psd needs a square ensemble");
  Recorder rec(cfg, ctx);
  Matrix u = u0;
  for (int t = 0;; ++t) {
    const Matrix x = sym(u * u.transpose());
    Evaluation ev = evaluate(ens, obs, x);
    rec.record(t, ev.risk, x, &u);
    rec.check_divergence(t, ev.risk, x, &u, nullptr);
    if (ev.risk <= cfg.risk_tol) return rec.finish(t, true, x, &u);
    if (t == cfg.max_iters) return rec.finish(t, false, x, &u);
    // d/dU f(U U^T) = (G + G^T) U.
    u -= cfg.step * ((ev.grad + ev.grad.transpose()) * u);
  }
}

Trajectory gd_factored_sym(const SensingEnsemble& ens, const Observations& obs, const Matrix& u0,
                           const Matrix& v0, const RunConfig& cfg, RunContext ctx) {
  cfg.validate();
  check_square_symmetric(ens, "gd_factored_sym");
  check_shape(ens, u0, "U0");
  check_shape(ens, v0, "V0");
  Recorder rec(cfg, ctx);
  Matrix u = u0;
  Matrix v = v0;
  for (int t = 0;; ++t) {
    const Matrix x = sym(u * u.transpose() - v * v.transpose());
    Evaluation ev = evaluate(ens, obs, x);
    rec.record(t, ev.risk, x, &u, &v);
    rec.check_divergence(t, ev.risk, x, &u, &v);
    if (ev.risk <= cfg.risk_tol) return rec.finish(t, true, x, &u, &v);
    if (t == cfg.max_iters) return rec.finish(t, false, x, &u, &v);
    const Matrix g2 = ev.grad + ev.grad.transpose();
    const Matrix u_next = u - cfg.step * (g2 * u);
    v += cfg.step * (g2 * v);
    u = u_next;
  }
}

void fill_bregman_to_final(const MirrorMapSpec& map, Trajectory& traj) {
  for (const Snapshot& snap : traj.snapshots) {
    if (snap.iter < 0 || snap.iter >= static_cast<int>(traj.records.size())) continue;
    traj.records[static_cast<std::size_t>(snap.iter)].bregman_to_final =
        bregman(map, traj.final_iterate, snap.x);
  }
  if (!traj.records.empty()) {
    traj.records.back().bregman_to_final = 0.0;
  }
}

StepBound safe_step_bound(double mean_sq_spectral, double risk_value, double nuclear,
                          const MirrorMapSpec& map, Eigen::Index min_dim) {
  StepBound out;
  if (risk_value > 0.0) {
    out.risk_bound = 1.0 / (8.0 * std::sqrt(2.0)) / std::sqrt(mean_sq_spectral * risk_value);
  } else {
    out.risk_bound = std::numeric_limits<double>::infinity();
    out.risk_bound_unbounded = true;
  }
  double radius = nuclear;
  if (map.kind() == MapKind::SpectralHypentropy) radius += map.beta() * static_cast<double>(min_dim);
  out.norm_bound = 0.25 / (mean_sq_spectral * radius);
  out.value = std::min(out.risk_bound, out.norm_bound);
  return out;
}

StepBound safe_step_bound(const SensingEnsemble& ens, const Observations& obs, const Matrix& x,
                          const MirrorMapSpec& map) {
  return safe_step_bound(mean_squared_spectral_norm(ens), risk(ens, obs, x), nuclear_norm(x), map,
                         std::min(ens.rows(), ens.cols()));
}

}  // namespace mdsense
