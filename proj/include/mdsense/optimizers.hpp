#pragma once

// Iterative algorithms for noiseless matrix sensing:
//
//   mirror descent        grad Phi(X_{t+1}) = grad Phi(X_t) - eta grad f(X_t)
//   exponentiated grad.   X = U - V,  U <- (U e^{-eta G} + e^{-eta G} U) / 2,
//                                     V <- (V e^{+eta G} + e^{+eta G} V) / 2
//   factored GD (PSD)     X = U U^T,          U <- U - eta (G + G^T) U
//   factored GD (sym)     X = U U^T - V V^T,  U <- U - eta (G + G^T) U,
//                                             V <- V + eta (G + G^T) V
//
// where G = grad f(X_t). Each run produces a Trajectory logging the risk and
// spectral summaries of every iterate.

#include <optional>
#include <vector>

#include "mdsense/error.hpp"
#include "mdsense/mirror_maps.hpp"
#include "mdsense/sensing.hpp"

namespace mdsense {

enum class Algorithm { MirrorDescent, ExpGradient, GdFactoredPsd, GdFactoredSym };

struct RunConfig {
  Algorithm algorithm = Algorithm::MirrorDescent;
  std::optional<MirrorMapSpec> map;  // MirrorDescent only
  double step = 1.0;
  int max_iters = 5000;
  double risk_tol = 1e-12;
  double init_alpha = 1e-3;
  /// Keep a dense iterate every k iterations (0 = final iterate only).
  int snapshot_every = 0;

  void validate() const;
};

struct IterRecord {
  int iter = 0;
  double risk = 0.0;
  double nuclear_norm = 0.0;
  /// 0 for the zero matrix.
  double effective_rank = 0.0;
  std::optional<double> recon_error;
  /// D(X_final, X_t); filled post hoc for snapshot iterations.
  std::optional<double> bregman_to_final;
};

struct Snapshot {
  int iter = 0;
  Matrix x;
  Matrix u;  // factor iterates, empty for mirror descent
  Matrix v;
};

struct Trajectory {
  std::vector<IterRecord> records;
  std::vector<Snapshot> snapshots;
  Matrix final_iterate;
  Matrix final_u;
  Matrix final_v;
  bool converged = false;
  int iters_run = 0;
};

/// Thrown when a run aborts (overflow, collapse, divergence); carries the
/// trajectory up to the last good iterate.
class RunFailure : public Error {
 public:
  RunFailure(ErrorKind kind, const std::string& what, Trajectory partial)
      : Error(kind, what), partial_(std::move(partial)) {}

  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

/// Optional ground truth used for the recon_error column.
struct RunContext {
  const Matrix* truth = nullptr;
};

/// GD runs abort once risk exceeds this multiple of the initial risk.
inline constexpr double kDivergenceFactor = 1e6;

Trajectory mirror_descent(const MirrorMapSpec& map, const SensingEnsemble& ens,
                          const Observations& obs, const Matrix& x0, const RunConfig& cfg,
                          RunContext ctx = {});

Trajectory exp_gradient(const SensingEnsemble& ens, const Observations& obs, const Matrix& u0,
                        const Matrix& v0, const RunConfig& cfg, RunContext ctx = {});

Trajectory gd_factored_psd(const SensingEnsemble& ens, const Observations& obs, const Matrix& u0,
                           const RunConfig& cfg, RunContext ctx = {});

Trajectory gd_factored_sym(const SensingEnsemble& ens, const Observations& obs, const Matrix& u0,
                           const Matrix& v0, const RunConfig& cfg, RunContext ctx = {});

/// Fills bregman_to_final on every record that has a matching snapshot.
void fill_bregman_to_final(const MirrorMapSpec& map, Trajectory& traj);

struct StepBound {
  double value = 0.0;
  double risk_bound = 0.0;  // from the risk condition; +inf when unbounded
  bool risk_bound_unbounded = false;
  double norm_bound = 0.0;  // from the nuclear-norm condition
};

/// Largest step satisfying both sufficient conditions at X:
///   eta <= (1 / (8 sqrt 2)) (L f(X))^{-1/2}
///   eta <= (1/4) (L (||X||_* + beta n))^{-1}        (beta n dropped for entropy)
/// with L = (1/m) sum ||A_i||_2^2.
StepBound safe_step_bound(const SensingEnsemble& ens, const Observations& obs, const Matrix& x,
                          const MirrorMapSpec& map);
StepBound safe_step_bound(double mean_sq_spectral, double risk_value, double nuclear,
                          const MirrorMapSpec& map, Eigen::Index min_dim);

}  // namespace mdsense
