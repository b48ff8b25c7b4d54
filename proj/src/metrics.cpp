#include "mdsense/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mdsense/error.hpp"

namespace mdsense {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Treats parameters within this relative distance of the range limit as
// sitting on the boundary.
constexpr double kBoundaryTol = 1e-12;

void check_common(const BoundInputs& b) {
  if (!(b.nuclear_star > 0.0) || b.n < 1 || b.nprime < 1 || b.r < 1) {
    throw Error(ErrorKind::ParameterOutOfRange, "need ||X*||_* > 0 and n, n', r >= 1");
  }
  if (!(b.delta >= 0.0 && b.delta < 1.0)) {
    throw Error(ErrorKind::ParameterOutOfRange, "delta must lie in [0, 1)");
  }
}

// Checks the parameter against its open upper limit. Returns true when it sits
// on the boundary (the bound is then vacuous).
bool check_scale(double value, double limit, const char* name) {
  if (!(value > 0.0)) {
    std::ostringstream msg;
    msg << name << " must be positive";
    throw Error(ErrorKind::ParameterOutOfRange, msg.str());
  }
  if (value > limit * (1.0 + kBoundaryTol)) {
    std::ostringstream msg;
    msg << name << " = " << value << " violates the range limit " << limit;
    throw Error(ErrorKind::ParameterOutOfRange, msg.str());
  }
  return value >= limit * (1.0 - kBoundaryTol);
}

// Delta_beta * N + (1 + Delta_beta) * n beta / (log(N / beta) - 1)
BoundValue hypentropy_core(const BoundInputs& b) {
  const double limit = b.nuclear_star / (1.05 * std::exp(1.0) * b.n);
  if (check_scale(b.beta, limit, "beta")) return {kInf, true};
  const double d = delta_beta(b.nuclear_star, b.beta, b.n);
  if (!(d > 0.0) || !std::isfinite(d)) return {kInf, true};
  const double tail = b.n * b.beta / (std::log(b.nuclear_star / b.beta) - 1.0);
  return {d * b.nuclear_star + (1.0 + d) * tail, false};
}

BoundValue entropy_core(const BoundInputs& b) {
  const double limit = b.nuclear_star / (std::exp(1.0) * b.n);
  if (check_scale(b.alpha, limit, "alpha")) return {kInf, true};
  const double d = delta_alpha(b.nuclear_star, b.alpha, b.n);
  if (!(d > 0.0) || !std::isfinite(d)) return {kInf, true};
  return {d * b.nuclear_star, false};
}

}  // namespace

double nuclear_norm(const Matrix& x) { return singular_values(x).sum(); }

double frobenius_norm(const Matrix& x) { return x.norm(); }

double spectral_norm(const Matrix& x) { return singular_values(x)[0]; }

double effective_rank_of_spectrum(const Vector& singulars) {
  const double total = singulars.sum();
  if (!(total > 0.0)) return 0.0;
  double entropy = 0.0;
  for (Eigen::Index i = 0; i < singulars.size(); ++i) {
    const double p = singulars[i] / total;
    if (p > 0.0) entropy -= p * std::log(p);
  }
  return std::exp(entropy);
}

double effective_rank(const Matrix& x) {
  const Vector s = singular_values(x);
  if (!(s.sum() > 0.0)) throw Error(ErrorKind::ZeroMatrix, "effective rank of the zero matrix");
  return effective_rank_of_spectrum(s);
}

double recon_error(const Matrix& x, const Matrix& truth) {
  if (x.rows() != truth.rows() || x.cols() != truth.cols()) {
    throw Error(ErrorKind::ShapeMismatch, "reconstruction error of differently shaped matrices");
  }
  return (x - truth).norm();
}

double c_delta(double delta) {
  const double root = std::sqrt(2.0 / 3.0);
  return 0.5 * (1.0 - root - delta * (1.0 + root));
}

double delta_beta(double nuclear_star, double beta, int n) {
  return 1.0 / ((std::log(nuclear_star / beta) - 1.0) / std::log(1.05 * n) - 1.0);
}

double delta_alpha(double nuclear_star, double alpha, int n) {
  return 1.0 / ((std::log(nuclear_star / alpha) - 1.0) / std::log(static_cast<double>(n)) - 1.0);
}

BoundValue theorem3_bound(const BoundInputs& b, bool psd_form) {
  check_common(b);
  const BoundValue core = psd_form ? entropy_core(b) : hypentropy_core(b);
  if (core.vacuous) return core;
  const double cd = c_delta(b.delta);
  if (!(cd > 0.0)) return {kInf, true};
  return {core.value / (cd * std::sqrt(3.0 * b.r)), false};
}

CompletionBound theorem4_bound(const BoundInputs& b, bool psd_form) {
  check_common(b);
  if (!(b.c > 1.0)) throw Error(ErrorKind::ParameterOutOfRange, "c must exceed 1");
  if (b.m < 1) throw Error(ErrorKind::ParameterOutOfRange, "m must be positive");
  if (psd_form && b.n != b.nprime) {
    throw Error(ErrorKind::ParameterOutOfRange, "PSD form requires n = n'");
  }
  CompletionBound out;

  const double n = b.n;
  const double np = b.nprime;
  const double m = static_cast<double>(b.m);
  const double log_np = std::log(np);
  const double sampling = 1.0 + std::sqrt(128.0 * b.c * n * np * log_np * log_np / (9.0 * m));
  const BoundValue core = psd_form ? entropy_core(b) : hypentropy_core(b);
  out.bound = core.vacuous ? core : BoundValue{6.0 * core.value * sampling, false};

  const double log_2np = std::log(2.0 * np);
  const double requirement =
      32.0 * b.c * std::max(b.mu0 * b.mu0, b.mu1) * b.r * (n + np) * log_2np * log_2np;
  out.sample_requirement = static_cast<std::int64_t>(std::ceil(requirement));
  out.requirement_met = b.m >= out.sample_requirement;

  const double success = 1.0 - 6.0 * log_np * std::pow(n + np, 2.0 - 2.0 * b.c) -
                         std::pow(np, 2.0 - 2.0 * std::sqrt(b.c));
  out.probability_vacuous = !(success > 0.0);
  out.failure_prob_complement = std::max(0.0, success);
  return out;
}

}  // namespace mdsense
