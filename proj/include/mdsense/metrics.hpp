#pragma once

// Scalar diagnostics and closed-form recovery bounds.

#include <cstdint>

#include "mdsense/spectral.hpp"

namespace mdsense {

double nuclear_norm(const Matrix& x);
double frobenius_norm(const Matrix& x);
double spectral_norm(const Matrix& x);

/// exp(-sum p_i log p_i) with p_i = s_i / ||X||_*. Throws ZeroMatrix.
double effective_rank(const Matrix& x);
/// Same, from a nonnegative spectrum; returns 0 for an all-zero spectrum.
double effective_rank_of_spectrum(const Vector& singulars);

double recon_error(const Matrix& x, const Matrix& truth);

struct BoundInputs {
  double nuclear_star = 1.0;  // ||X*||_*
  int n = 1;
  int nprime = 1;
  int r = 1;
  double delta = 0.1;  // RIP constant
  double beta = 0.0;   // hypentropy form
  double alpha = 0.0;  // PSD (entropy) form
  std::int64_t m = 1;
  double c = 2.0;
  double mu0 = 1.0;
  double mu1 = 1.0;
};

/// A bound value together with whether it says anything. `vacuous` is set at
/// boundary degeneracies, where `value` is +infinity.
struct BoundValue {
  double value = 0.0;
  bool vacuous = false;
};

/// C_delta = (1 - sqrt(2/3) - delta (1 + sqrt(2/3))) / 2.
double c_delta(double delta);
/// Delta_beta = ((log(N/beta) - 1) / log(1.05 n) - 1)^-1.
double delta_beta(double nuclear_star, double beta, int n);
/// Delta_alpha = ((log(N/alpha) - 1) / log n - 1)^-1.
double delta_alpha(double nuclear_star, double alpha, int n);

/// RIP recovery bound on ||X_inf - X*||_F. `psd_form` selects the entropy
/// (alpha) variant. Throws ParameterOutOfRange when beta / alpha violate the
/// theorem's range.
BoundValue theorem3_bound(const BoundInputs& b, bool psd_form);

struct CompletionBound {
  BoundValue bound;
  std::int64_t sample_requirement = 0;
  bool requirement_met = false;
  double failure_prob_complement = 0.0;  // success probability lower bound, clamped at 0
  bool probability_vacuous = false;
};

/// Matrix-completion recovery bound, sample requirement and probability.
CompletionBound theorem4_bound(const BoundInputs& b, bool psd_form);

}  // namespace mdsense
