#pragma once

// Spectral entropy and spectral hypentropy mirror maps.
//
//   entropy:     Phi(X)   = tr(X log X - X)                   on PSD matrices
//   hypentropy:  Phi_b(X) = sum_i s_i asinh(s_i / b) - sqrt(s_i^2 + b^2)
//
// together with their gradients, inverse gradients, Bregman divergences and
// the implicit-bias potentials minimized by mirror descent.

#include "mdsense/spectral.hpp"

namespace mdsense {

enum class MapKind { SpectralEntropy, SpectralHypentropy };

/// Rectangular: general n x n' matrices (SVD route).
/// Symmetric: square symmetric iterates; the hypentropy is evaluated through
/// eigenvalues, which agrees with the SVD route because asinh and sinh are odd.
/// PositiveSemidefinite: the entropy domain.
enum class MapDomain { Rectangular, Symmetric, PositiveSemidefinite };

class MirrorMapSpec {
 public:
  static MirrorMapSpec entropy();
  static MirrorMapSpec hypentropy(double beta, MapDomain domain = MapDomain::Rectangular);

  MapKind kind() const { return kind_; }
  MapDomain domain() const { return domain_; }
  /// Only meaningful for the hypentropy.
  double beta() const { return beta_; }
  bool symmetric() const { return domain_ != MapDomain::Rectangular; }

 private:
  MirrorMapSpec(MapKind kind, double beta, MapDomain domain)
      : kind_(kind), beta_(beta), domain_(domain) {}

  MapKind kind_;
  double beta_;
  MapDomain domain_;
};

/// Floor on entropy-map eigenvalues (relative to max(1, ||Y||_2)).
inline constexpr double kEntropyInteriorFloor = 1e-250;
/// Negative eigenvalues down to -kPsdClamp * ||X||_2 are treated as zero.
inline constexpr double kPsdClamp = 1e-10;
/// Largest spectral argument accepted by exp/sinh.
inline constexpr double kOverflowGuard = 700.0;

double hypentropy_value(const Matrix& x, double beta);
double entropy_value(const Matrix& x);
double value(const MirrorMapSpec& map, const Matrix& x);

Matrix grad(const MirrorMapSpec& map, const Matrix& x);
Matrix grad_inverse(const MirrorMapSpec& map, const Matrix& z);

double bregman(const MirrorMapSpec& map, const Matrix& x, const Matrix& y);

/// Log-form potential: sum_i s_i log(1/b) + s_i log(s_i + sqrt(s_i^2 + b^2)) - sqrt(s_i^2 + b^2).
double hypentropy_potential(const Matrix& x, double beta);
/// sum_i (log(1/a) - 1) l_i + l_i log l_i over the eigenvalues of PSD x.
double entropy_potential(const Matrix& x, double alpha);

/// Eigenvalues of a PSD matrix with round-off negatives clamped to zero.
/// Throws NotPSD below the clamp threshold.
Vector psd_eigenvalues(const Matrix& x);

}  // namespace mdsense
