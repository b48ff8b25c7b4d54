#include "mdsense/mirror_maps.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mdsense/error.hpp"

namespace mdsense {

MirrorMapSpec MirrorMapSpec::entropy() {
  return {MapKind::SpectralEntropy, 0.0, MapDomain::PositiveSemidefinite};
}

MirrorMapSpec MirrorMapSpec::hypentropy(double beta, MapDomain domain) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorKind::InvalidArgument, "hypentropy requires beta > 0");
  }
  if (domain == MapDomain::PositiveSemidefinite) domain = MapDomain::Symmetric;
  return {MapKind::SpectralHypentropy, beta, domain};
}

namespace {

// Absolute spectrum of x: singular values, or |eigenvalues| for symmetric x.
Vector abs_spectrum(const Matrix& x, bool symmetric) {
  if (symmetric) return sym_eigenvalues(x).cwiseAbs();
  return singular_values(x);
}

bool looks_symmetric(const Matrix& x) {
  return x.rows() == x.cols() &&
         (x - x.transpose()).norm() <= kSymmetryTolerance * std::max(1.0, x.norm());
}

void check_entropy_interior(const Vector& eigenvalues) {
  const double spectral = eigenvalues.cwiseAbs().maxCoeff();
  const double floor = kEntropyInteriorFloor * std::max(1.0, spectral);
  const double smallest = eigenvalues.minCoeff();
  if (!(smallest > floor)) {
    std::ostringstream msg;
    msg << "smallest eigenvalue " << smallest << " is not above the interior floor " << floor;
    throw Error(ErrorKind::NotPD, msg.str());
  }
}

void check_overflow(const Vector& spectrum) {
  const double largest = spectrum.cwiseAbs().maxCoeff();
  if (largest > kOverflowGuard) {
    std::ostringstream msg;
    msg << "spectral argument " << largest << " exceeds overflow guard " << kOverflowGuard;
    throw Error(ErrorKind::Overflow, msg.str());
  }
}

double hypentropy_term(double s, double beta) {
  return s * std::asinh(s / beta) - std::hypot(s, beta);
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

Vector psd_eigenvalues(const Matrix& x) {
  Vector lambda = sym_eigenvalues(x);
  const double spectral = lambda.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] < 0.0) {
      if (lambda[i] < -kPsdClamp * spectral) {
        std::ostringstream msg;
        msg << "eigenvalue " << lambda[i] << " below PSD clamp threshold";
        throw Error(ErrorKind::NotPSD, msg.str());
      }
      lambda[i] = 0.0;
    }
  }
  return lambda;
}

double hypentropy_value(const Matrix& x, double beta) {
  if (!(beta > 0.0)) throw Error(ErrorKind::InvalidArgument, "beta must be positive");
  const Vector s = singular_values(x);
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) total += hypentropy_term(s[i], beta);
  return total;
}

double entropy_value(const Matrix& x) {
  const Vector lambda = psd_eigenvalues(x);
  double total = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) total += xlogx(lambda[i]) - lambda[i];
  return total;
}

double value(const MirrorMapSpec& map, const Matrix& x) {
  if (map.kind() == MapKind::SpectralEntropy) return entropy_value(x);
  if (map.symmetric() && looks_symmetric(x)) {
    const Vector s = abs_spectrum(x, true);
    double total = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) total += hypentropy_term(s[i], map.beta());
    return total;
  }
  return hypentropy_value(x, map.beta());
}

Matrix grad(const MirrorMapSpec& map, const Matrix& x) {
  if (map.kind() == MapKind::SpectralEntropy) {
    const SymEig eig = sym_eig(x);
    check_entropy_interior(eig.eigenvalues);
    return lift_sym(eig, [](double l) { return std::log(l); });
  }
  const double beta = map.beta();
  const auto f = [beta](double s) { return std::asinh(s / beta); };
  if (map.symmetric()) return lift_sym(x, f);
  return lift_rect(x, f);
}

Matrix grad_inverse(const MirrorMapSpec& map, const Matrix& z) {
  if (map.kind() == MapKind::SpectralEntropy) {
    const SymEig eig = sym_eig(z);
    check_overflow(eig.eigenvalues);
    return lift_sym(eig, [](double l) { return std::exp(l); });
  }
  const double beta = map.beta();
  const auto f = [beta](double s) { return beta * std::sinh(s); };
  if (map.symmetric()) {
    const SymEig eig = sym_eig(z);
    check_overflow(eig.eigenvalues);
    return lift_sym(eig, f);
  }
  const Svd dec = svd(z);
  check_overflow(dec.singulars);
  return lift_rect(dec, f);
}

double bregman(const MirrorMapSpec& map, const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw Error(ErrorKind::ShapeMismatch, "bregman arguments differ in shape");
  }
  const Matrix gy = grad(map, y);
  return value(map, x) - value(map, y) - (gy.array() * (x - y).array()).sum();
}

double hypentropy_potential(const Matrix& x, double beta) {
  if (!(beta > 0.0)) throw Error(ErrorKind::InvalidArgument, "beta must be positive");
  const Vector s = singular_values(x);
  const double log_inv_beta = std::log(1.0 / beta);
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double root = std::sqrt(s[i] * s[i] + beta * beta);
    const double log_term = s[i] > 0.0 ? s[i] * std::log(s[i] + root) : 0.0;
    total += s[i] * log_inv_beta + log_term - root;
  }
  return total;
}

double entropy_potential(const Matrix& x, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha must be positive");
  const Vector lambda = psd_eigenvalues(x);
  const double coeff = std::log(1.0 / alpha) - 1.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) total += coeff * lambda[i] + xlogx(lambda[i]);
  return total;
}

}  // namespace mdsense
