#pragma once

// Dense spectral calculus: symmetric eigendecomposition, SVD, and lifting of
// scalar functions to matrices through their spectra.

#include <Eigen/Dense>
#include <functional>

namespace mdsense {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ScalarFn = std::function<double(double)>;

struct SymEig {
  Vector eigenvalues;  // descending
  Matrix eigenvectors;  // columns, orthogonal
};

struct Svd {
  Matrix left;     // n x k
  Vector singulars;  // k = min(rows, cols), nonincreasing
  Matrix right;    // n' x k
};

/// Relative asymmetry tolerance accepted by the symmetric routines.
inline constexpr double kSymmetryTolerance = 1e-8;

double frobenius(const Matrix& x);
bool all_finite(const Matrix& x);

/// Throws NonSquare / AsymmetricInput; returns (S + S^T) / 2.
Matrix symmetrized(const Matrix& s);

SymEig sym_eig(const Matrix& s);
/// Eigenvalues only (descending); cheaper than the full factorization.
Vector sym_eigenvalues(const Matrix& s);

Svd svd(const Matrix& x);
Vector singular_values(const Matrix& x);

/// Q diag(f(lambda)) Q^T, re-symmetrized. Throws DomainError if f yields a
/// non-finite value at some eigenvalue.
Matrix lift_sym(const Matrix& s, const ScalarFn& f);
Matrix lift_sym(const SymEig& eig, const ScalarFn& f);

/// U diag(f(sigma)) V^T for f with f(0) = 0.
Matrix lift_rect(const Matrix& x, const ScalarFn& f);
Matrix lift_rect(const Svd& dec, const ScalarFn& f);

}  // namespace mdsense
