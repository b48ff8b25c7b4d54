#include "mdsense/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mdsense/error.hpp"

namespace mdsense {

double frobenius(const Matrix& x) { return x.norm(); }

bool all_finite(const Matrix& x) { return x.allFinite(); }

Matrix symmetrized(const Matrix& s) {
  if (s.rows() != s.cols()) {
    std::ostringstream msg;
    msg << "expected a square matrix, got " << s.rows() << "x" << s.cols();
    throw Error(ErrorKind::NonSquare, msg.str());
  }
  const double asym = (s - s.transpose()).norm();
  const double scale = std::max(1.0, s.norm());
  if (!(asym <= kSymmetryTolerance * scale)) {
    std::ostringstream msg;
    msg << "asymmetry " << asym << " exceeds tolerance " << kSymmetryTolerance * scale;
    throw Error(ErrorKind::AsymmetricInput, msg.str());
  }
  return 0.5 * (s + s.transpose());
}

SymEig sym_eig(const Matrix& s) {
  const Matrix sym = symmetrized(s);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalFailure, "symmetric eigensolver did not converge");
  }
  // Eigen returns ascending order.
  return {solver.eigenvalues().reverse(), solver.eigenvectors().rowwise().reverse()};
}

Vector sym_eigenvalues(const Matrix& s) {
  const Matrix sym = symmetrized(s);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalFailure, "symmetric eigensolver did not converge");
  }
  return solver.eigenvalues().reverse();
}

Svd svd(const Matrix& x) {
  if (!x.allFinite()) throw Error(ErrorKind::DomainError, "svd of a non-finite matrix");
  Eigen::BDCSVD<Matrix> dec(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalFailure, "SVD did not converge");
  }
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

Vector singular_values(const Matrix& x) {
  if (!x.allFinite()) throw Error(ErrorKind::DomainError, "svd of a non-finite matrix");
  Eigen::BDCSVD<Matrix> dec(x);
  if (dec.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalFailure, "SVD did not converge");
  }
  return dec.singularValues();
}

namespace {

Vector apply(const Vector& spectrum, const ScalarFn& f) {
  Vector out(spectrum.size());
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    out[i] = f(spectrum[i]);
    if (!std::isfinite(out[i])) {
      std::ostringstream msg;
      msg << "function undefined or non-finite at spectral value " << spectrum[i];
      throw Error(ErrorKind::DomainError, msg.str());
    }
  }
  return out;
}

}  // namespace

Matrix lift_sym(const SymEig& eig, const ScalarFn& f) {
  const Vector fx = apply(eig.eigenvalues, f);
  const Matrix& q = eig.eigenvectors;
  Matrix out = q * fx.asDiagonal() * q.transpose();
  return 0.5 * (out + out.transpose());
}

Matrix lift_sym(const Matrix& s, const ScalarFn& f) { return lift_sym(sym_eig(s), f); }

Matrix lift_rect(const Svd& dec, const ScalarFn& f) {
  const Vector fx = apply(dec.singulars, f);
  return dec.left * fx.asDiagonal() * dec.right.transpose();
}

Matrix lift_rect(const Matrix& x, const ScalarFn& f) { return lift_rect(svd(x), f); }

}  // namespace mdsense
