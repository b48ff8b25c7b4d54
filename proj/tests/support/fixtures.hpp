#pragma once

#include <Eigen/Dense>
#include <random>

namespace fixture {

using Mat = Eigen::MatrixXd;

inline Mat gaussian(std::mt19937_64& g, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> nd;
  Mat x(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) x(i, j) = nd(g);
  return x;
}

inline Mat symmetric(std::mt19937_64& g, Eigen::Index n) {
  const Mat b = gaussian(g, n, n);
  return 0.5 * (b + b.transpose());
}

inline Mat orthogonal(std::mt19937_64& g, Eigen::Index n) {
  Eigen::HouseholderQR<Mat> qr(gaussian(g, n, n));
  return qr.householderQ() * Mat::Identity(n, n);
}

/// Q diag(lambda) Q^T with eigenvalues log-uniform in [lo, hi].
inline Mat pd_with_spectrum(std::mt19937_64& g, Eigen::Index n, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  Eigen::VectorXd lam(n);
  for (Eigen::Index i = 0; i < n; ++i) lam(i) = std::exp(u(g));
  const Mat q = orthogonal(g, n);
  const Mat s = q * lam.asDiagonal() * q.transpose();
  return 0.5 * (s + s.transpose());
}

}  // namespace fixture
