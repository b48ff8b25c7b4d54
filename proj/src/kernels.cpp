#include "mdsense/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mdsense::kernels {

namespace {

// Below this many multiply-adds the fork/join cost dominates.
constexpr Eigen::Index kParallelWork = 1 << 15;

bool worth_parallel(const Eigen::MatrixXd& stacked) {
  return stacked.size() >= kParallelWork && max_threads() > 1;
}

}  // namespace

void measure_serial(const Eigen::MatrixXd& stacked, std::span<const double> x, std::span<double> y) {
  const Eigen::Index m = stacked.rows();
  const Eigen::Index len = stacked.cols();
  const double* data = stacked.data();
  for (Eigen::Index i = 0; i < m; ++i) y[i] = 0.0;
  for (Eigen::Index j = 0; j < len; ++j) {
    const double xj = x[j];
    const double* col = data + j * m;
    for (Eigen::Index i = 0; i < m; ++i) y[i] += col[i] * xj;
  }
}

void measure_parallel(const Eigen::MatrixXd& stacked, std::span<const double> x, std::span<double> y) {
  if (!worth_parallel(stacked)) {
    measure_serial(stacked, x, y);
    return;
  }
  const Eigen::Index m = stacked.rows();
  const Eigen::Index len = stacked.cols();
  const double* data = stacked.data();
  constexpr Eigen::Index kBlock = 64;
  const Eigen::Index blocks = (m + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(static)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index lo = b * kBlock;
    const Eigen::Index hi = std::min(m, lo + kBlock);
    for (Eigen::Index i = lo; i < hi; ++i) y[i] = 0.0;
    for (Eigen::Index j = 0; j < len; ++j) {
      const double xj = x[j];
      const double* col = data + j * m;
      for (Eigen::Index i = lo; i < hi; ++i) y[i] += col[i] * xj;
    }
  }
}

void adjoint_serial(const Eigen::MatrixXd& stacked, std::span<const double> w, std::span<double> out) {
  const Eigen::Index m = stacked.rows();
  const Eigen::Index len = stacked.cols();
  const double* data = stacked.data();
  for (Eigen::Index j = 0; j < len; ++j) {
    const double* col = data + j * m;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) acc += col[i] * w[i];
    out[j] = acc;
  }
}

void adjoint_parallel(const Eigen::MatrixXd& stacked, std::span<const double> w, std::span<double> out) {
  if (!worth_parallel(stacked)) {
    adjoint_serial(stacked, w, out);
    return;
  }
  const Eigen::Index m = stacked.rows();
  const Eigen::Index len = stacked.cols();
  const double* data = stacked.data();
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < len; ++j) {
    const double* col = data + j * m;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) acc += col[i] * w[i];
    out[j] = acc;
  }
}

int max_threads() {
#ifdef _OPENMP
  if (omp_in_parallel()) return 1;
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void configure_threads_from_env() {
#ifdef _OPENMP
  if (const char* env = std::getenv("MDSENSE_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) omp_set_num_threads(cap);
    } catch (const std::exception&) {
      // Malformed values leave the OpenMP default in place.
    }
  }
#endif
}

PathCounters& path_counters() {
  static PathCounters counters;
  return counters;
}

}  // namespace mdsense::kernels
