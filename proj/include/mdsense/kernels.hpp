#pragma once

// Data-parallel measurement kernels over a stacked ensemble.
//
// The ensemble is stored as an m x (n*n') column-major matrix M whose row i
// is vec(A_i). The forward map computes y = M vec(X); the adjoint computes
// g = M^T w. Both parallel kernels partition the OUTPUT index range, so each
// output entry is accumulated by one thread in a fixed order and the result
// is bitwise identical to the serial reference for any thread count.

#include <atomic>
#include <cstdint>
#include <span>

#include <Eigen/Dense>

namespace mdsense::kernels {

void measure_serial(const Eigen::MatrixXd& stacked, std::span<const double> x, std::span<double> y);
void measure_parallel(const Eigen::MatrixXd& stacked, std::span<const double> x, std::span<double> y);

void adjoint_serial(const Eigen::MatrixXd& stacked, std::span<const double> w, std::span<double> out);
void adjoint_parallel(const Eigen::MatrixXd& stacked, std::span<const double> w, std::span<double> out);

/// Number of threads the parallel kernels may use (respects MDSENSE_THREADS
/// once configure_threads_from_env() has been called).
int max_threads();
/// Reads MDSENSE_THREADS and caps OpenMP parallelism accordingly.
void configure_threads_from_env();

/// Instrumentation: how often each evaluation path ran.
struct PathCounters {
  std::atomic<std::uint64_t> dense{0};
  std::atomic<std::uint64_t> sparse{0};

  void reset() {
    dense = 0;
    sparse = 0;
  }
};

PathCounters& path_counters();

}  // namespace mdsense::kernels
