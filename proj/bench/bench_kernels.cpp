// Serial vs OpenMP measurement kernels, plus one full mirror-descent step.
//
//   ./mdsense_bench --benchmark_filter=Measure
//   MDSENSE_THREADS=2 ./mdsense_bench

#include <benchmark/benchmark.h>

#include <vector>

#include "mdsense/kernels.hpp"
#include "mdsense/optimizers.hpp"
#include "mdsense/rng.hpp"
#include "mdsense/sensing.hpp"

namespace {

struct Data {
  Eigen::MatrixXd stacked;
  std::vector<double> x, w, out_m, out_d;
};

Data make(int m, int n) {
  const int d = n * n;
  mdsense::RandomStream rs(1, "bench");
  Data data;
  data.stacked.resize(m, d);
  for (Eigen::Index j = 0; j < data.stacked.size(); ++j) data.stacked.data()[j] = rs.normal();
  data.x.resize(d);
  data.w.resize(m);
  for (double& v : data.x) v = rs.normal();
  for (double& v : data.w) v = rs.normal();
  data.out_m.resize(m);
  data.out_d.resize(d);
  return data;
}

void threads_from_env() { mdsense::kernels::configure_threads_from_env(); }

void BM_MeasureSerial(benchmark::State& state) {
  Data d = make(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    mdsense::kernels::measure_serial(d.stacked, d.x, d.out_m);
    benchmark::DoNotOptimize(d.out_m.data());
  }
  state.SetBytesProcessed(state.iterations() * d.stacked.size() * sizeof(double));
}

void BM_MeasureParallel(benchmark::State& state) {
  threads_from_env();
  Data d = make(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    mdsense::kernels::measure_parallel(d.stacked, d.x, d.out_m);
    benchmark::DoNotOptimize(d.out_m.data());
  }
  state.SetBytesProcessed(state.iterations() * d.stacked.size() * sizeof(double));
  state.counters["threads"] = mdsense::kernels::max_threads();
}

void BM_AdjointSerial(benchmark::State& state) {
  Data d = make(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    mdsense::kernels::adjoint_serial(d.stacked, d.w, d.out_d);
    benchmark::DoNotOptimize(d.out_d.data());
  }
  state.SetBytesProcessed(state.iterations() * d.stacked.size() * sizeof(double));
}

void BM_AdjointParallel(benchmark::State& state) {
  threads_from_env();
  Data d = make(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    mdsense::kernels::adjoint_parallel(d.stacked, d.w, d.out_d);
    benchmark::DoNotOptimize(d.out_d.data());
  }
  state.SetBytesProcessed(state.iterations() * d.stacked.size() * sizeof(double));
  state.counters["threads"] = mdsense::kernels::max_threads();
}

void BM_EntropyStep(benchmark::State& state) {
  threads_from_env();
  const int n = static_cast<int>(state.range(0));
  const auto truth = mdsense::gen_lowrank_psd(n, 5, 3);
  const auto ens = mdsense::gen_gaussian_sym(n, 15 * n, 4);
  const auto obs = mdsense::measure(ens, truth.matrix);
  mdsense::RunConfig rc;
  rc.algorithm = mdsense::Algorithm::MirrorDescent;
  rc.map = mdsense::MirrorMapSpec::entropy();
  rc.step = 1.0;
  rc.max_iters = 10;
  rc.risk_tol = 0.0;
  for (auto _ : state) {
    auto traj = mdsense::mirror_descent(*rc.map, ens, obs, 1e-3 * mdsense::Matrix::Identity(n, n), rc, {});
    benchmark::DoNotOptimize(traj.final_iterate.data());
  }
  state.SetItemsProcessed(state.iterations() * rc.max_iters);
}

}  // namespace

BENCHMARK(BM_MeasureSerial)->Args({750, 50})->Args({250, 50})->Args({2000, 30});
BENCHMARK(BM_MeasureParallel)->Args({750, 50})->Args({250, 50})->Args({2000, 30});
BENCHMARK(BM_AdjointSerial)->Args({750, 50})->Args({250, 50})->Args({2000, 30});
BENCHMARK(BM_AdjointParallel)->Args({750, 50})->Args({250, 50})->Args({2000, 30});
BENCHMARK(BM_EntropyStep)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
