#include <gtest/gtest.h>

#include <cmath>

#include "assertions.hpp"
#include "fixtures.hpp"
#include "mdsense/metrics.hpp"
#include "mdsense/optimizers.hpp"
#include "oracles.hpp"

using namespace mdsense;

namespace {

struct Instance {
  SensingEnsemble ens;
  Observations obs;
  Matrix truth;
};

// Diagonal sensing matrices commute with each other and with every diagonal
// iterate.
Instance diagonal_instance(int n, int m, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::vector<Matrix> as;
  for (int i = 0; i < m; ++i) as.push_back(fixture::gaussian(g, n, 1).asDiagonal());
  Vector d = fixture::gaussian(g, n, 1).cwiseAbs();
  d /= d.sum();
  Matrix truth = d.asDiagonal();
  SensingEnsemble ens = SensingEnsemble::dense(std::move(as));
  Observations obs = measure(ens, truth);
  return {std::move(ens), std::move(obs), std::move(truth)};
}

Instance gaussian_sym_instance(int n, int r, int m, std::uint64_t seed) {
  const GroundTruth t = gen_lowrank_psd(n, r, seed);
  SensingEnsemble ens = gen_gaussian_sym(n, m, seed + 1);
  Observations obs = measure(ens, t.matrix);
  return {std::move(ens), std::move(obs), t.matrix};
}

RunConfig fixed(double step, int iters, int snapshot_every = 0) {
  RunConfig cfg;
  cfg.step = step;
  cfg.max_iters = iters;
  cfg.risk_tol = 0.0;
  cfg.snapshot_every = snapshot_every;
  return cfg;
}

Matrix iterate(const Trajectory& t, int k) { return t.snapshots.at(static_cast<std::size_t>(k)).x; }

// Duplicated sensing matrix with residuals (+1, -1) at x0: positive risk but
// a vanishing gradient.
struct Stationary {
  SensingEnsemble ens;
  Observations obs;
};

Stationary stationary_at(const Matrix& x0, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  const Matrix a = fixture::symmetric(g, x0.rows());
  SensingEnsemble ens = SensingEnsemble::dense({a, a});
  Vector y = measure(ens, x0).y;
  y(0) -= 1.0;
  y(1) += 1.0;
  return {std::move(ens), Observations{y}};
}

}  // namespace

TEST(MirrorDescent, StationaryWhenGradientVanishes) {
  const Matrix x0 = 0.3 * Matrix::Identity(4, 4);
  const Stationary st = stationary_at(x0, 1);
  ASSERT_EQ(risk_grad(st.ens, st.obs, x0).norm(), 0.0);
  const Trajectory t = mirror_descent(MirrorMapSpec::entropy(), st.ens, st.obs, x0, fixed(0.5, 20, 1));
  EXPECT_EQ(t.iters_run, 20);
  for (const Snapshot& s : t.snapshots) EXPECT_LE((s.x - x0).norm(), 1e-14);
  EXPECT_EQ(t.records.size(), static_cast<std::size_t>(t.iters_run + 1));
}

TEST(MirrorDescent, ZeroOperatorNeverMoves) {
  const SensingEnsemble ens = SensingEnsemble::dense({Matrix::Zero(3, 3), Matrix::Zero(3, 3)});
  const Observations obs{Vector::Zero(2)};
  RunConfig cfg = fixed(1.0, 15, 1);
  const Matrix x0 = 0.1 * Matrix::Identity(3, 3);
  const Trajectory t = mirror_descent(MirrorMapSpec::hypentropy(0.1), ens, obs, x0, cfg);
  // zero risk meets any tolerance before the first step
  EXPECT_TRUE(t.converged);
  EXPECT_EQ(t.iters_run, 0);
  for (const Snapshot& s : t.snapshots) EXPECT_LE((s.x - x0).norm(), 1e-15);
}

TEST(MirrorDescent, ScalarEntropyConvergesToUniqueSolution) {
  const double a = 2.0, xstar = 0.7, alpha = 1e-3;
  Matrix am(1, 1);
  am << a;
  const SensingEnsemble ens = SensingEnsemble::dense({am});
  const Observations obs{Vector::Constant(1, a * xstar)};
  RunConfig cfg;
  cfg.step = 0.1;
  cfg.max_iters = 100000;
  cfg.risk_tol = 1e-24;
  const Trajectory t = mirror_descent(MirrorMapSpec::entropy(), ens, obs, alpha * Matrix::Identity(1, 1), cfg);
  EXPECT_TRUE(t.converged);
  EXPECT_NEAR(t.final_iterate(0, 0), xstar, 1e-11);
}

TEST(MirrorDescent, DiagonalInstanceMatchesPotentialOracle) {
  Matrix a1 = Matrix::Zero(2, 2);
  a1(0, 0) = 1.0;
  a1(1, 1) = 2.0;
  const SensingEnsemble ens = SensingEnsemble::dense({a1});
  const Observations obs{Vector::Constant(1, 1.0)};
  const double alpha = 1e-2;
  RunConfig cfg;
  cfg.step = 0.5;
  cfg.max_iters = 200000;
  cfg.risk_tol = 1e-26;
  const Trajectory t = mirror_descent(MirrorMapSpec::entropy(), ens, obs, alpha * Matrix::Identity(2, 2), cfg);
  ASSERT_TRUE(t.converged);
  Matrix feasible = Matrix::Zero(2, 2);
  feasible(0, 0) = 1.0 / 3.0;
  feasible(1, 1) = 1.0 / 3.0;
  const oracle::Minimized best = oracle::min_entropy_on_affine({a1}, obs.y, alpha, feasible, 10, 3);
  ASSERT_GT(best.restarts_ok, 0);
  const double got = entropy_potential(t.final_iterate, alpha);
  EXPECT_LE(std::abs(got - best.value), 1e-3 * std::abs(best.value));
}

TEST(MirrorDescent, SymmetricIteratesStaySymmetric) {
  const Instance in = gaussian_sym_instance(6, 2, 10, 3);
  const Trajectory t = mirror_descent(MirrorMapSpec::hypentropy(1e-3, MapDomain::Symmetric), in.ens, in.obs,
                                      Matrix::Zero(6, 6), fixed(0.1, 50, 5));
  for (const Snapshot& s : t.snapshots) EXPECT_EQ((s.x - s.x.transpose()).norm(), 0.0);
}

TEST(MirrorDescent, RecordsAndReconError) {
  const Instance in = gaussian_sym_instance(5, 1, 12, 4);
  RunContext ctx{&in.truth};
  const Trajectory t =
      mirror_descent(MirrorMapSpec::entropy(), in.ens, in.obs, 1e-3 * Matrix::Identity(5, 5), fixed(0.2, 30), ctx);
  ASSERT_EQ(t.records.size(), 31u);
  for (std::size_t i = 0; i < t.records.size(); ++i) {
    EXPECT_EQ(t.records[i].iter, static_cast<int>(i));
    ASSERT_TRUE(t.records[i].recon_error.has_value());
    EXPECT_TRUE(std::isfinite(t.records[i].risk));
  }
  EXPECT_NEAR(*t.records.back().recon_error, recon_error(t.final_iterate, in.truth), 1e-14);
  EXPECT_NEAR(t.records.back().nuclear_norm, nuclear_norm(t.final_iterate), 1e-12);
  EXPECT_NEAR(t.records.back().effective_rank, effective_rank(t.final_iterate), 1e-10);
  EXPECT_FALSE(t.converged);
}

TEST(MirrorDescent, OversizedStepOverflows) {
  const Instance in = gaussian_sym_instance(4, 1, 6, 5);
  try {
    mirror_descent(MirrorMapSpec::hypentropy(1e-3), in.ens, in.obs, Matrix::Zero(4, 4), fixed(1e5, 50));
    FAIL() << "expected RunFailure";
  } catch (const RunFailure& f) {
    EXPECT_EQ(f.kind(), ErrorKind::Overflow);
    EXPECT_GE(f.partial().records.size(), 1u);
    EXPECT_TRUE(f.partial().final_iterate.allFinite());
  }
}

TEST(MirrorDescent, Errors) {
  const SensingEnsemble rect = gen_gaussian_rect(3, 4, 5, 1);
  const Observations obs{Vector::Zero(5)};
  EXPECT_ERROR_KIND(mirror_descent(MirrorMapSpec::hypentropy(1.0), rect, obs, Matrix::Zero(4, 3), fixed(1, 1)),
                    ShapeMismatch);
  EXPECT_ERROR_KIND(mirror_descent(MirrorMapSpec::hypentropy(1.0), rect, obs, Matrix::Zero(3, 4), fixed(-1, 1)),
                    InvalidArgument);
  EXPECT_ERROR_KIND(mirror_descent(MirrorMapSpec::hypentropy(1.0), rect, obs, Matrix::Zero(3, 4), fixed(1, 0)),
                    InvalidArgument);
  const SensingEnsemble rect_sq = gen_gaussian_rect(3, 3, 5, 1);
  EXPECT_ERROR_KIND(mirror_descent(MirrorMapSpec::entropy(), rect_sq, obs, Matrix::Identity(3, 3), fixed(1, 1)),
                    AsymmetricInput);
  const SensingEnsemble sym = gen_gaussian_sym(3, 5, 1);
  EXPECT_ERROR_KIND(mirror_descent(MirrorMapSpec::entropy(), sym, obs, Matrix::Zero(3, 3), fixed(1, 1)), NotPD);
}

TEST(ExpGradient, ZeroVStaysZero) {
  const Instance in = gaussian_sym_instance(5, 2, 8, 6);
  const Trajectory t = exp_gradient(in.ens, in.obs, 0.1 * Matrix::Identity(5, 5), Matrix::Zero(5, 5), fixed(0.3, 40, 1));
  for (const Snapshot& s : t.snapshots) EXPECT_EQ(s.v.norm(), 0.0);
}

TEST(ExpGradient, StationaryWhenGradientVanishes) {
  const Matrix u0 = 0.2 * Matrix::Identity(4, 4), v0 = 0.05 * Matrix::Identity(4, 4);
  const Stationary st = stationary_at(u0 - v0, 7);
  const Trajectory t = exp_gradient(st.ens, st.obs, u0, v0, fixed(0.3, 10, 1));
  EXPECT_EQ(t.iters_run, 10);
  for (const Snapshot& s : t.snapshots) {
    EXPECT_LE((s.u - u0).norm(), 1e-14);
    EXPECT_LE((s.v - v0).norm(), 1e-14);
  }
}

TEST(ExpGradient, CommutingEquivalenceWithHypentropyMirrorDescent) {
  const Instance in = diagonal_instance(6, 4, 8);
  const double beta = 1e-2, eta = 0.5;
  const Trajectory md = mirror_descent(MirrorMapSpec::hypentropy(beta, MapDomain::Symmetric), in.ens, in.obs,
                                       Matrix::Zero(6, 6), fixed(eta, 100, 1));
  const Matrix half = 0.5 * beta * Matrix::Identity(6, 6);
  const Trajectory eg = exp_gradient(in.ens, in.obs, half, half, fixed(eta, 100, 1));
  ASSERT_EQ(md.snapshots.size(), eg.snapshots.size());
  for (int k = 0; k <= 100; ++k) {
    EXPECT_LE((iterate(md, k) - iterate(eg, k)).norm(), 1e-10) << "iteration " << k;
    const Snapshot& s = eg.snapshots[static_cast<std::size_t>(k)];
    EXPECT_LE((s.u * s.v - 0.25 * beta * beta * Matrix::Identity(6, 6)).norm(), 1e-9);
  }
}

TEST(ExpGradient, CommutingEquivalenceWithEntropyMirrorDescent) {
  const Instance in = diagonal_instance(6, 4, 9);
  const double alpha = 1e-2, eta = 0.5;
  const Matrix x0 = alpha * Matrix::Identity(6, 6);
  const Trajectory md = mirror_descent(MirrorMapSpec::entropy(), in.ens, in.obs, x0, fixed(eta, 100, 1));
  const Trajectory eg = exp_gradient(in.ens, in.obs, x0, Matrix::Zero(6, 6), fixed(eta, 100, 1));
  for (int k = 0; k <= 100; ++k) EXPECT_LE((iterate(md, k) - iterate(eg, k)).norm(), 1e-10) << "iteration " << k;
}

TEST(ExpGradient, NeedsSymmetricEnsemble) {
  const SensingEnsemble ens = gen_gaussian_rect(3, 3, 4, 1);
  EXPECT_ERROR_KIND(exp_gradient(ens, Observations{Vector::Zero(4)}, Matrix::Identity(3, 3), Matrix::Zero(3, 3),
                                 fixed(1, 1)),
                    AsymmetricInput);
  const SensingEnsemble rect = gen_gaussian_rect(3, 4, 4, 1);
  EXPECT_ERROR_KIND(exp_gradient(rect, Observations{Vector::Zero(4)}, Matrix::Identity(3, 3), Matrix::Zero(3, 3),
                                 fixed(1, 1)),
                    NonSquare);
}

namespace {

// One-step gap between factored GD at step eta/4 and exponentiated gradient
// at step eta, from matching initial points.
double one_step_gap_sym(const Instance& in, double u0, double v0, double eta) {
  const Matrix eye = Matrix::Identity(6, 6);
  const Trajectory eg = exp_gradient(in.ens, in.obs, u0 * eye, v0 * eye, fixed(eta, 1));
  const Trajectory gd =
      gd_factored_sym(in.ens, in.obs, std::sqrt(u0) * eye, std::sqrt(v0) * eye, fixed(eta / 4, 1));
  return (eg.final_iterate - gd.final_iterate).norm();
}

double one_step_gap_psd(const Instance& in, double alpha, double eta) {
  const Trajectory eg =
      exp_gradient(in.ens, in.obs, alpha * Matrix::Identity(6, 6), Matrix::Zero(6, 6), fixed(eta, 1));
  const Trajectory gd = gd_factored_psd(in.ens, in.obs, std::sqrt(alpha) * Matrix::Identity(6, 6), fixed(eta / 4, 1));
  return (eg.final_iterate - gd.final_iterate).norm();
}

}  // namespace

TEST(GdFactored, SymFirstOrderMatchToExpGradient) {
  const Instance in = diagonal_instance(6, 4, 10);
  // U0 V0 = beta^2 / 4 with beta = 0.2, X0 = 0.15 I
  const double g1 = one_step_gap_sym(in, 0.2, 0.05, 1e-2);
  const double g2 = one_step_gap_sym(in, 0.2, 0.05, 5e-3);
  const double g3 = one_step_gap_sym(in, 0.2, 0.05, 2.5e-3);
  EXPECT_GE(g1 / g2, 3.5);
  EXPECT_LE(g1 / g2, 4.5);
  EXPECT_GE(g2 / g3, 3.5);
  EXPECT_LE(g2 / g3, 4.5);
}

TEST(GdFactored, SymMismatchIsThirdOrderFromZero) {
  // From U0 = V0 the second-order terms of both updates are proportional to
  // X0 = 0, so halving the step divides the gap by 8.
  const Instance in = diagonal_instance(6, 4, 10);
  const double g1 = one_step_gap_sym(in, 0.05, 0.05, 1e-2);
  const double g2 = one_step_gap_sym(in, 0.05, 0.05, 5e-3);
  EXPECT_NEAR(g1 / g2, 8.0, 0.1);
}

TEST(GdFactored, PsdFirstOrderMatchToExpGradient) {
  const Instance in = diagonal_instance(6, 4, 11);
  const double g1 = one_step_gap_psd(in, 0.1, 1e-2);
  const double g2 = one_step_gap_psd(in, 0.1, 5e-3);
  const double g3 = one_step_gap_psd(in, 0.1, 2.5e-3);
  EXPECT_GE(g1 / g2, 3.5);
  EXPECT_LE(g1 / g2, 4.5);
  EXPECT_GE(g2 / g3, 3.5);
  EXPECT_LE(g2 / g3, 4.5);
}

TEST(GdFactored, PsdStationaryWhenGradientVanishes) {
  const Matrix u0 = 0.3 * Matrix::Identity(4, 4);
  const Stationary st = stationary_at(u0 * u0.transpose(), 12);
  const Trajectory t = gd_factored_psd(st.ens, st.obs, u0, fixed(0.25, 10, 1));
  EXPECT_EQ(t.iters_run, 10);
  for (const Snapshot& s : t.snapshots) EXPECT_LE((s.u - u0).norm(), 1e-15);
}

TEST(GdFactored, SymFirstStepLeavesZero) {
  const Instance in = gaussian_sym_instance(4, 2, 6, 13);
  const Matrix u0 = 0.1 * Matrix::Identity(4, 4);
  const Trajectory t = gd_factored_sym(in.ens, in.obs, u0, u0, fixed(0.05, 1, 1));
  EXPECT_EQ(iterate(t, 0).norm(), 0.0);
  EXPECT_GT(iterate(t, 1).norm(), 0.0);
  // Along the negative gradient: <X_1, grad f(0)> < 0.
  EXPECT_LT(inner(iterate(t, 1), risk_grad(in.ens, in.obs, Matrix::Zero(4, 4))), 0.0);
}

TEST(GdFactored, SymZeroObservationsStayAtZero) {
  const Instance in = gaussian_sym_instance(4, 2, 6, 14);
  const Observations zero{Vector::Zero(6)};
  const Matrix u0 = 1e-3 * Matrix::Identity(4, 4);
  const Trajectory t = gd_factored_sym(in.ens, zero, u0, u0, fixed(0.1, 25, 1));
  // risk is already zero at X0 = 0
  EXPECT_TRUE(t.converged);
  EXPECT_EQ(t.iters_run, 0);
  EXPECT_EQ(t.final_iterate.norm(), 0.0);
  RunConfig forced = fixed(0.1, 25, 1);
  const Stationary st{SensingEnsemble::dense({Matrix::Zero(4, 4)}), Observations{Vector::Ones(1)}};
  const Trajectory f = gd_factored_sym(st.ens, st.obs, u0, u0, forced);
  for (const Snapshot& s : f.snapshots) EXPECT_EQ(s.x.norm(), 0.0);
}

TEST(GdFactored, DivergenceGuard) {
  const Instance in = gaussian_sym_instance(5, 2, 10, 15);
  try {
    gd_factored_psd(in.ens, in.obs, Matrix::Identity(5, 5), fixed(50.0, 200));
    FAIL() << "expected RunFailure";
  } catch (const RunFailure& f) {
    EXPECT_EQ(f.kind(), ErrorKind::Divergence);
    EXPECT_FALSE(f.partial().converged);
    EXPECT_GE(f.partial().records.size(), 2u);
  }
}

TEST(GdFactored, PsdRecoversAtSmallInitialization) {
  const Instance in = gaussian_sym_instance(8, 1, 40, 16);
  RunConfig cfg;
  cfg.step = 0.25;
  cfg.max_iters = 20000;
  const Trajectory t = gd_factored_psd(in.ens, in.obs, 1e-3 * Matrix::Identity(8, 8), cfg);
  EXPECT_LE(t.records.back().risk, 1e-6);
  EXPECT_LE(recon_error(t.final_iterate, in.truth), 1e-3);
}

TEST(SafeStepBound, VacuousRiskCondition) {
  const Instance in = gaussian_sym_instance(4, 1, 6, 17);
  const MirrorMapSpec map = MirrorMapSpec::hypentropy(0.1);
  const StepBound b = safe_step_bound(in.ens, in.obs, in.truth, map);
  EXPECT_TRUE(b.risk_bound_unbounded);
  EXPECT_TRUE(std::isinf(b.risk_bound));
  EXPECT_EQ(b.value, b.norm_bound);
  const double l = mean_squared_spectral_norm(in.ens);
  EXPECT_NEAR(b.norm_bound, 0.25 / (l * (nuclear_norm(in.truth) + 0.1 * 4)), 1e-15);
}

TEST(SafeStepBound, HandEvaluation) {
  const SensingEnsemble ens = SensingEnsemble::dense({Matrix::Identity(1, 1)});
  const Observations obs{Vector::Zero(1)};
  const StepBound b = safe_step_bound(ens, obs, Matrix::Identity(1, 1), MirrorMapSpec::hypentropy(1.0));
  EXPECT_NEAR(b.risk_bound, 0.125, 1e-15);
  EXPECT_NEAR(b.norm_bound, 0.125, 1e-15);
  EXPECT_NEAR(b.value, 0.125, 1e-15);
  const StepBound e = safe_step_bound(ens, obs, Matrix::Identity(1, 1), MirrorMapSpec::entropy());
  EXPECT_NEAR(e.norm_bound, 0.25, 1e-15);
  EXPECT_NEAR(e.value, 0.125, 1e-15);
}

TEST(Properties, RiskMonotoneUnderSafeStep) {
  const Instance in = gaussian_sym_instance(5, 1, 8, 18);
  const MirrorMapSpec map = MirrorMapSpec::hypentropy(1e-2, MapDomain::Symmetric);
  const double l = mean_squared_spectral_norm(in.ens);
  // radius 2||X*||_* bounds every iterate's nuclear norm for this run, checked below
  const double eta = std::min(safe_step_bound(in.ens, in.obs, Matrix::Zero(5, 5), map).value,
                              safe_step_bound(l, 0.0, 2.0 * nuclear_norm(in.truth), map, 5).value);
  const Trajectory t = mirror_descent(map, in.ens, in.obs, Matrix::Zero(5, 5), fixed(eta, 400, 1));
  for (std::size_t k = 0; k + 1 < t.records.size(); ++k) {
    EXPECT_LE(eta, safe_step_bound(in.ens, in.obs, t.snapshots[k].x, map).value);
    EXPECT_LE(t.records[k + 1].risk, t.records[k].risk + 1e-12);
  }
}

TEST(Properties, BregmanEvolutionAndReferenceIndependence) {
  std::mt19937_64 g(19);
  const GroundTruth truth = gen_lowrank_rect(4, 5, 1, 19);
  const SensingEnsemble ens = gen_gaussian_rect(4, 5, 8, 20);
  const Observations obs = measure(ens, truth.matrix);
  const double eta = 0.1;
  const MirrorMapSpec map = MirrorMapSpec::hypentropy(1e-2);
  const Trajectory t = mirror_descent(map, ens, obs, Matrix::Zero(4, 5), fixed(eta, 200, 1));
  // A second zero-risk reference: move X* along the null space of the operator.
  Matrix basis_coeffs = ens.stacked();
  Eigen::FullPivLU<Matrix> lu(basis_coeffs);
  const Matrix null = lu.kernel();
  ASSERT_GT(null.cols(), 0);
  Matrix dir = Eigen::Map<const Matrix>(null.col(0).data(), 4, 5);
  dir /= dir.norm();
  const Matrix other = truth.matrix + 0.5 * dir;
  ASSERT_LE(risk(ens, obs, other), 1e-28);
  for (int k = 0; k < 200; ++k) {
    const Matrix& xt = t.snapshots[k].x;
    const Matrix& xn = t.snapshots[k + 1].x;
    const double d_next = bregman(map, truth.matrix, xn);
    const double d_now = bregman(map, truth.matrix, xt);
    const double lin = -eta * inner(risk_grad(ens, obs, xt), xt - truth.matrix);
    const double step = bregman(map, xt, xn);
    const double scale = std::abs(d_next) + std::abs(d_now) + std::abs(lin) + std::abs(step);
    EXPECT_LE(std::abs(d_next - d_now - lin - step), 1e-8 * scale) << "iteration " << k;
    const double dec1 = d_now - d_next;
    const double dec2 = bregman(map, other, xt) - bregman(map, other, xn);
    const double scale2 = d_now + d_next + bregman(map, other, xt) + bregman(map, other, xn);
    EXPECT_LE(std::abs(dec1 - dec2), 1e-8 * scale2) << "iteration " << k;
  }
}

TEST(Properties, LastIterateRiskBound) {
  const GroundTruth truth = gen_lowrank_rect(4, 4, 1, 21);
  const SensingEnsemble ens = gen_gaussian_rect(4, 4, 6, 22);
  const Observations obs = measure(ens, truth.matrix);
  const MirrorMapSpec map = MirrorMapSpec::hypentropy(1e-3);
  RunConfig cfg;
  cfg.step = 0.3;
  cfg.max_iters = 200000;
  cfg.risk_tol = 1e-14;
  const Trajectory t = mirror_descent(map, ens, obs, Matrix::Zero(4, 4), cfg);
  ASSERT_TRUE(t.converged);
  const double d = bregman(map, t.final_iterate, Matrix::Zero(4, 4));
  for (const IterRecord& r : t.records) {
    if (r.iter == 0) continue;
    EXPECT_LE(cfg.step * r.iter * r.risk, d * (1 + 1e-6)) << "iteration " << r.iter;
  }
}

TEST(FillBregmanToFinal, SnapshotsOnly) {
  const Instance in = gaussian_sym_instance(4, 1, 6, 23);
  const MirrorMapSpec map = MirrorMapSpec::entropy();
  Trajectory t = mirror_descent(map, in.ens, in.obs, 1e-2 * Matrix::Identity(4, 4), fixed(0.2, 20, 5));
  fill_bregman_to_final(map, t);
  for (const IterRecord& r : t.records) {
    if (r.iter % 5 == 0) {
      ASSERT_TRUE(r.bregman_to_final.has_value());
      EXPECT_NEAR(*r.bregman_to_final, bregman(map, t.final_iterate, t.snapshots[r.iter / 5].x), 1e-14);
    } else {
      EXPECT_FALSE(r.bregman_to_final.has_value());
    }
  }
  EXPECT_NEAR(*t.records.back().bregman_to_final, 0.0, 1e-14);
}
