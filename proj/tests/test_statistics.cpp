#include "covsig/oracle.hpp"
#include "covsig/pairwise_cache.hpp"
#include "covsig/selfcheck.hpp"
#include "covsig/statistics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

using namespace covsig;

namespace {

const KernelSpec K;

struct Fixture
{
  ScaledDataset sd;
  PsiSpec psi;
  double g;
  double h;
};

Fixture check_fixture(Index n, int k, std::uint64_t seed = 99)
{
  Rng rng = make_stream(seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k)});
  CheckCase cc = make_check_case(n, 1 + k % 2, k, rng);
  return {standardize(cc.data), cc.psi, cc.g, cc.h};
}

ScaledDataset with_y(ScaledDataset sd, const Vector<double>& y)
{
  sd.data.y = y;
  return sd;
}

void expect_rel(double fast, double ref, double rel = 1e-10)
{
  EXPECT_TRUE(nearly_equal(fast, ref, rel)) << fast << " vs " << ref;
}

} // namespace

TEST(Oracles, SmallSamplesAgreeWithFastPaths)
{
  for (Index n : {6, 8, 10}) {
    for (int k = 0; k < 6; ++k) {
      const Fixture f = check_fixture(n, k);
      const auto& y = f.sd.data.y;
      const auto Lw = oracle::smoothing_weight(f.sd, f.g, K);
      const auto Mw = oracle::test_weight(f.sd, f.h, K, f.psi);
      const SmootherOutput sm = compute_smoother(f.sd, f.g, K);
      const Index pc = f.sd.data.p_continuous();

      expect_rel(stat_ihat(sm, f.sd, f.h, K, f.psi), oracle::ihat(y, Lw, Mw));
      expect_rel(stat_itilde(sm, f.sd, f.h, K, f.psi), oracle::itilde(y, Lw, Mw));
      const DiagonalTerms v = diagonal_terms(sm, f.sd, f.h, K, f.psi);
      const DiagonalTerms vr = oracle::diagonal_terms(y, Lw, Mw);
      expect_rel(v.v1, vr.v1);
      expect_rel(v.v2, vr.v2);
      expect_rel(v.v3, vr.v3);
      expect_rel(var_hat(sm, f.sd, f.h, K, f.psi), oracle::var_hat(y, Lw, Mw, f.h, pc));
      if (n >= 7) {
        expect_rel(var_tilde(sm, f.sd, f.h, K, f.psi),
                   oracle::var_tilde_exact(y, Lw, Mw, f.h, pc));
      }
    }
  }
}

TEST(Oracles, LvMatchesJointKernelOracle)
{
  for (int k : {0, 1, 3, 4}) {
    const Fixture f = check_fixture(8, k);
    ASSERT_EQ(f.sd.data.q_continuous(), f.sd.data.q());
    const auto& y = f.sd.data.y;
    const auto Lw = oracle::smoothing_weight(f.sd, f.g, K);
    const auto Jw = oracle::joint_weight(f.sd, f.h, K);
    const SmootherOutput sm = compute_smoother(f.sd, f.g, K);
    const Index d = f.sd.data.p_continuous() + f.sd.data.q();
    const StatisticValue hat = lv_statistic(sm, f.sd, f.h, K, VarianceKind::var_hat);
    expect_rel(hat.raw, oracle::itilde(y, Lw, Jw));
    expect_rel(hat.variance, oracle::var_hat(y, Lw, Jw, f.h, d));
    EXPECT_EQ(hat.rate_dimension, d);
    const StatisticValue tilde = lv_statistic(sm, f.sd, f.h, K, VarianceKind::var_tilde);
    expect_rel(tilde.variance, oracle::var_tilde_exact(y, Lw, Jw, f.h, d));
  }
}

TEST(Itilde, DecompositionIdentityByBruteForce)
{
  for (int k = 0; k < 5; ++k) {
    const Fixture f = check_fixture(8, k, 7);
    const auto& y = f.sd.data.y;
    const auto Lw = oracle::smoothing_weight(f.sd, f.g, K);
    const auto Mw = oracle::test_weight(f.sd, f.h, K, f.psi);
    const DiagonalTerms v = oracle::diagonal_terms(y, Lw, Mw);
    const double n = 8;
    const double lhs = arrangements(8, 4) * oracle::itilde(y, Lw, Mw);
    const double rhs = n * (n - 1) * (n - 1) * (n - 1) * oracle::ihat(y, Lw, Mw) -
                       arrangements(8, 3) * (v.v1 + 2.0 * v.v2) +
                       arrangements(8, 2) * v.v3;
    expect_rel(lhs, rhs);
  }
}

TEST(Itilde, IndicatorPsiWithConstantXReducesToUnitWeights)
{
  Fixture f = check_fixture(8, 2);
  ASSERT_EQ(f.psi.family, PsiSpec::Family::indicator);
  f.sd.data.x.setConstant(1.0);
  const auto& y = f.sd.data.y;
  const SmootherOutput sm = compute_smoother(f.sd, f.g, K);
  const auto Lw = oracle::smoothing_weight(f.sd, f.g, K);
  const Matrix<double> Kw =
    kernel_matrix(K, f.sd.data.w, f.sd.data.w_kinds, f.h);
  const oracle::PairWeight plain = [&Kw](Index i, Index j) { return Kw(i, j); };
  expect_rel(stat_itilde(sm, f.sd, f.h, K, f.psi), oracle::itilde(y, Lw, plain));
}

TEST(Statistics, ConstantResponseGivesZeros)
{
  Fixture f = check_fixture(9, 0);
  f.sd.data.y.setConstant(-1.25);
  const SmootherOutput sm = compute_smoother(f.sd, f.g, K);
  EXPECT_EQ(stat_ihat(sm, f.sd, f.h, K, f.psi), 0.0);
  EXPECT_EQ(stat_itilde(sm, f.sd, f.h, K, f.psi), 0.0);
  const DiagonalTerms v = diagonal_terms(sm, f.sd, f.h, K, f.psi);
  EXPECT_EQ(v.v1, 0.0);
  EXPECT_EQ(v.v2, 0.0);
  EXPECT_EQ(v.v3, 0.0);
  EXPECT_EQ(var_hat(sm, f.sd, f.h, K, f.psi), 0.0);
  EXPECT_EQ(var_tilde(sm, f.sd, f.h, K, f.psi), 0.0);
  EXPECT_EQ(lv_statistic(sm, f.sd, f.h, K).raw, 0.0);
  EXPECT_EQ(dgm_statistic(sm, f.sd), 0.0);
}

TEST(Statistics, TinyTestBandwidthGivesZeros)
{
  const Fixture f = check_fixture(9, 0);
  const SmootherOutput sm = compute_smoother(f.sd, f.g, K);
  const double h = 1e-9;
  EXPECT_EQ(stat_ihat(sm, f.sd, h, K, f.psi), 0.0);
  EXPECT_EQ(stat_itilde(sm, f.sd, h, K, f.psi), 0.0);
  const DiagonalTerms v = diagonal_terms(sm, f.sd, h, K, f.psi);
  EXPECT_EQ(v.v1, 0.0);
  EXPECT_EQ(v.v2, 0.0);
  EXPECT_EQ(v.v3, 0.0);
}

TEST(VarHat, SingleNonzeroResidualGivesZero)
{
  const Fixture f = check_fixture(8, 0);
  SmootherOutput sm = compute_smoother(f.sd, f.g, K);
  sm.uf.setZero();
  sm.uf(3) = 2.0;
  EXPECT_EQ(var_hat(sm, f.sd, f.h, K, f.psi), 0.0);
}

TEST(VarTilde, ExactEstimatorMatchesOracleAtLargerN)
{
  // The O(n^3) path has no approximation; check it beyond the smallest sizes.
  const Fixture f = check_fixture(10, 4, 1234);
  const auto& y = f.sd.data.y;
  const SmootherOutput sm = compute_smoother(f.sd, f.g, K);
  expect_rel(var_tilde(sm, f.sd, f.h, K, f.psi),
             oracle::var_tilde_exact(y, oracle::smoothing_weight(f.sd, f.g, K),
                                     oracle::test_weight(f.sd, f.h, K, f.psi), f.h,
                                     f.sd.data.p_continuous()),
             1e-9);
}

TEST(Statistics, SampleSizeFloors)
{
  const Fixture f = check_fixture(6, 0);
  const SmootherOutput sm = compute_smoother(f.sd, f.g, K);
  EXPECT_THROW(var_tilde(sm, f.sd, f.h, K, f.psi), InvalidInput);
  EXPECT_EQ(minimum_sample_size(StatisticKind::itilde, VarianceKind::var_hat), 5);
  EXPECT_EQ(minimum_sample_size(StatisticKind::itilde, VarianceKind::var_tilde), 7);
  EXPECT_EQ(minimum_sample_size(StatisticKind::ihat, VarianceKind::var_hat), 3);
  EXPECT_EQ(minimum_sample_size(StatisticKind::dgm, VarianceKind::var_tilde), 3);
}

TEST(StandardizeStatistic, Examples)
{
  EXPECT_EQ(standardize_statistic(0.0, 2.0, 50, 0.3, 2).standardized, 0.0);
  const StatisticValue zero = standardize_statistic(0.1, 0.0, 50, 0.3, 2);
  EXPECT_TRUE(zero.degenerate);
  EXPECT_TRUE(std::isnan(zero.standardized));
  EXPECT_TRUE(standardize_statistic(0.1, -1e-3, 50, 0.3, 2).degenerate);
  const double omega = 0.7, n = 80, h = 0.4;
  const double raw = omega / (n * std::pow(h, 1.5));
  EXPECT_NEAR(standardize_statistic(raw, omega * omega, 80, h, 3).standardized, 1.0, 1e-14);
}

TEST(Lv, EmptyXReducesToUnitPsi)
{
  const Fixture f = check_fixture(8, 0);
  ScaledDataset no_x = f.sd;
  no_x.data.x.resize(8, 0);
  no_x.data.x_kinds.clear();
  no_x.data.x_names.clear();
  ScaledDataset constant_x = f.sd;
  constant_x.data.x.setZero();
  constant_x.data.x.conservativeResize(8, 1);
  constant_x.data.x_kinds.assign(1, ColumnKind::discrete);
  const SmootherOutput sm = compute_smoother(f.sd, f.g, K);
  const double lv = lv_statistic(sm, no_x, f.h, K).raw;
  const double unit = stat_itilde(sm, constant_x, f.h, K, PsiSpec{PsiSpec::Family::indicator});
  expect_rel(lv, unit);
}

TEST(Lv, DiscreteXIsRejected)
{
  const Fixture f = check_fixture(8, 2);
  ASSERT_LT(f.sd.data.q_continuous(), f.sd.data.q());
  const SmootherOutput sm = compute_smoother(f.sd, f.g, K);
  try {
    lv_statistic(sm, f.sd, f.h, K);
    FAIL() << "expected an exception";
  } catch (const InvalidInput& e) {
    EXPECT_STREQ(e.what(), "LV requires continuous X");
  }
}

TEST(Dgm, HandEvaluatedThreePoints)
{
  Vector<double> y = Vector<double>::Zero(3);
  Matrix<double> w(3, 1), x(3, 1);
  w << 0, 1, 2;
  x << 2, 0, 1;
  ScaledDataset sd = standardize(make_dataset(y, w, x));
  SmootherOutput sm;
  sm.uf.resize(3);
  sm.uf << 1.0, -2.0, 0.5;
  // Dominance sets: i=0 {0}; i=1 {1}; i=2 {1, 2}.
  const double expected = 1.0 + 4.0 + (-2.0 + 0.5) * (-2.0 + 0.5);
  EXPECT_DOUBLE_EQ(dgm_statistic(sm, sd), expected);
  const Matrix<double> C = dominance_matrix(sd);
  Matrix<double> expected_c(3, 3);
  expected_c << 1, 0, 0,
                0, 1, 0,
                0, 1, 1;
  EXPECT_EQ(C, expected_c);
}

TEST(Dgm, PermutationInvariant)
{
  const Fixture f = check_fixture(10, 1);
  const SmootherOutput sm = compute_smoother(f.sd, f.g, K);
  std::vector<Index> order(10);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), std::mt19937_64(3));
  ScaledDataset p = f.sd;
  SmootherOutput psm = sm;
  for (Index i = 0; i < 10; ++i) {
    p.data.w.row(i) = f.sd.data.w.row(order[i]);
    p.data.x.row(i) = f.sd.data.x.row(order[i]);
    psm.uf(i) = sm.uf(order[i]);
  }
  expect_rel(dgm_statistic(psm, p), dgm_statistic(sm, f.sd));
}

TEST(PairSums, TransposedMatricesGiveTheSameValues)
{
  const Fixture f = check_fixture(10, 3);
  const SmootherOutput sm = compute_smoother(f.sd, f.g, K);
  const Matrix<double> M = test_weight_matrix(f.sd, f.h, K, f.psi);
  const Matrix<double> Mt = M.transpose();
  const Matrix<double> L = sm.pairwise_L;
  const Matrix<double> Lt = L.transpose();
  const SmootherOutput a = smoother_from_matrix(f.sd.data.y, L);
  const SmootherOutput b = smoother_from_matrix(f.sd.data.y, Lt);
  EXPECT_EQ(a.uf, b.uf);
  EXPECT_EQ(M, Mt);
}

TEST(PairwiseCache, ReuseMatchesRecomputationForNewResponses)
{
  const Fixture f = check_fixture(12, 1);
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal;
  for (StatisticKind kind :
       {StatisticKind::itilde, StatisticKind::ihat, StatisticKind::lv, StatisticKind::dgm}) {
    const Bandwidths bw{f.g, f.h, 1.0};
    const PairwiseCache cache(f.sd, kind, K, f.psi, bw);
    for (int rep = 0; rep < 3; ++rep) {
      Vector<double> ystar(12);
      for (Index i = 0; i < 12; ++i) ystar(i) = normal(rng);
      const ScaledDataset fresh = with_y(f.sd, ystar);
      const SmootherOutput sm_fresh = compute_smoother(fresh, f.g, K);
      const SmootherOutput sm_cache = cache.smooth(ystar);
      const Evaluation ev = cache.evaluate(sm_cache, ystar, VarianceKind::var_hat);
      double scratch = 0.0;
      switch (kind) {
        case StatisticKind::itilde:
          scratch = stat_itilde(sm_fresh, fresh, f.h, K, f.psi);
          break;
        case StatisticKind::ihat:
          scratch = stat_ihat(sm_fresh, fresh, f.h, K, f.psi);
          break;
        case StatisticKind::lv:
          scratch = lv_statistic(sm_fresh, fresh, f.h, K).raw;
          break;
        case StatisticKind::dgm:
          scratch = dgm_statistic(sm_fresh, fresh);
          break;
      }
      EXPECT_TRUE(nearly_equal(ev.value.raw, scratch, 1e-12)) << to_string(kind);
    }
  }
}

TEST(PairwiseCache, StreamingSecondOrderMatchesMaterialized)
{
  const Fixture f = check_fixture(40, 0, 5);
  const Bandwidths bw{1.0, 1.0, 1.0};
  for (StatisticKind kind : {StatisticKind::ihat, StatisticKind::dgm}) {
    const PairwiseCache full(f.sd, kind, K, f.psi, bw);
    const PairwiseCache streamed(f.sd, kind, K, f.psi, bw, SmootherOptions{10});
    EXPECT_FALSE(streamed.materialized());
    const auto& y = f.sd.data.y;
    const Evaluation a = full.evaluate(full.smooth(y), y, VarianceKind::var_hat);
    const Evaluation b = streamed.evaluate(streamed.smooth(y), y, VarianceKind::var_hat);
    EXPECT_TRUE(nearly_equal(a.value.raw, b.value.raw, 1e-12));
    EXPECT_TRUE(nearly_equal(a.value.standardized, b.value.standardized, 1e-12));
  }
  EXPECT_THROW(PairwiseCache(f.sd, StatisticKind::itilde, K, f.psi, bw, SmootherOptions{10}),
               InvalidInput);
}

TEST(PairwiseCache, NonpositiveTildeVarianceFallsBack)
{
  // Search seeded small samples for a negative six-index estimate.
  bool seen = false;
  for (int k = 0; k < 400 && !seen; ++k) {
    const Fixture f = check_fixture(7, 0, 1000 + k);
    const SmootherOutput sm = compute_smoother(f.sd, f.g, K);
    if (var_tilde(sm, f.sd, f.h, K, f.psi) > 0.0) {
      continue;
    }
    seen = true;
    const PairwiseCache cache(f.sd, StatisticKind::itilde, K, f.psi, Bandwidths{f.g, f.h, 1.0});
    const Evaluation ev = cache.evaluate(cache.smooth(f.sd.data.y), f.sd.data.y,
                                         VarianceKind::var_tilde);
    EXPECT_TRUE(ev.fallback_used);
    EXPECT_TRUE(nearly_equal(ev.value.variance, var_hat(sm, f.sd, f.h, K, f.psi)));
  }
  if (!seen) {
    GTEST_SKIP() << "no seeded sample produced a nonpositive six-index variance";
  }
}

TEST(StatisticNames, RoundTrip)
{
  for (StatisticKind kind :
       {StatisticKind::itilde, StatisticKind::ihat, StatisticKind::lv, StatisticKind::dgm}) {
    EXPECT_EQ(parse_statistic(to_string(kind)), kind);
  }
  EXPECT_THROW(parse_statistic("cvm"), InvalidInput);
}

namespace {

// Second OLS implementation: normal equations with a Cholesky solve.
double rss_normal_equations(const Matrix<double>& X, const Vector<double>& y)
{
  const Matrix<double> xtx = X.transpose() * X;
  const Vector<double> xty = X.transpose() * y;
  const Vector<double> beta = xtx.llt().solve(xty);
  return (y - X * beta).squaredNorm();
}

} // namespace

TEST(Fisher, MatchesNormalEquationsOracle)
{
  std::mt19937_64 rng(20);
  std::normal_distribution<double> normal;
  const Index n = 20;
  Vector<double> y(n);
  Matrix<double> w(n, 2), x(n, 2);
  for (Index i = 0; i < n; ++i) {
    w(i, 0) = normal(rng);
    w(i, 1) = normal(rng);
    x(i, 0) = normal(rng);
    x(i, 1) = normal(rng);
    y(i) = w(i, 0) + 0.5 * x(i, 1) + normal(rng);
  }
  const ScaledDataset sd = standardize(make_dataset(y, w, x));
  Matrix<double> r(n, 3), full(n, 5);
  r << Vector<double>::Ones(n), sd.data.w;
  full << r, sd.data.x;
  const double rss0 = rss_normal_equations(r, y);
  const double rss1 = rss_normal_equations(full, y);
  const double F = ((rss0 - rss1) / 2.0) / (rss1 / (n - 5.0));
  const FisherResult res = fisher_test(sd, 0.10);
  EXPECT_NEAR(res.F, F, 1e-8 * F);
  EXPECT_EQ(res.df_num, 2);
  EXPECT_EQ(res.df_den, 15);
  // Upper 10% point of F(2, 15).
  EXPECT_NEAR(res.critical, 2.6952, 1e-4);
  EXPECT_EQ(res.reject, F > res.critical);
}

TEST(Fisher, ZeroNumeratorAndExactFit)
{
  const Index n = 12;
  Matrix<double> w(n, 1), x(n, 1);
  Vector<double> noise(n);
  for (Index i = 0; i < n; ++i) {
    w(i, 0) = static_cast<double>(i);
    x(i, 0) = (i % 3) - 1.0;
    noise(i) = std::cos(1.7 * static_cast<double>(i));
  }
  // Noise orthogonal to [1, w, x]: both fits leave the same residual.
  Matrix<double> span(n, 3);
  span << Vector<double>::Ones(n), w, x;
  const Eigen::HouseholderQR<Matrix<double>> qr(span);
  const Matrix<double> Q = qr.householderQ() * Matrix<double>::Identity(n, 3);
  const Vector<double> e = noise - Q * (Q.transpose() * noise);
  const Vector<double> y = (2.0 + 0.5 * w.col(0).array()).matrix() + e;
  const FisherResult none = fisher_test(standardize(make_dataset(y, w, x)), 0.05);
  EXPECT_LT(none.F, 1e-20);
  EXPECT_FALSE(none.reject);

  const Vector<double> exact = 3.0 * x.col(0) + w.col(0);
  const FisherResult fit = fisher_test(standardize(make_dataset(exact, w, x)), 0.05);
  EXPECT_TRUE(fit.reject);
  EXPECT_GT(fit.F, 1e10);
}

TEST(Fisher, RankDeficiencyIsAnError)
{
  const Index n = 10;
  Vector<double> y(n);
  Matrix<double> w(n, 1), x(n, 1);
  for (Index i = 0; i < n; ++i) {
    y(i) = std::sin(static_cast<double>(i));
    w(i, 0) = static_cast<double>(i);
    x(i, 0) = 2.0 * static_cast<double>(i);
  }
  EXPECT_THROW(fisher_test(standardize(make_dataset(y, w, x)), 0.05), InvalidInput);
}

TEST(NormalQuantile, TextbookValues)
{
  EXPECT_NEAR(normal_upper_quantile(0.10), 1.2816, 1e-4);
  EXPECT_NEAR(normal_upper_quantile(0.05), 1.6449, 1e-4);
  EXPECT_NEAR(normal_cdf(0.0), 0.5, 1e-15);
}
