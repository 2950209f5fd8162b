#include "covsig/statistics.hpp"

#include "covsig/summation.hpp"
#include "covsig/ustat.hpp"

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <limits>

namespace covsig {

namespace {

void require_materialized(const SmootherOutput& sm)
{
  if (!sm.materialized()) {
    throw InvalidInput("this statistic needs the stored smoothing matrix; "
                       "n exceeds the materialization limit");
  }
}

void require_alpha(double alpha)
{
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("level alpha must lie in (0, 1)");
  }
}

double itilde_from(const Vector<double>& y, const Matrix<double>& L,
                   const Matrix<double>& M)
{
  const Index n = y.size();
  if (n < 5) {
    throw InvalidInput("the fourth-order statistic needs n >= 5");
  }
  const Matrix<double> D = residual_products(y, L);
  const Vector<double> S = D.rowwise().sum();
  const auto sums = diagonal_sums(D, S, M);
  return itilde_sum(S, M, sums) / arrangements(n, 4);
}

double var_hat_from(const Vector<double>& uf, const Matrix<double>& M2,
                    double h, Index rate_dimension)
{
  const Index n = uf.size();
  const Vector<double> uf2 = uf.cwiseAbs2();
  return 2.0 * std::pow(h, rate_dimension) * weighted_pair_sum(uf2, uf2, M2) /
         arrangements(n, 2);
}

double var_tilde_from(const Vector<double>& y, const Matrix<double>& L,
                      const Matrix<double>& M2, double h, Index rate_dimension)
{
  const Index n = y.size();
  if (n < 7) {
    throw InvalidInput("the six-index variance estimator needs n >= 7");
  }
  const Matrix<double> D = residual_products(y, L);
  return 2.0 * std::pow(h, rate_dimension) * var_tilde_sum(D, M2) /
         arrangements(n, 6);
}

} // namespace

Matrix<double> test_weight_matrix(const ScaledDataset& d, double h,
                                  const KernelSpec& K, const PsiSpec& psi)
{
  Matrix<double> M = kernel_matrix(K, d.data.w, d.data.w_kinds, h);
  M.array() *= psi_matrix(psi, d.data.x).array();
  return M;
}

double stat_ihat(const SmootherOutput& sm, const ScaledDataset& d, double h,
                 const KernelSpec& K, const PsiSpec& psi)
{
  const Index n = d.data.n();
  if (n < 3) {
    throw InvalidInput("the second-order statistic needs n >= 3");
  }
  if (!(h > 0.0)) {
    throw InvalidInput("test bandwidth h must be positive");
  }
  const auto& w = d.data.w;
  const auto& x = d.data.x;
  Vector<double> wd(w.cols()), xd(x.cols());
  CompensatedSum<double> acc;
  for (Index i = 0; i < n; ++i) {
    if (sm.uf(i) == 0.0) {
      continue;
    }
    for (Index j = 0; j < n; ++j) {
      if (j == i || sm.uf(j) == 0.0) {
        continue;
      }
      wd = (w.row(i) - w.row(j)).transpose();
      const double k = eval_mixed_kernel(K, wd, d.data.w_kinds, h);
      if (k == 0.0) {
        continue;
      }
      xd = (x.row(i) - x.row(j)).transpose();
      acc += sm.uf(i) * sm.uf(j) * k * eval_psi(psi, xd);
    }
  }
  return acc.value() / arrangements(n, 2);
}

DiagonalTerms diagonal_terms(const SmootherOutput& sm, const ScaledDataset& d,
                             double h, const KernelSpec& K, const PsiSpec& psi)
{
  require_materialized(sm);
  const Index n = d.data.n();
  if (n < 5) {
    throw InvalidInput("diagonal terms need n >= 5");
  }
  const Matrix<double> M = test_weight_matrix(d, h, K, psi);
  const Matrix<double> D = residual_products(d.data.y, sm.pairwise_L);
  const Vector<double> S = D.rowwise().sum();
  const auto sums = diagonal_sums(D, S, M);
  return {sums.v1 / arrangements(n, 3), sums.v2 / arrangements(n, 3),
          sums.v3 / arrangements(n, 2)};
}

double stat_itilde(const SmootherOutput& sm, const ScaledDataset& d, double h,
                   const KernelSpec& K, const PsiSpec& psi)
{
  require_materialized(sm);
  return itilde_from(d.data.y, sm.pairwise_L, test_weight_matrix(d, h, K, psi));
}

double var_hat(const SmootherOutput& sm, const ScaledDataset& d, double h,
               const KernelSpec& K, const PsiSpec& psi)
{
  const Index n = d.data.n();
  if (n < 3) {
    throw InvalidInput("the variance estimator needs n >= 3");
  }
  const auto& w = d.data.w;
  const auto& x = d.data.x;
  Vector<double> wd(w.cols()), xd(x.cols());
  CompensatedSum<double> acc;
  for (Index i = 0; i < n; ++i) {
    if (sm.uf(i) == 0.0) {
      continue;
    }
    for (Index j = 0; j < n; ++j) {
      if (j == i || sm.uf(j) == 0.0) {
        continue;
      }
      wd = (w.row(i) - w.row(j)).transpose();
      const double k = eval_mixed_kernel(K, wd, d.data.w_kinds, h);
      if (k == 0.0) {
        continue;
      }
      xd = (x.row(i) - x.row(j)).transpose();
      const double m = k * eval_psi(psi, xd);
      acc += sm.uf(i) * sm.uf(i) * sm.uf(j) * sm.uf(j) * m * m;
    }
  }
  return 2.0 * std::pow(h, d.data.p_continuous()) * acc.value() /
         arrangements(n, 2);
}

double var_tilde(const SmootherOutput& sm, const ScaledDataset& d, double h,
                 const KernelSpec& K, const PsiSpec& psi)
{
  require_materialized(sm);
  const Matrix<double> M = test_weight_matrix(d, h, K, psi);
  return var_tilde_from(d.data.y, sm.pairwise_L, M.cwiseAbs2(), h,
                        d.data.p_continuous());
}

StatisticValue standardize_statistic(double raw, double omega2, Index n,
                                     double h, Index rate_dimension)
{
  StatisticValue out;
  out.raw = raw;
  out.variance = omega2;
  out.n = n;
  out.rate_dimension = rate_dimension;
  if (!(omega2 > 0.0)) {
    out.degenerate = true;
    out.standardized = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.standardized = static_cast<double>(n) *
                     std::pow(h, 0.5 * static_cast<double>(rate_dimension)) *
                     raw / std::sqrt(omega2);
  return out;
}

StatisticValue lv_statistic(const SmootherOutput& sm, const ScaledDataset& d,
                            double h, const KernelSpec& K, VarianceKind variance)
{
  require_materialized(sm);
  if (d.data.q_continuous() != d.data.q()) {
    throw InvalidInput("LV requires continuous X");
  }
  const Matrix<double> M =
    joint_kernel_matrix(K, d.data.w, d.data.w_kinds, d.data.x, h);
  const Index rate = d.data.p_continuous() + d.data.q();
  const double raw = itilde_from(d.data.y, sm.pairwise_L, M);
  const Matrix<double> M2 = M.cwiseAbs2();
  const double omega2 =
    variance == VarianceKind::var_hat
      ? var_hat_from(sm.uf, M2, h, rate)
      : var_tilde_from(d.data.y, sm.pairwise_L, M2, h, rate);
  return standardize_statistic(raw, omega2, d.data.n(), h, rate);
}

Matrix<double> dominance_matrix(const ScaledDataset& d)
{
  const Index n = d.data.n();
  Matrix<double> z(n, d.data.p() + d.data.q());
  z << d.data.w, d.data.x;
  Matrix<double> C(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      C(i, j) = (z.row(j).array() <= z.row(i).array()).all() ? 1.0 : 0.0;
    }
  }
  return C;
}

double dgm_statistic(const SmootherOutput& sm, const ScaledDataset& d)
{
  const Index n = d.data.n();
  if (n < 3) {
    throw InvalidInput("the Cramer-von Mises statistic needs n >= 3");
  }
  Matrix<double> z(n, d.data.p() + d.data.q());
  z << d.data.w, d.data.x;
  CompensatedSum<double> outer;
  for (Index i = 0; i < n; ++i) {
    CompensatedSum<double> inner;
    for (Index j = 0; j < n; ++j) {
      if ((z.row(j).array() <= z.row(i).array()).all()) {
        inner += sm.uf(j);
      }
    }
    const double v = inner.value();
    outer += v * v;
  }
  return outer.value();
}

FisherResult fisher_test(const ScaledDataset& d, double alpha)
{
  require_alpha(alpha);
  const Index n = d.data.n();
  const Index p = d.data.p();
  const Index q = d.data.q();
  if (q < 1) {
    throw InvalidInput("the F test needs at least one tested covariate");
  }
  if (n <= 1 + p + q) {
    throw InvalidInput("the F test needs n > 1 + p + q");
  }

  auto rss = [&](const Matrix<double>& design) {
    Eigen::ColPivHouseholderQR<Matrix<double>> qr(design);
    if (qr.rank() < design.cols()) {
      throw InvalidInput("design matrix of the F test is rank deficient");
    }
    const Vector<double> beta = qr.solve(d.data.y);
    return (d.data.y - design * beta).squaredNorm();
  };

  Matrix<double> restricted(n, 1 + p);
  restricted << Vector<double>::Ones(n), d.data.w;
  Matrix<double> full(n, 1 + p + q);
  full << restricted, d.data.x;
  const double rss0 = rss(restricted);
  const double rss1 = rss(full);

  FisherResult out;
  out.df_num = q;
  out.df_den = n - 1 - p - q;
  const double numerator = std::max(rss0 - rss1, 0.0) / static_cast<double>(q);
  const double denominator = rss1 / static_cast<double>(out.df_den);
  if (denominator > 0.0) {
    out.F = numerator / denominator;
  } else {
    out.F = numerator > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  boost::math::fisher_f dist(static_cast<double>(out.df_num),
                             static_cast<double>(out.df_den));
  out.critical = boost::math::quantile(boost::math::complement(dist, alpha));
  out.reject = out.F > out.critical;
  return out;
}

double normal_upper_quantile(double alpha)
{
  require_alpha(alpha);
  return boost::math::quantile(boost::math::complement(boost::math::normal(), alpha));
}

double normal_cdf(double z)
{
  if (std::isinf(z)) {
    return z > 0 ? 1.0 : 0.0;
  }
  return boost::math::cdf(boost::math::normal(), z);
}

} // namespace covsig
