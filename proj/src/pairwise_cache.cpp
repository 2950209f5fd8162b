#include "covsig/pairwise_cache.hpp"

#include "covsig/summation.hpp"
#include "covsig/ustat.hpp"

#include <cmath>
#include <limits>

namespace covsig {

std::string to_string(StatisticKind kind)
{
  switch (kind) {
    case StatisticKind::itilde: return "itilde";
    case StatisticKind::ihat: return "ihat";
    case StatisticKind::lv: return "lv";
    case StatisticKind::dgm: return "dgm";
  }
  return "unknown";
}

StatisticKind parse_statistic(const std::string& name)
{
  if (name == "itilde") return StatisticKind::itilde;
  if (name == "ihat") return StatisticKind::ihat;
  if (name == "lv") return StatisticKind::lv;
  if (name == "dgm") return StatisticKind::dgm;
  throw InvalidInput("unknown statistic '" + name + "'");
}

Index minimum_sample_size(StatisticKind kind, VarianceKind variance)
{
  Index floor = 3;
  if (kind == StatisticKind::itilde || kind == StatisticKind::lv) {
    floor = 5;
  }
  if (kind != StatisticKind::dgm && variance == VarianceKind::var_tilde) {
    floor = 7;
  }
  return floor;
}

PairwiseCache::PairwiseCache(const ScaledDataset& d, StatisticKind statistic,
                             const KernelSpec& kernel, const PsiSpec& psi,
                             const Bandwidths& bandwidths,
                             const SmootherOptions& options)
  : data_(d)
  , statistic_(statistic)
  , kernel_(kernel)
  , psi_(psi)
  , bandwidths_(bandwidths)
  , materialized_(d.data.n() <= options.materialize_limit)
  , rate_dimension_(d.data.p_continuous())
{
  if (!(bandwidths.g > 0.0) || !(bandwidths.h > 0.0)) {
    throw InvalidInput("bandwidths g and h must be positive");
  }
  if (statistic == StatisticKind::lv) {
    if (d.data.q_continuous() != d.data.q()) {
      throw InvalidInput("LV requires continuous X");
    }
    rate_dimension_ += d.data.q();
  }
  if (!materialized_) {
    if (statistic == StatisticKind::itilde || statistic == StatisticKind::lv) {
      throw InvalidInput("n = " + std::to_string(d.data.n()) +
                         " exceeds the materialization limit " +
                         std::to_string(options.materialize_limit) +
                         "; use the second-order statistic or raise the limit");
    }
    return;
  }

  L_ = smoothing_matrix(d, bandwidths.g, kernel);
  switch (statistic) {
    case StatisticKind::itilde:
    case StatisticKind::ihat:
      M_ = test_weight_matrix(d, bandwidths.h, kernel, psi);
      break;
    case StatisticKind::lv:
      M_ = joint_kernel_matrix(kernel, d.data.w, d.data.w_kinds, d.data.x,
                               bandwidths.h);
      break;
    case StatisticKind::dgm:
      dominance_ = dominance_matrix(d);
      break;
  }
  M2_ = M_.cwiseAbs2();
}

SmootherOutput PairwiseCache::smooth(const Vector<double>& y) const
{
  if (materialized_) {
    return smoother_from_matrix(y, L_);
  }
  ScaledDataset copy = data_;
  copy.data.y = y;
  return compute_smoother(copy, bandwidths_.g, kernel_,
                          SmootherOptions{0});
}

Evaluation PairwiseCache::evaluate(const SmootherOutput& sm,
                                   const Vector<double>& y,
                                   VarianceKind variance) const
{
  const Index n = y.size();
  const double h = bandwidths_.h;
  Evaluation out;

  if (statistic_ == StatisticKind::dgm) {
    double raw = 0.0;
    if (materialized_) {
      const Vector<double> marks = dominance_ * sm.uf;
      raw = compensated_sum(marks.cwiseAbs2());
    } else {
      raw = dgm_statistic(sm, data_);
    }
    out.value.raw = raw;
    out.value.variance = std::numeric_limits<double>::quiet_NaN();
    out.value.standardized = raw;
    out.value.n = n;
    return out;
  }

  if (!materialized_) {
    const double raw = stat_ihat(sm, data_, h, kernel_, psi_);
    const double omega2 = var_hat(sm, data_, h, kernel_, psi_);
    out.value = standardize_statistic(raw, omega2, n, h, rate_dimension_);
    return out;
  }

  const bool needs_products =
    statistic_ != StatisticKind::ihat || variance == VarianceKind::var_tilde;
  const Matrix<double> D =
    needs_products ? residual_products(y, L_) : Matrix<double>();
  double raw = 0.0;
  if (statistic_ == StatisticKind::ihat) {
    raw = weighted_pair_sum(sm.uf, sm.uf, M_) / arrangements(n, 2);
  } else {
    const Vector<double> S = D.rowwise().sum();
    raw = itilde_sum(S, M_, diagonal_sums(D, S, M_)) / arrangements(n, 4);
  }

  auto hat = [&] {
    const Vector<double> uf2 = sm.uf.cwiseAbs2();
    return 2.0 * std::pow(h, rate_dimension_) *
           weighted_pair_sum(uf2, uf2, M2_) / arrangements(n, 2);
  };
  double omega2 = 0.0;
  if (variance == VarianceKind::var_tilde) {
    omega2 = 2.0 * std::pow(h, rate_dimension_) * var_tilde_sum(D, M2_) /
             arrangements(n, 6);
    if (!(omega2 > 0.0)) {
      omega2 = hat();
      out.fallback_used = true;
    }
  } else {
    omega2 = hat();
  }
  out.value = standardize_statistic(raw, omega2, n, h, rate_dimension_);
  return out;
}

} // namespace covsig
