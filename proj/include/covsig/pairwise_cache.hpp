#pragma once

#include "covsig/dataset.hpp"
#include "covsig/kernels.hpp"
#include "covsig/smoother.hpp"
#include "covsig/statistics.hpp"

#include <string>

namespace covsig {

enum class StatisticKind { itilde, ihat, lv, dgm };

std::string to_string(StatisticKind kind);
StatisticKind parse_statistic(const std::string& name);

//! Smallest n at which the statistic (and variance estimator) is defined.
Index minimum_sample_size(StatisticKind kind, VarianceKind variance);

//! Evaluation of a statistic for one response vector.
struct Evaluation
{
  StatisticValue value;
  bool fallback_used = false; //!< var_tilde <= 0 replaced by var_hat
};

//! Pair matrices of one dataset (L, the test weights and their squares, the
//! dominance indicators), computed once and reused for every response
//! vector sharing the covariates: original sample and bootstrap resamples.
//! Above the materialization limit only the second-order and Cramer-von
//! Mises statistics are available and rows are recomputed on the fly.
class PairwiseCache
{
public:
  PairwiseCache(const ScaledDataset& d, StatisticKind statistic,
                const KernelSpec& kernel, const PsiSpec& psi,
                const Bandwidths& bandwidths,
                const SmootherOptions& options = {});

  SmootherOutput smooth(const Vector<double>& y) const;

  //! Statistic for response y given its smoother output. For the
  //! Cramer-von Mises statistic, standardized equals raw.
  Evaluation evaluate(const SmootherOutput& sm, const Vector<double>& y,
                      VarianceKind variance) const;

  bool materialized() const { return materialized_; }
  Index rate_dimension() const { return rate_dimension_; }
  Index n() const { return data_.data.n(); }
  StatisticKind statistic() const { return statistic_; }
  const Bandwidths& bandwidths() const { return bandwidths_; }

  const Matrix<double>& smoothing() const { return L_; }
  const Matrix<double>& weights() const { return M_; }

private:
  ScaledDataset data_;
  StatisticKind statistic_;
  KernelSpec kernel_;
  PsiSpec psi_;
  Bandwidths bandwidths_;
  bool materialized_;
  Index rate_dimension_;
  Matrix<double> L_;
  Matrix<double> M_;
  Matrix<double> M2_;
  Matrix<double> dominance_;
};

} // namespace covsig
