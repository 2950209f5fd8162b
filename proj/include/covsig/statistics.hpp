#pragma once

#include "covsig/dataset.hpp"
#include "covsig/kernels.hpp"
#include "covsig/smoother.hpp"
#include "covsig/types.hpp"

namespace covsig {

//! Raw statistic, variance estimate and the studentized statistic
//! n h^{d/2} raw / sqrt(variance), d being the smoothing dimension.
struct StatisticValue
{
  double raw = 0.0;
  double variance = 0.0;
  double standardized = 0.0;
  Index n = 0;
  Index rate_dimension = 0;
  bool degenerate = false;
};

//! Diagonal terms separating the two U-statistics:
//! n^(4) Itilde = n (n-1)^3 Ihat - n^(3) V1 - 2 n^(3) V2 + n^(2) V3.
struct DiagonalTerms
{
  double v1 = 0.0;
  double v2 = 0.0;
  double v3 = 0.0;
};

enum class VarianceKind { var_hat, var_tilde };

//! Pair weights K_nij psi_ij with a zero diagonal.
Matrix<double> test_weight_matrix(const ScaledDataset& d, double h,
                                  const KernelSpec& K, const PsiSpec& psi);

//! Second-order U-statistic (1/n^(2)) sum_{i != j} uf_i uf_j K_nij psi_ij.
//! Streams rows; needs no stored pair matrix.
double stat_ihat(const SmootherOutput& sm, const ScaledDataset& d, double h,
                 const KernelSpec& K, const PsiSpec& psi);

DiagonalTerms diagonal_terms(const SmootherOutput& sm, const ScaledDataset& d,
                             double h, const KernelSpec& K, const PsiSpec& psi);

//! Fourth-order U-statistic over four distinct indices, computed through
//! the diagonal-term decomposition in O(n^3).
double stat_itilde(const SmootherOutput& sm, const ScaledDataset& d, double h,
                   const KernelSpec& K, const PsiSpec& psi);

//! (2 h^{p_c} / n^(2)) sum_{i != j} uf_i^2 uf_j^2 K_nij^2 psi_ij^2.
double var_hat(const SmootherOutput& sm, const ScaledDataset& d, double h,
               const KernelSpec& K, const PsiSpec& psi);

//! Six-index variance estimator, exact in O(n^3) by inclusion-exclusion over
//! index coincidences. Can be negative in small samples.
double var_tilde(const SmootherOutput& sm, const ScaledDataset& d, double h,
                 const KernelSpec& K, const PsiSpec& psi);

StatisticValue standardize_statistic(double raw, double omega2, Index n,
                                     double h, Index rate_dimension);

//! Competitor smoothing over (W, X) jointly with the same bandwidth; the
//! fourth-order statistic with psi replaced by the joint kernel.
StatisticValue lv_statistic(const SmootherOutput& sm, const ScaledDataset& d,
                            double h, const KernelSpec& K,
                            VarianceKind variance = VarianceKind::var_hat);

//! Cramer-von Mises functional of the marked residual process:
//! sum_i [ sum_j uf_j 1{W_j <= W_i} 1{X_j <= X_i} ]^2.
double dgm_statistic(const SmootherOutput& sm, const ScaledDataset& d);

//! C_ij = 1{W_j <= W_i and X_j <= X_i componentwise}, diagonal included.
Matrix<double> dominance_matrix(const ScaledDataset& d);

struct FisherResult
{
  double F = 0.0;
  double critical = 0.0;
  Index df_num = 0;
  Index df_den = 0;
  bool reject = false;
};

//! F test of the linear model on [1, W, X] against [1, W].
FisherResult fisher_test(const ScaledDataset& d, double alpha);

//! Standard normal upper quantile z_{1-alpha}.
double normal_upper_quantile(double alpha);
double normal_cdf(double z);

} // namespace covsig
