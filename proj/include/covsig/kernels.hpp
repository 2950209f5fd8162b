#pragma once

#include "covsig/dataset.hpp"
#include "covsig/types.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <string>

namespace covsig {

//! Smoothing kernel shape, used both for the estimation kernel L and the
//! test kernel K.
struct KernelSpec
{
  enum class Shape { epanechnikov_on_norm };
  Shape shape = Shape::epanechnikov_on_norm;
};

//! Weight function applied to differences of the covariates under test.
//! The density families are l(||x||) with l a univariate density of unit
//! second moment.
struct PsiSpec
{
  enum class Family { triangular_on_norm, normal_on_norm, indicator };
  Family family = Family::normal_on_norm;
};

struct Bandwidths
{
  double g = 0.0; //!< estimation bandwidth (leave-one-out smoother)
  double h = 0.0; //!< test bandwidth
  double c = 1.0; //!< factor in the rule h = c n^{-2.1/6}
};

//! Half-width of the unit-variance triangular density.
inline const double triangular_half_width = std::sqrt(6.0);

template <typename Derived>
double eval_kernel(const KernelSpec&, const Eigen::MatrixBase<Derived>& u)
{
  double r2 = 0.0;
  for (Index j = 0; j < u.size(); ++j) {
    r2 += u(j) * u(j);
  }
  return r2 < 1.0 ? 0.75 * (1.0 - r2) : 0.0;
}

//! Kernel on a (possibly empty) vector of discrete-aware differences:
//! h^{-p_c} K(diff_c / h) times the indicator that all discrete coordinates
//! agree. Columns are classified by `kinds`.
template <typename Derived>
double eval_mixed_kernel(const KernelSpec& spec,
                         const Eigen::MatrixBase<Derived>& diff,
                         std::span<const ColumnKind> kinds, double h)
{
  double r2 = 0.0;
  int p_c = 0;
  for (Index j = 0; j < diff.size(); ++j) {
    if (kinds[j] == ColumnKind::discrete) {
      if (diff(j) != 0.0) {
        return 0.0;
      }
    } else {
      r2 += (diff(j) / h) * (diff(j) / h);
      ++p_c;
    }
  }
  (void)spec;
  const double k = r2 < 1.0 ? 0.75 * (1.0 - r2) : 0.0;
  return k / std::pow(h, p_c);
}

//! Univariate profile of the density families, evaluated at t >= 0.
inline double psi_profile(PsiSpec::Family family, double t)
{
  switch (family) {
    case PsiSpec::Family::triangular_on_norm: {
      const double a = triangular_half_width;
      return std::abs(t) < a ? (1.0 - std::abs(t) / a) / a : 0.0;
    }
    case PsiSpec::Family::normal_on_norm:
      return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
    case PsiSpec::Family::indicator:
      return t == 0.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

template <typename Derived>
double eval_psi(const PsiSpec& spec, const Eigen::MatrixBase<Derived>& x_diff)
{
  if (spec.family == PsiSpec::Family::indicator) {
    return (x_diff.array() == 0.0).all() ? 1.0 : 0.0;
  }
  return psi_profile(spec.family, x_diff.norm());
}

//! g = n^{-1/6}, h = c n^{-2.1/6}.
Bandwidths default_bandwidths(Index n, double c);

std::string to_string(PsiSpec::Family family);
PsiSpec::Family parse_psi_family(const std::string& name);

//! Symmetric n x n matrix of h^{-p_c} K((W_i - W_j)/h) 1{W_id = W_jd} with a
//! zero diagonal.
Matrix<double> kernel_matrix(const KernelSpec& spec, const Matrix<double>& w,
                             std::span<const ColumnKind> kinds, double h);

//! Symmetric n x n matrix of psi(X_i - X_j) with a zero diagonal.
Matrix<double> psi_matrix(const PsiSpec& spec, const Matrix<double>& x);

//! Joint kernel over (W, X) smoothing both blocks with the same bandwidth:
//! h^{-(p_c+q)} K(||(W_ic - W_jc, X_i - X_j)|| / h) 1{W_id = W_jd}.
//! All columns of x must be continuous.
Matrix<double> joint_kernel_matrix(const KernelSpec& spec,
                                   const Matrix<double>& w,
                                   std::span<const ColumnKind> w_kinds,
                                   const Matrix<double>& x, double h);

} // namespace covsig
