#pragma once

#include <Eigen/Core>

#include <cmath>

namespace covsig {

//! Neumaier-compensated accumulator.
template <typename Scalar = double>
class CompensatedSum
{
public:
  CompensatedSum& operator+=(Scalar x)
  {
    Scalar t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  CompensatedSum& operator+=(const CompensatedSum& other)
  {
    *this += other.sum_;
    *this += other.comp_;
    return *this;
  }

  Scalar value() const { return sum_ + comp_; }

private:
  Scalar sum_ = 0;
  Scalar comp_ = 0;
};

//! Compensated sum of all coefficients of a dense expression, column by
//! column. Coefficients are read through coeff(), so pass cheap
//! coefficient-wise expressions and evaluate products beforehand.
template <typename Derived>
typename Derived::Scalar compensated_sum(const Eigen::DenseBase<Derived>& expr)
{
  using Scalar = typename Derived::Scalar;
  const Derived& values = expr.derived();
  CompensatedSum<Scalar> acc;
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    CompensatedSum<Scalar> column;
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      column += values(i, j);
    }
    acc += column;
  }
  return acc.value();
}

} // namespace covsig
