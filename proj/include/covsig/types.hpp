#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace covsig {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Eigen::Index;

//! Raised when inputs violate a documented precondition.
class InvalidInput : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

//! Raised when the test cannot be carried out on the given data (zero
//! variance estimate, isolated observations, ...).
class DegenerateTest : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! Number of arrangements of m distinct elements among n, n(n-1)...(n-m+1).
inline double arrangements(Index n, int m)
{
  double out = 1.0;
  for (int k = 0; k < m; ++k) {
    out *= static_cast<double>(n - k);
  }
  return out;
}

} // namespace covsig
