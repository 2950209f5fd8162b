#pragma once

// Pair-matrix reductions behind the test statistics. Every pair matrix
// (L, M = K psi, M2 = M o M) is symmetric with a zero diagonal, so sums over
// all (i, j) are sums over arrangements i != j.

#include "covsig/summation.hpp"
#include "covsig/types.hpp"

namespace covsig {

//! D_ik = (y_i - y_k) L_ik. Row sums give (n-1) uhat_i fhat_i.
template <typename DerivedY, typename DerivedL>
Matrix<typename DerivedY::Scalar>
residual_products(const Eigen::MatrixBase<DerivedY>& y,
                  const Eigen::MatrixBase<DerivedL>& L)
{
  using Scalar = typename DerivedY::Scalar;
  const Index n = y.size();
  Matrix<Scalar> d(n, n);
  for (Index k = 0; k < n; ++k) {
    d.col(k) = (y.array() - y(k)).matrix().cwiseProduct(L.col(k));
  }
  return d;
}

//! Sum over i != j of a_i b_j M_ij.
template <typename DerivedA, typename DerivedB, typename DerivedM>
typename DerivedM::Scalar
weighted_pair_sum(const Eigen::MatrixBase<DerivedA>& a,
                  const Eigen::MatrixBase<DerivedB>& b,
                  const Eigen::MatrixBase<DerivedM>& M)
{
  return compensated_sum(a.asDiagonal() * M * b.asDiagonal());
}

//! Unnormalized diagonal sums n^(3) V1, n^(3) V2 and n^(2) V3 for the
//! residual products D with row sums S.
template <typename Scalar>
struct DiagonalSums
{
  Scalar v1 = 0;
  Scalar v2 = 0;
  Scalar v3 = 0;
};

template <typename DerivedD, typename DerivedS, typename DerivedM>
DiagonalSums<typename DerivedD::Scalar>
diagonal_sums(const Eigen::MatrixBase<DerivedD>& D,
              const Eigen::MatrixBase<DerivedS>& S,
              const Eigen::MatrixBase<DerivedM>& M)
{
  using Scalar = typename DerivedD::Scalar;
  DiagonalSums<Scalar> out;
  // V1: sum_k sum_{i != j} D_ik D_jk M_ij; D_kk = 0 keeps k distinct.
  const Matrix<Scalar> MD = M * D;
  out.v1 = compensated_sum(MD.cwiseProduct(D));
  // V3: sum_{i != j} D_ij^2 M_ij.
  out.v3 = compensated_sum(D.cwiseAbs2().cwiseProduct(M));
  // V2: sum_{i != j} D_ij M_ij (S_j - D_ji), with D_ji = -D_ij.
  out.v2 = compensated_sum(D.cwiseProduct(M) * S.asDiagonal()) + out.v3;
  return out;
}

//! n^(4) Itilde from the leave-one-out sums and the diagonal sums.
template <typename DerivedS, typename DerivedM, typename Scalar>
Scalar itilde_sum(const Eigen::MatrixBase<DerivedS>& S,
                  const Eigen::MatrixBase<DerivedM>& M,
                  const DiagonalSums<Scalar>& diag)
{
  CompensatedSum<Scalar> acc;
  acc += weighted_pair_sum(S, S, M);
  acc += -diag.v1;
  acc += -2 * diag.v2;
  acc += diag.v3;
  return acc.value();
}

//! Sum behind the six-index variance estimator,
//! sum_{i != j} M2_ij sum D_ik D_ik' D_jl D_jl' over k, k', l, l' distinct
//! and outside {i, j}. For each pair the inner sum is expanded by
//! inclusion-exclusion over coincidences between {k, k'} and {l, l'};
//! the mixed power sums over the shared index are rows of D D^T style
//! products, so the whole sum costs four n x n matrix products.
template <typename DerivedD, typename DerivedM2>
typename DerivedD::Scalar
var_tilde_sum(const Eigen::MatrixBase<DerivedD>& D,
              const Eigen::MatrixBase<DerivedM2>& M2)
{
  using Scalar = typename DerivedD::Scalar;
  const Matrix<Scalar> D2 = D.cwiseAbs2();
  const Vector<Scalar> S = D.rowwise().sum();
  const Vector<Scalar> Q = D2.rowwise().sum();
  // Row i of D vanishes at i (D_ii = 0) and row j at j, so the mixed sums
  // over the shared index need no correction for membership in {i, j}.
  const Matrix<Scalar> ab = D * D.transpose();
  const Matrix<Scalar> ab2 = D * D2.transpose();
  const Matrix<Scalar> a2b = D2 * D.transpose();
  const Matrix<Scalar> a2b2 = D2 * D2.transpose();
  const Index n = D.rows();
  CompensatedSum<Scalar> acc;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (i == j || M2(i, j) == Scalar(0)) {
        continue;
      }
      const Scalar dij = D(i, j);
      const Scalar a1 = S(i) - dij;
      const Scalar b1 = S(j) + dij;
      const Scalar pa = a1 * a1 - (Q(i) - dij * dij);
      const Scalar pb = b1 * b1 - (Q(j) - dij * dij);
      const Scalar c = ab(i, j);
      const Scalar one_shared =
        a1 * b1 * c - a1 * ab2(i, j) - b1 * a2b(i, j) + 2 * a2b2(i, j) - c * c;
      const Scalar two_shared = c * c - a2b2(i, j);
      acc += (pa * pb - 4 * one_shared - 2 * two_shared) * M2(i, j);
    }
  }
  return acc.value();
}

} // namespace covsig
