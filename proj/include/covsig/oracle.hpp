#pragma once

// Brute-force enumeration of the arrangement sums, written straight from
// their definitions with scalar loops. Intended for small n (<= 10) as an
// independent check of the matrix fast paths.

#include "covsig/dataset.hpp"
#include "covsig/kernels.hpp"
#include "covsig/statistics.hpp"

#include <functional>

namespace covsig::oracle {

using PairWeight = std::function<double(Index, Index)>;

PairWeight smoothing_weight(const ScaledDataset& d, double g, const KernelSpec& L);
PairWeight test_weight(const ScaledDataset& d, double h, const KernelSpec& K,
                       const PsiSpec& psi);
PairWeight joint_weight(const ScaledDataset& d, double h, const KernelSpec& K);

//! fhat, rhat, uf by direct leave-one-out loops.
SmootherOutput smoother(const Vector<double>& y, const PairWeight& L);

//! [n^(2) (n-1)^2]^{-1} sum_{i != j} sum_{k != i} sum_{l != j}
//! (Y_i - Y_k)(Y_j - Y_l) L_ik L_jl M_ij.
double ihat(const Vector<double>& y, const PairWeight& L, const PairWeight& M);

//! Average over arrangements of four distinct indices.
double itilde(const Vector<double>& y, const PairWeight& L, const PairWeight& M);

DiagonalTerms diagonal_terms(const Vector<double>& y, const PairWeight& L,
                             const PairWeight& M);

//! (2 h^d / n^(2)) sum_{i != j} uf_i^2 uf_j^2 M_ij^2 with uf from loops.
double var_hat(const Vector<double>& y, const PairWeight& L, const PairWeight& M,
               double h, Index rate_dimension);

//! Exact average over arrangements of six distinct indices.
double var_tilde_exact(const Vector<double>& y, const PairWeight& L,
                       const PairWeight& M, double h, Index rate_dimension);

double dgm(const ScaledDataset& d, const Vector<double>& uf);

} // namespace covsig::oracle
