#pragma once

#include "covsig/dataset.hpp"
#include "covsig/kernels.hpp"
#include "covsig/types.hpp"

namespace covsig {

//! Leave-one-out kernel estimates at each observation. rhat is NaN where
//! fhat is zero (no neighbour within the kernel support).
struct SmootherOutput
{
  Vector<double> fhat;
  Vector<double> rhat;
  Vector<double> uf; //!< uhat_i fhat_i = (n-1)^{-1} sum_{k != i} (Y_i - Y_k) L_nik
  //! L_nik with a zero diagonal; empty when the smoother streamed rows.
  Matrix<double> pairwise_L;

  bool materialized() const { return pairwise_L.size() > 0; }
  bool rhat_defined() const { return (fhat.array() > 0.0).all(); }
};

struct SmootherOptions
{
  //! Largest n for which the n x n matrix of L_nik is kept.
  Index materialize_limit = 4000;
};

//! Estimation-kernel matrix g^{-p_c} L((W_i - W_k)/g) 1{W_id = W_kd}.
Matrix<double> smoothing_matrix(const ScaledDataset& d, double g,
                                const KernelSpec& L);

SmootherOutput compute_smoother(const ScaledDataset& d, double g,
                                const KernelSpec& L,
                                const SmootherOptions& options = {});

//! Same estimates from a precomputed L matrix and an arbitrary response.
SmootherOutput smoother_from_matrix(const Vector<double>& y,
                                    const Matrix<double>& L);

} // namespace covsig
