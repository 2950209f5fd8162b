#include "covsig/smoother.hpp"

#include "covsig/summation.hpp"

#include <limits>

namespace covsig {

Matrix<double> smoothing_matrix(const ScaledDataset& d, double g,
                                const KernelSpec& L)
{
  return kernel_matrix(L, d.data.w, d.data.w_kinds, g);
}

namespace {

void finish(SmootherOutput& out, const Vector<double>& y,
            const Vector<double>& weight_sum, const Vector<double>& y_weight_sum,
            const Vector<double>& diff_sum)
{
  const Index n = y.size();
  const double denom = static_cast<double>(n - 1);
  out.fhat = weight_sum / denom;
  out.uf = diff_sum / denom;
  out.rhat.resize(n);
  for (Index i = 0; i < n; ++i) {
    out.rhat(i) = weight_sum(i) > 0.0
                    ? y_weight_sum(i) / weight_sum(i)
                    : std::numeric_limits<double>::quiet_NaN();
  }
}

} // namespace

SmootherOutput smoother_from_matrix(const Vector<double>& y,
                                    const Matrix<double>& L)
{
  const Index n = y.size();
  if (n < 3) {
    throw InvalidInput("leave-one-out smoothing needs n >= 3");
  }
  Vector<double> weight_sum(n), y_weight_sum(n), diff_sum(n);
  for (Index i = 0; i < n; ++i) {
    CompensatedSum<double> w, yw, dw;
    for (Index k = 0; k < n; ++k) {
      const double l = L(k, i);
      if (k == i || l == 0.0) {
        continue;
      }
      w += l;
      yw += y(k) * l;
      dw += (y(i) - y(k)) * l;
    }
    weight_sum(i) = w.value();
    y_weight_sum(i) = yw.value();
    diff_sum(i) = dw.value();
  }
  SmootherOutput out;
  finish(out, y, weight_sum, y_weight_sum, diff_sum);
  out.pairwise_L = L;
  return out;
}

SmootherOutput compute_smoother(const ScaledDataset& d, double g,
                                const KernelSpec& L,
                                const SmootherOptions& options)
{
  d.data.validate(3);
  if (!(g > 0.0)) {
    throw InvalidInput("estimation bandwidth g must be positive");
  }
  const Index n = d.data.n();
  if (n <= options.materialize_limit) {
    return smoother_from_matrix(d.data.y, smoothing_matrix(d, g, L));
  }

  // Streaming: one kernel row at a time.
  const auto& w = d.data.w;
  const auto& y = d.data.y;
  Vector<double> weight_sum(n), y_weight_sum(n), diff_sum(n);
  Vector<double> diff(w.cols());
  for (Index i = 0; i < n; ++i) {
    CompensatedSum<double> ws, yw, dw;
    for (Index k = 0; k < n; ++k) {
      if (k == i) {
        continue;
      }
      diff = (w.row(i) - w.row(k)).transpose();
      const double l = eval_mixed_kernel(L, diff, d.data.w_kinds, g);
      if (l == 0.0) {
        continue;
      }
      ws += l;
      yw += y(k) * l;
      dw += (y(i) - y(k)) * l;
    }
    weight_sum(i) = ws.value();
    y_weight_sum(i) = yw.value();
    diff_sum(i) = dw.value();
  }
  SmootherOutput out;
  finish(out, y, weight_sum, y_weight_sum, diff_sum);
  return out;
}

} // namespace covsig
