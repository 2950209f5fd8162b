#include "covsig/oracle.hpp"

#include <cmath>

namespace covsig::oracle {

namespace {

double row_diff_kernel(const KernelSpec& K, const Matrix<double>& m,
                       std::span<const ColumnKind> kinds, Index i, Index j,
                       double h)
{
  Vector<double> diff = (m.row(i) - m.row(j)).transpose();
  return eval_mixed_kernel(K, diff, kinds, h);
}

} // namespace

PairWeight smoothing_weight(const ScaledDataset& d, double g, const KernelSpec& L)
{
  return [&d, g, L](Index i, Index k) {
    return row_diff_kernel(L, d.data.w, d.data.w_kinds, i, k, g);
  };
}

PairWeight test_weight(const ScaledDataset& d, double h, const KernelSpec& K,
                       const PsiSpec& psi)
{
  return [&d, h, K, psi](Index i, Index j) {
    const double k = row_diff_kernel(K, d.data.w, d.data.w_kinds, i, j, h);
    Vector<double> xd = (d.data.x.row(i) - d.data.x.row(j)).transpose();
    return k * eval_psi(psi, xd);
  };
}

PairWeight joint_weight(const ScaledDataset& d, double h, const KernelSpec& K)
{
  return [&d, h, K](Index i, Index j) {
    // Written out independently of joint_kernel_matrix: squared norm over
    // continuous W and all X columns, indicator over discrete W.
    double r2 = 0.0;
    int dim = 0;
    for (Index c = 0; c < d.data.p(); ++c) {
      const double diff = d.data.w(i, c) - d.data.w(j, c);
      if (d.data.w_kinds[c] == ColumnKind::discrete) {
        if (diff != 0.0) {
          return 0.0;
        }
      } else {
        r2 += (diff / h) * (diff / h);
        ++dim;
      }
    }
    for (Index c = 0; c < d.data.q(); ++c) {
      const double diff = d.data.x(i, c) - d.data.x(j, c);
      r2 += (diff / h) * (diff / h);
      ++dim;
    }
    (void)K;
    return r2 < 1.0 ? 0.75 * (1.0 - r2) / std::pow(h, dim) : 0.0;
  };
}

SmootherOutput smoother(const Vector<double>& y, const PairWeight& L)
{
  const Index n = y.size();
  SmootherOutput out;
  out.fhat.resize(n);
  out.rhat.resize(n);
  out.uf.resize(n);
  for (Index i = 0; i < n; ++i) {
    double f = 0.0, ry = 0.0, u = 0.0;
    for (Index k = 0; k < n; ++k) {
      if (k == i) {
        continue;
      }
      const double l = L(i, k);
      f += l;
      ry += y(k) * l;
      u += (y(i) - y(k)) * l;
    }
    out.fhat(i) = f / static_cast<double>(n - 1);
    out.rhat(i) = f > 0.0 ? ry / f : std::nan("");
    out.uf(i) = u / static_cast<double>(n - 1);
  }
  return out;
}

double ihat(const Vector<double>& y, const PairWeight& L, const PairWeight& M)
{
  const Index n = y.size();
  double total = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double m = M(i, j);
      for (Index k = 0; k < n; ++k) {
        if (k == i) continue;
        for (Index l = 0; l < n; ++l) {
          if (l == j) continue;
          total += (y(i) - y(k)) * (y(j) - y(l)) * L(i, k) * L(j, l) * m;
        }
      }
    }
  const double nm1 = static_cast<double>(n - 1);
  return total / (arrangements(n, 2) * nm1 * nm1);
}

double itilde(const Vector<double>& y, const PairWeight& L, const PairWeight& M)
{
  const Index n = y.size();
  double total = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double m = M(i, j);
      for (Index k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        for (Index l = 0; l < n; ++l) {
          if (l == i || l == j || l == k) continue;
          total += (y(i) - y(k)) * (y(j) - y(l)) * L(i, k) * L(j, l) * m;
        }
      }
    }
  return total / arrangements(n, 4);
}

DiagonalTerms diagonal_terms(const Vector<double>& y, const PairWeight& L,
                             const PairWeight& M)
{
  const Index n = y.size();
  double v1 = 0.0, v2 = 0.0, v3 = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double m = M(i, j);
      v3 += (y(i) - y(j)) * (y(i) - y(j)) * L(i, j) * L(i, j) * m;
      for (Index k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        v1 += (y(i) - y(k)) * (y(j) - y(k)) * L(i, k) * L(j, k) * m;
        v2 += (y(i) - y(j)) * (y(j) - y(k)) * L(i, j) * L(j, k) * m;
      }
    }
  return {v1 / arrangements(n, 3), v2 / arrangements(n, 3), v3 / arrangements(n, 2)};
}

double var_hat(const Vector<double>& y, const PairWeight& L, const PairWeight& M,
               double h, Index rate_dimension)
{
  const Index n = y.size();
  const SmootherOutput sm = smoother(y, L);
  double total = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double m = M(i, j);
      total += sm.uf(i) * sm.uf(i) * sm.uf(j) * sm.uf(j) * m * m;
    }
  return 2.0 * std::pow(h, rate_dimension) * total / arrangements(n, 2);
}

double var_tilde_exact(const Vector<double>& y, const PairWeight& L,
                       const PairWeight& M, double h, Index rate_dimension)
{
  const Index n = y.size();
  Matrix<double> Lm(n, n), Mm(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      Lm(i, j) = i == j ? 0.0 : L(i, j);
      Mm(i, j) = i == j ? 0.0 : M(i, j);
    }
  auto used = [](std::initializer_list<Index> idx, Index v) {
    for (Index u : idx) {
      if (u == v) return true;
    }
    return false;
  };
  double total = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (j == i || Mm(i, j) == 0.0) continue;
      const double m2 = Mm(i, j) * Mm(i, j);
      for (Index k = 0; k < n; ++k) {
        if (used({i, j}, k)) continue;
        for (Index kp = 0; kp < n; ++kp) {
          if (used({i, j, k}, kp)) continue;
          const double a = (y(i) - y(k)) * (y(i) - y(kp)) * Lm(i, k) * Lm(i, kp);
          if (a == 0.0) continue;
          for (Index l = 0; l < n; ++l) {
            if (used({i, j, k, kp}, l)) continue;
            for (Index lp = 0; lp < n; ++lp) {
              if (used({i, j, k, kp, l}, lp)) continue;
              total += a * (y(j) - y(l)) * (y(j) - y(lp)) * Lm(j, l) * Lm(j, lp) * m2;
            }
          }
        }
      }
    }
  return 2.0 * std::pow(h, rate_dimension) * total / arrangements(n, 6);
}

double dgm(const ScaledDataset& d, const Vector<double>& uf)
{
  const Index n = d.data.n();
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    double inner = 0.0;
    for (Index j = 0; j < n; ++j) {
      bool below = true;
      for (Index c = 0; c < d.data.p(); ++c) below = below && d.data.w(j, c) <= d.data.w(i, c);
      for (Index c = 0; c < d.data.q(); ++c) below = below && d.data.x(j, c) <= d.data.x(i, c);
      if (below) inner += uf(j);
    }
    total += inner * inner;
  }
  return total;
}

} // namespace covsig::oracle
