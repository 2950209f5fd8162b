#include "covsig/kernels.hpp"

#include <vector>

namespace covsig {

Bandwidths default_bandwidths(Index n, double c)
{
  if (n < 2) {
    throw InvalidInput("bandwidth rule needs n >= 2");
  }
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw InvalidInput("bandwidth factor c must be positive");
  }
  const double nd = static_cast<double>(n);
  return {std::pow(nd, -1.0 / 6.0), c * std::pow(nd, -2.1 / 6.0), c};
}

std::string to_string(PsiSpec::Family family)
{
  switch (family) {
    case PsiSpec::Family::triangular_on_norm: return "triangular";
    case PsiSpec::Family::normal_on_norm: return "normal";
    case PsiSpec::Family::indicator: return "indicator";
  }
  return "unknown";
}

PsiSpec::Family parse_psi_family(const std::string& name)
{
  if (name == "triangular") return PsiSpec::Family::triangular_on_norm;
  if (name == "normal") return PsiSpec::Family::normal_on_norm;
  if (name == "indicator") return PsiSpec::Family::indicator;
  throw InvalidInput("unknown psi family '" + name + "'");
}

Matrix<double> kernel_matrix(const KernelSpec& spec, const Matrix<double>& w,
                             std::span<const ColumnKind> kinds, double h)
{
  if (!(h > 0.0)) {
    throw InvalidInput("bandwidth must be positive");
  }
  const Index n = w.rows();
  Matrix<double> out = Matrix<double>::Zero(n, n);
  Vector<double> diff(w.cols());
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      diff = (w.row(i) - w.row(j)).transpose();
      const double v = eval_mixed_kernel(spec, diff, kinds, h);
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

Matrix<double> psi_matrix(const PsiSpec& spec, const Matrix<double>& x)
{
  const Index n = x.rows();
  Matrix<double> out = Matrix<double>::Zero(n, n);
  Vector<double> diff(x.cols());
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      diff = (x.row(i) - x.row(j)).transpose();
      const double v = eval_psi(spec, diff);
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

Matrix<double> joint_kernel_matrix(const KernelSpec& spec,
                                   const Matrix<double>& w,
                                   std::span<const ColumnKind> w_kinds,
                                   const Matrix<double>& x, double h)
{
  const Index n = w.rows();
  Matrix<double> joint(n, w.cols() + x.cols());
  joint << w, x;
  std::vector<ColumnKind> kinds(w_kinds.begin(), w_kinds.end());
  kinds.insert(kinds.end(), x.cols(), ColumnKind::continuous);
  return kernel_matrix(spec, joint, kinds, h);
}

} // namespace covsig
