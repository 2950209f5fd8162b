#include "covsig/selfcheck.hpp"

#include "covsig/bootstrap.hpp"
#include "covsig/oracle.hpp"
#include "covsig/pairwise_cache.hpp"
#include "covsig/simulation.hpp"
#include "covsig/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace covsig {

CheckCase make_check_case(Index n, Index q, int k, Rng& rng)
{
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> level(0, 2);
  std::uniform_real_distribution<double> band(0.9, 2.0);

  const PsiSpec::Family families[] = {PsiSpec::Family::normal_on_norm,
                                      PsiSpec::Family::triangular_on_norm,
                                      PsiSpec::Family::indicator};
  CheckCase out;
  out.psi.family = families[k % 3];
  const bool discrete_x = out.psi.family == PsiSpec::Family::indicator;
  const bool discrete_w = k % 2 == 1;

  const Index p = discrete_w ? 3 : 2;
  Vector<double> y(n);
  Matrix<double> w(n, p), x(n, q);
  for (Index i = 0; i < n; ++i) {
    w(i, 0) = normal(rng);
    w(i, 1) = normal(rng);
    if (discrete_w) {
      w(i, 2) = level(rng) == 0 ? 0.0 : 1.0;
    }
    for (Index j = 0; j < q; ++j) {
      x(i, j) = discrete_x ? static_cast<double>(level(rng)) : normal(rng);
    }
    y(i) = w(i, 0) - w(i, 1) * w(i, 1) + 0.8 * x.row(i).sum() +
           (0.5 + std::abs(w(i, 0))) * normal(rng);
  }
  std::vector<ColumnKind> w_kinds(p, ColumnKind::continuous);
  if (discrete_w) {
    w_kinds[2] = ColumnKind::discrete;
  }
  std::vector<ColumnKind> x_kinds(
    q, discrete_x ? ColumnKind::discrete : ColumnKind::continuous);
  out.data = make_dataset(y, w, x, w_kinds, x_kinds);
  out.g = band(rng);
  out.h = band(rng);
  return out;
}

bool nearly_equal(double a, double b, double rel, double abs_floor)
{
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= std::max(abs_floor, rel * scale);
}

namespace {

class Recorder
{
public:
  explicit Recorder(std::string name) { outcome_.name = std::move(name); }

  void expect(bool ok, const std::string& what)
  {
    if (!ok && outcome_.passed) {
      outcome_.passed = false;
      outcome_.detail = what;
    }
  }

  void expect_close(double fast, double reference, const std::string& what,
                    double rel = 1e-10, double abs_floor = 1e-12)
  {
    if (!nearly_equal(fast, reference, rel, abs_floor)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << what << ": " << fast << " vs " << reference;
      expect(false, msg.str());
    }
  }

  CheckOutcome done() const { return outcome_; }

private:
  CheckOutcome outcome_;
};

std::string tag(Index n, int k, std::uint64_t seed)
{
  return "n=" + std::to_string(n) + " case=" + std::to_string(k) +
         " seed=" + std::to_string(seed);
}

} // namespace

CheckOutcome check_oracle_equivalence(const SelfCheckOptions& opt)
{
  Recorder rec("oracle equivalence (n = 6, 8, 10)");
  const KernelSpec K;
  for (Index n : {6, 8, 10}) {
    for (int k = 0; k < opt.cases_per_size; ++k) {
      Rng rng = make_stream(opt.seed, {100, static_cast<std::uint64_t>(n),
                                       static_cast<std::uint64_t>(k)});
      const CheckCase cc = make_check_case(n, 1 + k % 2, k, rng);
      const ScaledDataset sd = standardize(cc.data);
      const auto& y = sd.data.y;
      const std::string where = tag(n, k, opt.seed);

      const auto Lw = oracle::smoothing_weight(sd, cc.g, K);
      const auto Mw = oracle::test_weight(sd, cc.h, K, cc.psi);
      const SmootherOutput sm = compute_smoother(sd, cc.g, K);
      const SmootherOutput sm_ref = oracle::smoother(y, Lw);
      for (Index i = 0; i < n; ++i) {
        rec.expect_close(sm.uf(i), sm_ref.uf(i), "smoother uf " + where);
        rec.expect_close(sm.fhat(i), sm_ref.fhat(i), "smoother fhat " + where);
      }

      const Index pc = sd.data.p_continuous();
      rec.expect_close(stat_ihat(sm, sd, cc.h, K, cc.psi), oracle::ihat(y, Lw, Mw),
                       "ihat " + where);
      rec.expect_close(stat_itilde(sm, sd, cc.h, K, cc.psi), oracle::itilde(y, Lw, Mw),
                       "itilde " + where);
      const DiagonalTerms fast = diagonal_terms(sm, sd, cc.h, K, cc.psi);
      const DiagonalTerms ref = oracle::diagonal_terms(y, Lw, Mw);
      rec.expect_close(fast.v1, ref.v1, "V1 " + where);
      rec.expect_close(fast.v2, ref.v2, "V2 " + where);
      rec.expect_close(fast.v3, ref.v3, "V3 " + where);
      rec.expect_close(var_hat(sm, sd, cc.h, K, cc.psi),
                       oracle::var_hat(y, Lw, Mw, cc.h, pc), "var_hat " + where);
      if (n >= 7) {
        rec.expect_close(var_tilde(sm, sd, cc.h, K, cc.psi),
                         oracle::var_tilde_exact(y, Lw, Mw, cc.h, pc),
                         "var_tilde " + where);
      }
      rec.expect_close(dgm_statistic(sm, sd), oracle::dgm(sd, sm_ref.uf), "dgm " + where);

      if (sd.data.q_continuous() == sd.data.q()) {
        const auto Jw = oracle::joint_weight(sd, cc.h, K);
        const StatisticValue lv = lv_statistic(sm, sd, cc.h, K);
        rec.expect_close(lv.raw, oracle::itilde(y, Lw, Jw), "lv raw " + where);
        rec.expect_close(lv.variance,
                         oracle::var_hat(y, Lw, Jw, cc.h, pc + sd.data.q()),
                         "lv variance " + where);
      }
    }
  }
  return rec.done();
}

CheckOutcome check_decomposition_identity(const SelfCheckOptions& opt)
{
  Recorder rec("decomposition identity (n = 8, brute force)");
  const double v2_coefficient = opt.corrupt_decomposition ? 2.5 : 2.0;
  const KernelSpec K;
  const Index n = 8;
  for (int k = 0; k < opt.cases_per_size; ++k) {
    Rng rng = make_stream(opt.seed, {200, static_cast<std::uint64_t>(k)});
    const CheckCase cc = make_check_case(n, 1 + k % 2, k, rng);
    const ScaledDataset sd = standardize(cc.data);
    const auto Lw = oracle::smoothing_weight(sd, cc.g, K);
    const auto Mw = oracle::test_weight(sd, cc.h, K, cc.psi);
    const auto& y = sd.data.y;
    const double lhs = arrangements(n, 4) * oracle::itilde(y, Lw, Mw);
    const DiagonalTerms v = oracle::diagonal_terms(y, Lw, Mw);
    const double rhs = n * std::pow(n - 1.0, 3) * oracle::ihat(y, Lw, Mw) -
                       arrangements(n, 3) * v.v1 -
                       v2_coefficient * arrangements(n, 3) * v.v2 +
                       arrangements(n, 2) * v.v3;
    rec.expect_close(lhs, rhs, "identity " + tag(n, k, opt.seed));
  }
  return rec.done();
}

namespace {

Dataset permuted(const Dataset& d, const std::vector<Index>& order)
{
  Dataset out = d;
  for (Index i = 0; i < d.n(); ++i) {
    out.y(i) = d.y(order[i]);
    out.w.row(i) = d.w.row(order[i]);
    out.x.row(i) = d.x.row(order[i]);
  }
  return out;
}

struct Snapshot
{
  double ihat, itilde, omega_hat, t_tilde, t_hat;
};

Snapshot snapshot(const Dataset& d, const Bandwidths& bw)
{
  const ScaledDataset sd = standardize(d);
  const PsiSpec psi;
  const PairwiseCache tilde(sd, StatisticKind::itilde, KernelSpec{}, psi, bw);
  const PairwiseCache hat(sd, StatisticKind::ihat, KernelSpec{}, psi, bw);
  const SmootherOutput sm = tilde.smooth(sd.data.y);
  const Evaluation et = tilde.evaluate(sm, sd.data.y, VarianceKind::var_hat);
  const Evaluation eh = hat.evaluate(sm, sd.data.y, VarianceKind::var_hat);
  return {eh.value.raw, et.value.raw, et.value.variance, et.value.standardized,
          eh.value.standardized};
}

} // namespace

CheckOutcome check_invariances(const SelfCheckOptions& opt)
{
  Recorder rec("invariance suite (n = 50)");
  Rng rng = make_stream(opt.seed, {300});
  const DgpSpec spec{DgpFamily::continuous, 2, Alternative::quadratic, 0.8, 50};
  const Dataset d = generate(spec, rng);
  const Bandwidths bw = default_bandwidths(d.n(), 2.0);
  const Snapshot base = snapshot(d, bw);

  Dataset shifted = d;
  shifted.y.array() += 3.7;
  const Snapshot s = snapshot(shifted, bw);
  rec.expect_close(s.ihat, base.ihat, "Y shift ihat");
  rec.expect_close(s.itilde, base.itilde, "Y shift itilde");
  rec.expect_close(s.omega_hat, base.omega_hat, "Y shift var_hat");

  const double lambda = 2.5;
  Dataset scaled = d;
  scaled.y *= lambda;
  const Snapshot sc = snapshot(scaled, bw);
  rec.expect_close(sc.itilde, lambda * lambda * base.itilde, "Y scale itilde");
  rec.expect_close(sc.omega_hat, std::pow(lambda, 4) * base.omega_hat, "Y scale var_hat");
  rec.expect_close(sc.t_tilde, base.t_tilde, "Y scale T_n");

  Dataset rescaled = d;
  rescaled.w.col(0) *= 3.0;
  rescaled.x.col(1) *= 0.2;
  const Snapshot rs = snapshot(rescaled, bw);
  rec.expect_close(rs.t_tilde, base.t_tilde, "covariate rescaling T_n (itilde)");
  rec.expect_close(rs.t_hat, base.t_hat, "covariate rescaling T_n (ihat)");

  std::vector<Index> order(static_cast<std::size_t>(d.n()));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  const Snapshot ps = snapshot(permuted(d, order), bw);
  rec.expect_close(ps.ihat, base.ihat, "permutation ihat");
  rec.expect_close(ps.itilde, base.itilde, "permutation itilde");
  rec.expect_close(ps.omega_hat, base.omega_hat, "permutation var_hat");

  TestConfig cfg;
  cfg.multipliers.law = MultiplierLaw::Law::constant_one;
  cfg.B = 5;
  cfg.bandwidths = bw;
  const TestResult r = run_test(d, cfg);
  for (double draw : r.bootstrap_draws) {
    rec.expect_close(draw, r.statistic.standardized, "eta = 1 bootstrap draw", 1e-12);
  }
  return rec.done();
}

CheckOutcome check_multiplier_moments(const SelfCheckOptions& opt)
{
  Recorder rec("multiplier law moments");
  const double p = MultiplierLaw::low_probability();
  const double a = MultiplierLaw::low_value();
  const double b = MultiplierLaw::high_value();
  auto moment = [&](int k) { return p * std::pow(a, k) + (1 - p) * std::pow(b, k); };
  rec.expect_close(p + (1 - p), 1.0, "probabilities sum", 0, 1e-15);
  rec.expect_close(moment(1), 0.0, "analytic mean", 0, 1e-14);
  rec.expect_close(moment(2), 1.0, "analytic second moment", 0, 1e-14);
  rec.expect_close(moment(3), 1.0, "analytic third moment", 0, 1e-14);

  const Index draws = 1'000'000;
  Rng rng = make_stream(opt.seed, {400});
  const auto eta = draw_multipliers(draws, MultiplierLaw{}, rng);
  double m1 = 0, m2 = 0, m3 = 0;
  for (double e : eta) {
    m1 += e;
    m2 += e * e;
    m3 += e * e * e;
  }
  const double N = static_cast<double>(draws);
  m1 /= N;
  m2 /= N;
  m3 /= N;
  const double se1 = std::sqrt((moment(2) - 0.0) / N);
  const double se2 = std::sqrt((moment(4) - 1.0) / N);
  const double se3 = std::sqrt((moment(6) - 1.0) / N);
  rec.expect(std::abs(m1 - 0.0) <= 4 * se1, "empirical mean " + std::to_string(m1));
  rec.expect(std::abs(m2 - 1.0) <= 4 * se2, "empirical 2nd moment " + std::to_string(m2));
  rec.expect(std::abs(m3 - 1.0) <= 4 * se3, "empirical 3rd moment " + std::to_string(m3));
  return rec.done();
}

std::vector<CheckOutcome> run_selfcheck(const SelfCheckOptions& options)
{
  return {check_oracle_equivalence(options), check_decomposition_identity(options),
          check_invariances(options), check_multiplier_moments(options)};
}

} // namespace covsig
