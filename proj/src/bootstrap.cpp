#include "covsig/bootstrap.hpp"

#include "covsig/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace covsig {

double MultiplierLaw::low_value()
{
  return (1.0 - std::sqrt(5.0)) / 2.0;
}

double MultiplierLaw::high_value()
{
  return (1.0 + std::sqrt(5.0)) / 2.0;
}

double MultiplierLaw::low_probability()
{
  return (5.0 + std::sqrt(5.0)) / 10.0;
}

void TestConfig::validate() const
{
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("alpha must lie in (0, 1)");
  }
  if (critical == CriticalMethod::bootstrap && B < 1) {
    throw InvalidInput("bootstrap needs B >= 1");
  }
  if (statistic == StatisticKind::dgm && critical != CriticalMethod::bootstrap) {
    throw InvalidInput("the Cramer-von Mises statistic is not pivotal; "
                       "use bootstrap critical values");
  }
  if (bandwidths) {
    if (!(bandwidths->g > 0.0) || !(bandwidths->h > 0.0)) {
      throw InvalidInput("bandwidths g and h must be positive");
    }
  } else if (!(c > 0.0)) {
    throw InvalidInput("bandwidth factor c must be positive");
  }
  if (threads < 1) {
    throw InvalidInput("thread count must be positive");
  }
}

std::vector<double> draw_multipliers(Index n, const MultiplierLaw& law, Rng& rng)
{
  if (n < 1) {
    throw InvalidInput("need at least one multiplier");
  }
  std::vector<double> eta(static_cast<std::size_t>(n));
  switch (law.law) {
    case MultiplierLaw::Law::mammen_two_point: {
      std::bernoulli_distribution low(MultiplierLaw::low_probability());
      const double a = MultiplierLaw::low_value();
      const double b = MultiplierLaw::high_value();
      for (auto& e : eta) {
        e = low(rng) ? a : b;
      }
      break;
    }
    case MultiplierLaw::Law::constant_one:
      std::fill(eta.begin(), eta.end(), 1.0);
      break;
  }
  return eta;
}

Vector<double> resample_response(const SmootherOutput& sm,
                                 const Vector<double>& y,
                                 const std::vector<double>& eta,
                                 IsolatedPolicy isolated)
{
  const Index n = y.size();
  if (static_cast<Index>(eta.size()) != n || sm.rhat.size() != n) {
    throw InvalidInput("multipliers, smoother output and response differ in length");
  }
  if (isolated == IsolatedPolicy::reject && !sm.rhat_defined()) {
    throw DegenerateTest("some observations have no neighbour within the "
                         "estimation bandwidth; increase g or drop isolated "
                         "observation");
  }
  Vector<double> out(n);
  for (Index i = 0; i < n; ++i) {
    if (std::isnan(sm.rhat(i))) {
      out(i) = y(i);
      continue;
    }
    // Written as Y + (eta - 1) uhat so that eta = 1 returns Y unchanged.
    out(i) = y(i) + (eta[static_cast<std::size_t>(i)] - 1.0) * (y(i) - sm.rhat(i));
  }
  return out;
}

Index bootstrap_rank(double alpha, Index B)
{
  const double raw = (1.0 - alpha) * static_cast<double>(B + 1);
  const auto rank = static_cast<Index>(std::ceil(raw - 1e-9));
  return std::clamp<Index>(rank, 1, B);
}

double bootstrap_quantile(std::vector<double> draws, double alpha)
{
  if (draws.empty()) {
    throw InvalidInput("no bootstrap draws");
  }
  std::sort(draws.begin(), draws.end());
  const Index rank = bootstrap_rank(alpha, static_cast<Index>(draws.size()));
  return draws[static_cast<std::size_t>(rank - 1)];
}

BootstrapOutcome bootstrap_critical_value(const PairwiseCache& cache,
                                          const SmootherOutput& sm,
                                          const Vector<double>& y,
                                          const TestConfig& cfg)
{
  if (cfg.B < 1) {
    throw InvalidInput("bootstrap needs B >= 1");
  }
  const auto B = static_cast<std::size_t>(cfg.B);
  BootstrapOutcome out;
  out.draws.assign(B, 0.0);
  std::vector<char> degenerate(B, 0), fallback(B, 0);

  parallel_for(B, cfg.threads, [&](std::size_t b) {
    Rng rng = make_stream(cfg.seed, {static_cast<std::uint64_t>(StreamDomain::bootstrap), b});
    const auto eta = draw_multipliers(y.size(), cfg.multipliers, rng);
    const Vector<double> ystar = resample_response(sm, y, eta, IsolatedPolicy::keep);
    const SmootherOutput smstar = cache.smooth(ystar);
    const Evaluation ev = cache.evaluate(smstar, ystar, cfg.variance);
    fallback[b] = ev.fallback_used;
    if (ev.value.degenerate) {
      degenerate[b] = 1;
      out.draws[b] = 0.0;
    } else {
      out.draws[b] = ev.value.standardized;
    }
  });

  out.degenerate_draws = std::count(degenerate.begin(), degenerate.end(), 1);
  out.fallback_draws = std::count(fallback.begin(), fallback.end(), 1);
  if (10 * out.degenerate_draws > static_cast<Index>(B)) {
    throw DegenerateTest(std::to_string(out.degenerate_draws) + " of " +
                         std::to_string(B) +
                         " bootstrap draws have a degenerate variance estimate");
  }
  out.critical = bootstrap_quantile(out.draws, cfg.alpha);
  return out;
}

TestResult run_test(const Dataset& d, const TestConfig& cfg)
{
  cfg.validate();
  d.validate(minimum_sample_size(cfg.statistic, cfg.variance));
  const ScaledDataset sd = standardize(d);
  const Bandwidths bw = cfg.bandwidths ? *cfg.bandwidths
                                       : default_bandwidths(d.n(), cfg.c);

  const PairwiseCache cache(sd, cfg.statistic, cfg.kernel, cfg.psi, bw, cfg.smoother);
  const SmootherOutput sm = cache.smooth(sd.data.y);
  const Evaluation ev = cache.evaluate(sm, sd.data.y, cfg.variance);

  TestResult result;
  result.method = cfg;
  result.bandwidths = bw;
  result.statistic = ev.value;
  result.diagnostics.fallback_used = ev.fallback_used;
  result.diagnostics.zero_fhat = (sm.fhat.array() == 0.0).count();
  if (ev.value.degenerate) {
    result.diagnostics.degenerate_variance = true;
    throw DegenerateTest("test degenerate at this bandwidth: variance estimate is " +
                         std::to_string(ev.value.variance));
  }

  const double t = ev.value.standardized;
  if (cfg.critical == CriticalMethod::asymptotic) {
    result.critical_value = normal_upper_quantile(cfg.alpha);
    result.p_value = 1.0 - normal_cdf(t);
  } else {
    auto boot = bootstrap_critical_value(cache, sm, sd.data.y, cfg);
    result.critical_value = boot.critical;
    result.diagnostics.degenerate_draws = boot.degenerate_draws;
    result.diagnostics.fallback_draws = boot.fallback_draws;
    const auto exceed = std::count_if(boot.draws.begin(), boot.draws.end(),
                                      [t](double v) { return v >= t; });
    result.p_value = static_cast<double>(1 + exceed) / static_cast<double>(cfg.B + 1);
    result.bootstrap_draws = std::move(boot.draws);
  }
  result.reject = t > result.critical_value;
  return result;
}

} // namespace covsig
