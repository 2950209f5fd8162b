#pragma once

#include "covsig/dataset.hpp"
#include "covsig/kernels.hpp"
#include "covsig/pairwise_cache.hpp"
#include "covsig/rng.hpp"
#include "covsig/smoother.hpp"
#include "covsig/statistics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace covsig {

//! Wild-bootstrap multiplier distribution.
struct MultiplierLaw
{
  enum class Law {
    //! (1-sqrt5)/2 w.p. (5+sqrt5)/10, (1+sqrt5)/2 otherwise; E eta = 0,
    //! E eta^2 = E eta^3 = 1.
    mammen_two_point,
    //! eta = 1 always; reproduces the original sample (diagnostic only).
    constant_one,
  };
  Law law = Law::mammen_two_point;

  static double low_value();
  static double high_value();
  static double low_probability();
};

enum class CriticalMethod { asymptotic, bootstrap };

struct TestConfig
{
  StatisticKind statistic = StatisticKind::itilde;
  PsiSpec psi;
  KernelSpec kernel;
  //! Bandwidth factor for the default rule; ignored when bandwidths is set.
  double c = 2.0;
  std::optional<Bandwidths> bandwidths;
  VarianceKind variance = VarianceKind::var_hat;
  CriticalMethod critical = CriticalMethod::bootstrap;
  double alpha = 0.05;
  int B = 199;
  std::uint64_t seed = 0;
  MultiplierLaw multipliers;
  int threads = 1;
  SmootherOptions smoother;

  //! Throws InvalidInput on inconsistent settings.
  void validate() const;
};

struct Diagnostics
{
  bool degenerate_variance = false;
  Index zero_fhat = 0;
  bool fallback_used = false;
  Index degenerate_draws = 0;
  Index fallback_draws = 0;
};

struct TestResult
{
  //! For the Cramer-von Mises statistic, standardized holds the raw value.
  StatisticValue statistic;
  double critical_value = 0.0;
  //! Bootstrap: (1 + #{draws >= statistic}) / (B + 1); asymptotic: 1 - Phi(T).
  double p_value = 1.0;
  bool reject = false;
  TestConfig method;
  Bandwidths bandwidths;
  //! Bootstrapped statistics in replication order (bootstrap method only).
  std::vector<double> bootstrap_draws;
  Diagnostics diagnostics;
};

std::vector<double> draw_multipliers(Index n, const MultiplierLaw& law, Rng& rng);

//! Treatment of observations with fhat_i = 0, whose rhat_i is undefined.
//! Such an observation has an all-zero smoothing row, so its response enters
//! no uhat_j fhat_j and no statistic; `keep` leaves it unchanged.
enum class IsolatedPolicy { reject, keep };

//! Y*_i = rhat_i + eta_i (Y_i - rhat_i). With IsolatedPolicy::reject, throws
//! DegenerateTest when some fhat_i = 0.
Vector<double> resample_response(const SmootherOutput& sm,
                                 const Vector<double>& y,
                                 const std::vector<double>& eta,
                                 IsolatedPolicy isolated = IsolatedPolicy::reject);

//! Rank ceil((1 - alpha)(B + 1)), clamped to [1, B].
Index bootstrap_rank(double alpha, Index B);

//! Order statistic of the given rank from the draws.
double bootstrap_quantile(std::vector<double> draws, double alpha);

struct BootstrapOutcome
{
  double critical = 0.0;
  std::vector<double> draws;
  Index degenerate_draws = 0;
  Index fallback_draws = 0;
};

//! Wild bootstrap of the configured statistic. Replication b draws its
//! multipliers from the stream (seed, b), so results do not depend on the
//! worker count.
BootstrapOutcome bootstrap_critical_value(const PairwiseCache& cache,
                                          const SmootherOutput& sm,
                                          const Vector<double>& y,
                                          const TestConfig& cfg);

//! Full procedure: standardize covariates, compute the statistic, the
//! critical value and the decision.
TestResult run_test(const Dataset& d, const TestConfig& cfg);

} // namespace covsig
