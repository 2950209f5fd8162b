#pragma once

#include "covsig/dataset.hpp"
#include "covsig/kernels.hpp"
#include "covsig/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace covsig {

//! Seeded small dataset with heteroskedastic noise and a dependence on X.
//! Case k cycles psi families; indicator cases get integer-coded discrete X,
//! odd cases add a discrete W column.
struct CheckCase
{
  Dataset data;
  PsiSpec psi;
  double g = 1.0;
  double h = 1.0;
};

CheckCase make_check_case(Index n, Index q, int k, Rng& rng);

//! |a - b| <= max(abs_floor, rel * max(|a|, |b|)).
bool nearly_equal(double a, double b, double rel = 1e-10, double abs_floor = 1e-12);

struct SelfCheckOptions
{
  std::uint64_t seed = 20140301;
  int cases_per_size = 10;
  //! Negative control: perturbs the V2 coefficient of the decomposition
  //! identity, which must then fail.
  bool corrupt_decomposition = false;
};

struct CheckOutcome
{
  std::string name;
  bool passed = true;
  std::string detail;
};

//! Fast paths against the brute-force oracles, cases_per_size datasets at
//! each n in {6, 8, 10}.
CheckOutcome check_oracle_equivalence(const SelfCheckOptions& options);

//! Four-index statistic against its diagonal-term decomposition, both sides
//! by brute force, at n = 8.
CheckOutcome check_decomposition_identity(const SelfCheckOptions& options);

//! Y shift and scale, covariate rescaling, permutation and eta = 1 bootstrap
//! identities at n = 50.
CheckOutcome check_invariances(const SelfCheckOptions& options);

//! Analytic moments of the two-point law and empirical moments of 10^6 draws
//! within 4 standard errors.
CheckOutcome check_multiplier_moments(const SelfCheckOptions& options);

//! All four checks above.
std::vector<CheckOutcome> run_selfcheck(const SelfCheckOptions& options = {});

} // namespace covsig
