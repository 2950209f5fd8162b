#pragma once

#include "covsig/bootstrap.hpp"
#include "covsig/dataset.hpp"
#include "covsig/rng.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace covsig {

enum class DgpFamily { continuous, discrete_x };
enum class Alternative { null, quadratic, linear, sine };

std::string to_string(DgpFamily family);
std::string to_string(Alternative alternative);
Alternative parse_alternative(const std::string& name);
DgpFamily parse_family(const std::string& name);

//! Y = (W'theta)^3 - W'theta + delta d(.) + eps, W ~ N(0, I_2),
//! theta = (1, -1)/sqrt2, eps ~ N(0, 4). Continuous family: X ~ N(0, I_q),
//! d = d(X) with beta = (1, ..., 1)/sqrt q. Discrete family: X ~ Bernoulli(0.6),
//! d = d(W) 1{X = 1} with W'theta in place of X'beta.
struct DgpSpec
{
  DgpFamily family = DgpFamily::continuous;
  Index q = 1;
  Alternative alternative = Alternative::null;
  double delta = 0.0;
  Index n = 100;
};

//! Deviation function d evaluated at the index t (X'beta or W'theta).
double alternative_term(Alternative alternative, double t);

Dataset gen_continuous(const DgpSpec& spec, Rng& rng);
Dataset gen_discrete(const DgpSpec& spec, Rng& rng);
Dataset generate(const DgpSpec& spec, Rng& rng);

//! One column of a Monte Carlo table: a kernel test configuration or the
//! linear F test.
struct SimTest
{
  enum class Kind { kernel, fisher };
  std::string name;
  Kind kind = Kind::kernel;
  TestConfig config;

  //! Whether the outcome depends on the bandwidth factor c.
  bool uses_c() const;
};

//! Names of the form
//! "<itilde|ihat|lv|dgm>-<boot|asym>[-<normal|triangular|indicator>][-<hat|tilde>]"
//! or "fisher". The last part picks the variance estimator (default hat).
SimTest parse_sim_test(const std::string& name);

struct ExperimentConfig
{
  std::vector<DgpSpec> cells;
  std::vector<double> c_grid{2.0};
  std::vector<SimTest> tests;
  int replications = 500;
  std::uint64_t master_seed = 1;
  double alpha = 0.10;
  int B = 199;
  int threads = 1;
  //! Called after each cell with a one-line summary.
  std::function<void(const std::string&)> progress;
};

struct ResultRow
{
  std::string test;
  Index n = 0;
  Index q = 0;
  double c = 0.0;
  double delta = 0.0;
  Alternative alternative = Alternative::null;
  double alpha = 0.0;
  int reps = 0;
  double reject_rate = 0.0;
  double mc_se = 0.0;
  int failures = 0;
  //! False when more than 5% of the replications failed.
  bool valid = true;
};

struct ResultTable
{
  std::vector<ResultRow> rows;

  //! Header test,n,q,c,delta,alternative,alpha,reps,reject_rate,mc_se,failures.
  std::string to_csv() const;
};

//! Runs every test on `replications` datasets per cell. Datasets of
//! replication r in cell k come from the stream (seed, k, r) and are shared
//! by all tests and bandwidth factors of that cell.
ResultTable run_experiment(const ExperimentConfig& cfg);

std::vector<std::string> figure_tags();

//! Designs behind the level and power figures, at desk scale unless
//! paper_scale is set.
ExperimentConfig figure_preset(const std::string& tag, bool paper_scale = false);

} // namespace covsig
