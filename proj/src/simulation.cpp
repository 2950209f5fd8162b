#include "covsig/simulation.hpp"

#include "covsig/parallel.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <sstream>

namespace covsig {

std::string to_string(DgpFamily family)
{
  return family == DgpFamily::continuous ? "continuous" : "discrete";
}

std::string to_string(Alternative alternative)
{
  switch (alternative) {
    case Alternative::null: return "null";
    case Alternative::quadratic: return "quadratic";
    case Alternative::linear: return "linear";
    case Alternative::sine: return "sine";
  }
  return "unknown";
}

Alternative parse_alternative(const std::string& name)
{
  if (name == "null") return Alternative::null;
  if (name == "quadratic") return Alternative::quadratic;
  if (name == "linear") return Alternative::linear;
  if (name == "sine") return Alternative::sine;
  throw InvalidInput("unknown alternative '" + name + "'");
}

DgpFamily parse_family(const std::string& name)
{
  if (name == "continuous") return DgpFamily::continuous;
  if (name == "discrete") return DgpFamily::discrete_x;
  throw InvalidInput("unknown DGP family '" + name + "'");
}

double alternative_term(Alternative alternative, double t)
{
  switch (alternative) {
    case Alternative::null: return 0.0;
    case Alternative::quadratic: return (t - 1.0) * (t - 1.0) / std::sqrt(2.0);
    case Alternative::linear: return t;
    case Alternative::sine: return std::sin(2.0 * t);
  }
  return 0.0;
}

namespace {

constexpr double kNoiseSd = 2.0;

double null_regression(double w1, double w2)
{
  const double index = (w1 - w2) / std::sqrt(2.0);
  return index * index * index - index;
}

} // namespace

Dataset gen_continuous(const DgpSpec& spec, Rng& rng)
{
  if (spec.family != DgpFamily::continuous || spec.q < 1 || spec.n < 1) {
    throw InvalidInput("continuous design needs q >= 1 and n >= 1");
  }
  const Index n = spec.n;
  const Index q = spec.q;
  std::normal_distribution<double> normal;
  Vector<double> y(n);
  Matrix<double> w(n, 2), x(n, q);
  const double beta = 1.0 / std::sqrt(static_cast<double>(q));
  for (Index i = 0; i < n; ++i) {
    w(i, 0) = normal(rng);
    w(i, 1) = normal(rng);
    for (Index j = 0; j < q; ++j) {
      x(i, j) = normal(rng);
    }
    const double eps = kNoiseSd * normal(rng);
    y(i) = null_regression(w(i, 0), w(i, 1)) + eps;
    if (spec.delta != 0.0) {
      const double index = beta * x.row(i).sum();
      y(i) += spec.delta * alternative_term(spec.alternative, index);
    }
  }
  return make_dataset(std::move(y), std::move(w), std::move(x));
}

Dataset gen_discrete(const DgpSpec& spec, Rng& rng)
{
  if (spec.family != DgpFamily::discrete_x || spec.n < 1) {
    throw InvalidInput("discrete design needs n >= 1");
  }
  if (spec.alternative == Alternative::linear) {
    throw InvalidInput("the discrete design has no linear alternative");
  }
  const Index n = spec.n;
  std::normal_distribution<double> normal;
  std::bernoulli_distribution success(0.6);
  Vector<double> y(n);
  Matrix<double> w(n, 2), x(n, 1);
  for (Index i = 0; i < n; ++i) {
    w(i, 0) = normal(rng);
    w(i, 1) = normal(rng);
    x(i, 0) = success(rng) ? 1.0 : 0.0;
    const double eps = kNoiseSd * normal(rng);
    y(i) = null_regression(w(i, 0), w(i, 1)) + eps;
    if (spec.delta != 0.0 && x(i, 0) == 1.0) {
      const double index = (w(i, 0) - w(i, 1)) / std::sqrt(2.0);
      y(i) += spec.delta * alternative_term(spec.alternative, index);
    }
  }
  return make_dataset(std::move(y), std::move(w), std::move(x), {},
                      {ColumnKind::discrete});
}

Dataset generate(const DgpSpec& spec, Rng& rng)
{
  return spec.family == DgpFamily::continuous ? gen_continuous(spec, rng)
                                              : gen_discrete(spec, rng);
}

bool SimTest::uses_c() const
{
  return kind == Kind::kernel && config.statistic != StatisticKind::dgm;
}

SimTest parse_sim_test(const std::string& name)
{
  SimTest t;
  t.name = name;
  if (name == "fisher") {
    t.kind = SimTest::Kind::fisher;
    return t;
  }
  std::vector<std::string> parts;
  std::stringstream in(name);
  std::string part;
  while (std::getline(in, part, '-')) {
    parts.push_back(part);
  }
  if (parts.size() >= 3 && (parts.back() == "tilde" || parts.back() == "hat")) {
    t.config.variance =
      parts.back() == "tilde" ? VarianceKind::var_tilde : VarianceKind::var_hat;
    parts.pop_back();
  }
  if (parts.size() < 2 || parts.size() > 3) {
    throw InvalidInput("cannot parse test name '" + name + "'");
  }
  t.config.statistic = parse_statistic(parts[0]);
  if (parts[1] == "boot") {
    t.config.critical = CriticalMethod::bootstrap;
  } else if (parts[1] == "asym") {
    t.config.critical = CriticalMethod::asymptotic;
  } else {
    throw InvalidInput("cannot parse test name '" + name + "'");
  }
  if (parts.size() == 3) {
    t.config.psi.family = parse_psi_family(parts[2]);
  }
  if (t.config.statistic == StatisticKind::dgm &&
      t.config.critical != CriticalMethod::bootstrap) {
    throw InvalidInput("dgm needs bootstrap critical values");
  }
  return t;
}

namespace {

std::string fmt(double v)
{
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

} // namespace

std::string ResultTable::to_csv() const
{
  std::ostringstream out;
  out << "test,n,q,c,delta,alternative,alpha,reps,reject_rate,mc_se,failures\n";
  for (const auto& r : rows) {
    out << r.test << ',' << r.n << ',' << r.q << ',' << fmt(r.c) << ','
        << fmt(r.delta) << ',' << to_string(r.alternative) << ',' << fmt(r.alpha)
        << ',' << r.reps << ',' << fmt(r.reject_rate) << ',' << fmt(r.mc_se) << ','
        << r.failures << '\n';
  }
  return out.str();
}

ResultTable run_experiment(const ExperimentConfig& cfg)
{
  if (cfg.replications < 1) {
    throw InvalidInput("replications must be >= 1");
  }
  if (cfg.cells.empty() || cfg.tests.empty() || cfg.c_grid.empty()) {
    throw InvalidInput("experiment needs at least one cell, test and c value");
  }
  for (double c : cfg.c_grid) {
    if (!(c > 0.0)) {
      throw InvalidInput("bandwidth factors must be positive");
    }
  }

  const auto reps = static_cast<std::size_t>(cfg.replications);
  const std::size_t n_c = cfg.c_grid.size();
  const std::size_t n_tests = cfg.tests.size();
  ResultTable table;

  for (std::size_t cell = 0; cell < cfg.cells.size(); ++cell) {
    const DgpSpec& spec = cfg.cells[cell];
    const auto started = std::chrono::steady_clock::now();
    // outcome[(r * n_c + ci) * n_tests + t]: 1 reject, 0 accept, -1 failure
    std::vector<signed char> outcome(reps * n_c * n_tests, 0);

    parallel_for(reps, cfg.threads, [&](std::size_t r) {
      Rng data_rng = make_stream(
        cfg.master_seed,
        {static_cast<std::uint64_t>(StreamDomain::replication_data), cell, r});
      const Dataset d = generate(spec, data_rng);

      for (std::size_t t = 0; t < n_tests; ++t) {
        const SimTest& test = cfg.tests[t];
        const std::size_t c_runs = test.uses_c() ? n_c : 1;
        for (std::size_t ci = 0; ci < c_runs; ++ci) {
          signed char result = -1;
          try {
            if (test.kind == SimTest::Kind::fisher) {
              result = fisher_test(standardize(d), cfg.alpha).reject ? 1 : 0;
            } else {
              TestConfig tc = test.config;
              tc.alpha = cfg.alpha;
              tc.B = cfg.B;
              tc.c = cfg.c_grid[ci];
              tc.threads = 1;
              Rng seed_rng = make_stream(
                cfg.master_seed,
                {static_cast<std::uint64_t>(StreamDomain::replication_test), cell,
                 r, t, ci});
              tc.seed = seed_rng();
              result = run_test(d, tc).reject ? 1 : 0;
            }
          } catch (const std::exception&) {
            result = -1;
          }
          if (test.uses_c()) {
            outcome[(r * n_c + ci) * n_tests + t] = result;
          } else {
            for (std::size_t cj = 0; cj < n_c; ++cj) {
              outcome[(r * n_c + cj) * n_tests + t] = result;
            }
          }
        }
      }
    });

    int invalid_rows = 0;
    for (std::size_t t = 0; t < n_tests; ++t) {
      for (std::size_t ci = 0; ci < n_c; ++ci) {
        int rejects = 0, failures = 0;
        for (std::size_t r = 0; r < reps; ++r) {
          const auto o = outcome[(r * n_c + ci) * n_tests + t];
          if (o < 0) {
            ++failures;
          } else {
            rejects += o;
          }
        }
        ResultRow row;
        row.test = cfg.tests[t].name;
        row.n = spec.n;
        row.q = spec.family == DgpFamily::continuous ? spec.q : 1;
        row.c = cfg.c_grid[ci];
        row.delta = spec.delta;
        row.alternative = spec.alternative;
        row.alpha = cfg.alpha;
        row.reps = cfg.replications;
        row.failures = failures;
        const int ok = cfg.replications - failures;
        row.reject_rate = ok > 0 ? static_cast<double>(rejects) / ok : 0.0;
        row.mc_se = ok > 0 ? std::sqrt(row.reject_rate * (1.0 - row.reject_rate) / ok)
                           : 0.0;
        row.valid = 20 * failures <= cfg.replications;
        invalid_rows += row.valid ? 0 : 1;
        table.rows.push_back(row);
      }
    }

    if (cfg.progress) {
      const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - started)
                            .count();
      std::ostringstream msg;
      msg << "cell " << cell + 1 << "/" << cfg.cells.size() << ": "
          << to_string(spec.family) << " n=" << spec.n << " q=" << spec.q
          << " " << to_string(spec.alternative) << " delta=" << spec.delta
          << " done in " << secs << "s";
      if (invalid_rows > 0) {
        msg << " (" << invalid_rows << " rows flagged: >5% failed replications)";
      }
      cfg.progress(msg.str());
    }
  }
  return table;
}

std::vector<std::string> figure_tags()
{
  return {"level-cont", "power-quad", "power-n", "power-alt", "level-disc", "power-disc"};
}

namespace {

std::vector<SimTest> tests_named(std::initializer_list<const char*> names)
{
  std::vector<SimTest> out;
  for (const char* name : names) {
    out.push_back(parse_sim_test(name));
  }
  return out;
}

void add_cells(ExperimentConfig& cfg, DgpFamily family,
               std::initializer_list<Index> ns, std::initializer_list<Index> qs,
               std::initializer_list<Alternative> alternatives,
               std::initializer_list<double> deltas)
{
  for (auto alt : alternatives)
    for (Index n : ns)
      for (Index q : qs)
        for (double delta : deltas) {
          cfg.cells.push_back({family, q, alt, delta, n});
        }
}

} // namespace

ExperimentConfig figure_preset(const std::string& tag, bool paper_scale)
{
  ExperimentConfig cfg;
  cfg.alpha = 0.10;
  cfg.B = 199;
  const int level_reps = paper_scale ? 5000 : 500;
  const int power_reps = paper_scale ? 2000 : 300;

  if (tag == "level-cont") {
    cfg.replications = level_reps;
    cfg.c_grid = {1.0, 2.0, 3.0, 4.0};
    cfg.tests = tests_named({"itilde-boot-normal", "itilde-asym-normal",
                             "itilde-boot-triangular", "itilde-asym-triangular",
                             "lv-boot", "lv-asym", "dgm-boot"});
    add_cells(cfg, DgpFamily::continuous, {100}, {1, 3, 5, 7}, {Alternative::null}, {0.0});
  } else if (tag == "power-quad") {
    cfg.replications = power_reps;
    cfg.c_grid = {1.0, 2.0, 4.0};
    cfg.tests = tests_named({"itilde-boot-normal", "lv-boot", "dgm-boot", "fisher"});
    add_cells(cfg, DgpFamily::continuous, {100}, {1, 3, 5, 7}, {Alternative::quadratic},
              {0.0, 1.0, 2.0, 3.0, 4.0});
  } else if (tag == "power-n") {
    cfg.replications = power_reps;
    cfg.c_grid = {1.0, 2.0};
    cfg.tests = tests_named({"itilde-boot-normal", "lv-boot", "dgm-boot", "fisher"});
    add_cells(cfg, DgpFamily::continuous, {50, 100, 200}, {5}, {Alternative::quadratic},
              {0.0, 1.0, 2.0, 3.0, 4.0});
  } else if (tag == "power-alt") {
    cfg.replications = power_reps;
    cfg.c_grid = {1.0, 2.0, 4.0};
    cfg.tests = tests_named({"itilde-boot-normal", "lv-boot", "dgm-boot", "fisher"});
    add_cells(cfg, DgpFamily::continuous, {100}, {5},
              {Alternative::linear, Alternative::sine}, {0.0, 1.0, 2.0, 3.0, 4.0});
  } else if (tag == "level-disc") {
    cfg.replications = level_reps;
    cfg.c_grid = {1.0, 2.0, 3.0, 4.0};
    cfg.tests = tests_named({"itilde-boot-normal", "itilde-asym-normal",
                             "itilde-boot-indicator", "itilde-asym-indicator"});
    add_cells(cfg, DgpFamily::discrete_x, {100}, {1}, {Alternative::null}, {0.0});
  } else if (tag == "power-disc") {
    cfg.replications = power_reps;
    cfg.c_grid = {1.0, 2.0, 4.0};
    cfg.tests = tests_named({"itilde-boot-normal", "itilde-boot-indicator"});
    add_cells(cfg, DgpFamily::discrete_x, {100}, {1},
              {Alternative::quadratic, Alternative::sine}, {0.0, 1.0, 2.0, 3.0, 4.0});
  } else {
    throw InvalidInput("unknown figure tag '" + tag + "'");
  }
  return cfg;
}

} // namespace covsig
