// Command-line front end: `test` runs the significance test on a CSV file,
// `simulate` writes Monte Carlo rejection tables, `selfcheck` runs the
// oracle and invariance checks.
//
// Exit codes: 0 success, 1 runtime error, 2 usage error, 3 null rejected.

#include "covsig/bootstrap.hpp"
#include "covsig/dataset.hpp"
#include "covsig/parallel.hpp"
#include "covsig/selfcheck.hpp"
#include "covsig/simulation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace {

using namespace covsig;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRejected = 3;
constexpr int kSchemaVersion = 1;

struct UsageError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

std::string fmt(double v)
{
  if (std::isnan(v)) {
    return "nan";
  }
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed)
{
  if (seed) {
    return *seed;
  }
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  std::cerr << "seed: " << s << " (from OS entropy; pass --seed to reproduce)\n";
  return s;
}

// ---------------------------------------------------------------- test

struct TestOptions
{
  std::string data;
  std::string y;
  std::vector<std::string> w, x, disc;
  std::string stat = "itilde";
  std::string psi = "normal";
  std::string variance = "hat";
  double c = 2.0;
  std::optional<double> g, h;
  double alpha = 0.05;
  int boot = 199;
  bool asymptotic = false;
  std::optional<std::uint64_t> seed;
  bool json = false;
  bool csv = false;
  int threads = 1;
};

using Field = std::variant<std::string, double, std::int64_t, bool>;
using Record = std::vector<std::pair<std::string, Field>>;

Record to_record(const TestResult& r, const Dataset& d)
{
  const auto& m = r.method;
  return {
    {"schema_version", std::int64_t{kSchemaVersion}},
    {"statistic", to_string(m.statistic)},
    {"psi", to_string(m.psi.family)},
    {"variance_estimator",
     std::string(m.variance == VarianceKind::var_hat ? "hat" : "tilde")},
    {"critical_method",
     std::string(m.critical == CriticalMethod::bootstrap ? "bootstrap" : "asymptotic")},
    {"alpha", m.alpha},
    {"B", std::int64_t{m.critical == CriticalMethod::bootstrap ? m.B : 0}},
    {"seed", std::to_string(m.seed)},
    {"n", std::int64_t{d.n()}},
    {"p", std::int64_t{d.p()}},
    {"q", std::int64_t{d.q()}},
    {"rate_dimension", std::int64_t{r.statistic.rate_dimension}},
    {"g", r.bandwidths.g},
    {"h", r.bandwidths.h},
    {"c", r.bandwidths.c},
    {"raw", r.statistic.raw},
    {"variance", r.statistic.variance},
    {"standardized", r.statistic.standardized},
    {"critical_value", r.critical_value},
    {"p_value", r.p_value},
    {"reject", r.reject},
    {"zero_fhat", std::int64_t{r.diagnostics.zero_fhat}},
    {"fallback_used", r.diagnostics.fallback_used},
    {"degenerate_draws", std::int64_t{r.diagnostics.degenerate_draws}},
  };
}

std::string field_text(const Field& f)
{
  return std::visit(
    [](const auto& v) -> std::string {
      using T = std::decay_t<decltype(v)>;
      if constexpr (std::is_same_v<T, std::string>) {
        return v;
      } else if constexpr (std::is_same_v<T, double>) {
        return fmt(v);
      } else if constexpr (std::is_same_v<T, bool>) {
        return v ? "true" : "false";
      } else {
        return std::to_string(v);
      }
    },
    f);
}

void print_record(const Record& rec, const TestOptions& opt)
{
  if (opt.json) {
    nlohmann::ordered_json j;
    for (const auto& [key, value] : rec) {
      std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            if (std::isfinite(v)) {
              j[key] = v;
            } else {
              j[key] = nullptr;
            }
          } else {
            j[key] = v;
          }
        },
        value);
    }
    std::cout << j.dump(2) << '\n';
  } else if (opt.csv) {
    for (std::size_t i = 0; i < rec.size(); ++i) {
      std::cout << (i ? "," : "") << rec[i].first;
    }
    std::cout << '\n';
    for (std::size_t i = 0; i < rec.size(); ++i) {
      std::cout << (i ? "," : "") << field_text(rec[i].second);
    }
    std::cout << '\n';
  } else {
    for (const auto& [key, value] : rec) {
      std::cout << key << '=' << field_text(value) << '\n';
    }
  }
}

int cmd_test(const TestOptions& opt)
{
  std::set<std::string> seen{opt.y};
  for (const auto* group : {&opt.w, &opt.x}) {
    for (const auto& name : *group) {
      if (!seen.insert(name).second) {
        throw UsageError("column '" + name + "' is given more than one role");
      }
    }
  }
  for (const auto& name : opt.disc) {
    if (std::find(opt.w.begin(), opt.w.end(), name) == opt.w.end() &&
        std::find(opt.x.begin(), opt.x.end(), name) == opt.x.end()) {
      throw UsageError("--disc column '" + name + "' is neither in --w nor --x");
    }
  }
  if (opt.asymptotic && opt.stat == "dgm") {
    throw UsageError("--stat dgm requires bootstrap critical values");
  }
  if (opt.g.has_value() != opt.h.has_value()) {
    throw UsageError("--g and --h must be given together");
  }

  const Dataset d = load_dataset(opt.data, Schema{opt.y, opt.w, opt.x, opt.disc});

  TestConfig cfg;
  cfg.statistic = parse_statistic(opt.stat);
  cfg.psi.family = parse_psi_family(opt.psi);
  cfg.variance = opt.variance == "tilde" ? VarianceKind::var_tilde : VarianceKind::var_hat;
  cfg.c = opt.c;
  if (opt.g) {
    cfg.bandwidths = Bandwidths{*opt.g, *opt.h, opt.c};
  }
  cfg.alpha = opt.alpha;
  cfg.critical = opt.asymptotic ? CriticalMethod::asymptotic : CriticalMethod::bootstrap;
  cfg.B = opt.boot;
  cfg.seed = resolve_seed(opt.seed);
  cfg.threads = opt.threads;

  const TestResult r = run_test(d, cfg);
  print_record(to_record(r, d), opt);
  return r.reject ? kExitRejected : kExitOk;
}

// ------------------------------------------------------------ simulate

struct SimulateOptions
{
  std::string figure;
  std::string family = "continuous";
  std::vector<Index> n{100};
  std::vector<Index> q{2};
  std::vector<double> delta{0.0};
  std::vector<std::string> alternatives{"null"};
  std::vector<double> c;
  std::vector<std::string> tests{"itilde-boot-normal"};
  double alpha = 0.10;
  std::optional<int> reps;
  int boot = 199;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool paper_scale = false;
  int threads = 1;
};

int cmd_simulate(const SimulateOptions& opt)
{
  if (opt.reps && *opt.reps < 1) {
    throw UsageError("--reps must be at least 1");
  }
  if (opt.boot < 1) {
    throw UsageError("--boot must be at least 1");
  }

  ExperimentConfig cfg;
  if (!opt.figure.empty()) {
    cfg = figure_preset(opt.figure, opt.paper_scale);
  } else {
    const DgpFamily family = parse_family(opt.family);
    for (const auto& alt : opt.alternatives) {
      for (Index n : opt.n) {
        for (Index q : opt.q) {
          for (double delta : opt.delta) {
            cfg.cells.push_back({family, q, parse_alternative(alt), delta, n});
          }
        }
      }
    }
    cfg.tests.clear();
    for (const auto& name : opt.tests) {
      cfg.tests.push_back(parse_sim_test(name));
    }
    cfg.alpha = opt.alpha;
    if (opt.paper_scale) {
      cfg.replications = 5000;
    }
  }
  if (!opt.c.empty()) {
    cfg.c_grid = opt.c;
  }
  if (opt.reps) {
    cfg.replications = *opt.reps;
  }
  cfg.B = opt.boot;
  cfg.master_seed = resolve_seed(opt.seed);
  cfg.threads = opt.threads;
  cfg.progress = [](const std::string& line) { std::cerr << line << std::endl; };

  const auto started = std::chrono::steady_clock::now();
  const ResultTable table = run_experiment(cfg);
  std::ofstream out(opt.out, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write '" + opt.out + "'");
  }
  out << table.to_csv();
  const double secs =
    std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::cerr << "wrote " << table.rows.size() << " rows to " << opt.out << " in "
            << secs << "s\n";
  return kExitOk;
}

// ----------------------------------------------------------- selfcheck

int cmd_selfcheck(const SelfCheckOptions& opt)
{
  const auto started = std::chrono::steady_clock::now();
  bool all = true;
  for (const auto& check : run_selfcheck(opt)) {
    if (check.passed) {
      std::cout << "PASS " << check.name << '\n';
    } else {
      all = false;
      std::cout << "FAIL " << check.name << ": " << check.detail << '\n';
    }
  }
  const double secs =
    std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::cout << (all ? "all checks passed" : "some checks failed") << " (seed "
            << opt.seed << ", " << secs << "s)\n";
  return all ? kExitOk : kExitRuntime;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Kernel significance test for covariates in nonparametric regression"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key = value config file");

  const int env_threads = default_thread_count();

  TestOptions topt;
  topt.threads = env_threads;
  auto* test = app.add_subcommand("test", "Test the significance of X given W");
  // -h would clash with --h (test bandwidth).
  test->set_help_flag("--help", "Print this help message and exit");
  test->add_option("--data", topt.data, "CSV file with a header row")->required();
  test->add_option("--y", topt.y, "Response column")->required();
  test->add_option("--w", topt.w, "Null-hypothesis covariates (comma separated)")
    ->required()->delimiter(',');
  test->add_option("--x", topt.x, "Covariates under test (comma separated)")
    ->required()->delimiter(',');
  test->add_option("--disc", topt.disc, "Discrete columns among W and X")->delimiter(',');
  test->add_option("--stat", topt.stat, "itilde | ihat | lv | dgm")
    ->check(CLI::IsMember({"itilde", "ihat", "lv", "dgm"}));
  test->add_option("--psi", topt.psi, "normal | triangular | indicator")
    ->check(CLI::IsMember({"normal", "triangular", "indicator"}));
  test->add_option("--var", topt.variance, "Variance estimator: hat | tilde")
    ->check(CLI::IsMember({"hat", "tilde"}));
  test->add_option("--c", topt.c, "Bandwidth factor in h = c n^{-2.1/6}")
    ->check(CLI::PositiveNumber);
  test->add_option("--g", topt.g, "Explicit estimation bandwidth")->check(CLI::PositiveNumber);
  test->add_option("--h", topt.h, "Explicit test bandwidth")->check(CLI::PositiveNumber);
  test->add_option("--alpha", topt.alpha, "Level")->check(CLI::Range(0.0, 1.0));
  auto* boot = test->add_option("--boot", topt.boot, "Bootstrap replications")
                 ->check(CLI::PositiveNumber);
  auto* asym = test->add_flag("--asymptotic", topt.asymptotic,
                              "Use the normal critical value");
  boot->excludes(asym);
  test->add_option("--seed", topt.seed, "Random seed");
  auto* json = test->add_flag("--json", topt.json, "JSON output");
  auto* csv = test->add_flag("--csv", topt.csv, "CSV output");
  json->excludes(csv);
  test->add_option("--threads", topt.threads, "Worker threads")
    ->envname("COVSIG_THREADS")->check(CLI::PositiveNumber);

  SimulateOptions sopt;
  sopt.threads = env_threads;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo level and power tables");
  sim->add_option("--figure", sopt.figure, "Preset design")
    ->check(CLI::IsMember(figure_tags()));
  sim->add_option("--family", sopt.family, "continuous | discrete")
    ->check(CLI::IsMember({"continuous", "discrete"}));
  sim->add_option("--n", sopt.n, "Sample sizes")->delimiter(',');
  sim->add_option("--q", sopt.q, "Dimensions of X")->delimiter(',');
  sim->add_option("--delta", sopt.delta, "Deviation sizes")->delimiter(',');
  sim->add_option("--alternative", sopt.alternatives, "null | quadratic | linear | sine")
    ->delimiter(',');
  sim->add_option("--c", sopt.c, "Bandwidth factors")->delimiter(',');
  sim->add_option("--tests", sopt.tests, "Test names, e.g. itilde-boot-normal, fisher")
    ->delimiter(',');
  sim->add_option("--alpha", sopt.alpha, "Level")->check(CLI::Range(0.0, 1.0));
  sim->add_option("--reps", sopt.reps, "Replications per cell");
  sim->add_option("--boot", sopt.boot, "Bootstrap replications");
  sim->add_option("--seed", sopt.seed, "Master seed");
  sim->add_option("--out", sopt.out, "Output CSV")->required();
  sim->add_flag("--paper-scale", sopt.paper_scale, "5000 level / 2000 power replications");
  sim->add_option("--threads", sopt.threads, "Worker threads")
    ->envname("COVSIG_THREADS")->check(CLI::PositiveNumber);

  SelfCheckOptions copt;
  auto* check = app.add_subcommand("selfcheck", "Oracle, invariance and moment checks");
  check->add_option("--seed", copt.seed, "Seed for the check datasets");
  check->add_option("--cases", copt.cases_per_size, "Datasets per sample size")
    ->check(CLI::PositiveNumber);
  check->add_flag("--corrupt-decomposition", copt.corrupt_decomposition,
                  "Negative control: perturb the decomposition identity");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (test->parsed()) {
      return cmd_test(topt);
    }
    if (sim->parsed()) {
      return cmd_simulate(sopt);
    }
    return cmd_selfcheck(copt);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
