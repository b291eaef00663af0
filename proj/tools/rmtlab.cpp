// rmtlab: command-line front end for the random-matrix experiments.
//
// Exit codes: 0 success (criteria may still fail, see the report),
// 1 acceptance suite with a failing criterion, 2 invalid configuration,
// 3 numerical failure (a partial report is still written).

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rmt/error.hpp"
#include "rmt/harness/acceptance.hpp"
#include "rmt/harness/config.hpp"
#include "rmt/harness/experiments.hpp"
#include "rmt/harness/worker_pool.hpp"

using namespace rmt;
using namespace rmt::harness;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

const char* describe(Experiment e) {
  switch (e) {
    case Experiment::Dos: return "Histogram density of states against the semicircle";
    case Experiment::PairCorrelation: return "Two-level correlation against the sine kernel";
    case Experiment::NormTail: return "Operator-norm tail frequencies against the norm bound";
    case Experiment::SusyDos: return "Flip-model density from the mean-field integral, checked by Monte Carlo";
    case Experiment::CriticalPoints: return "Critical points of the real action and a region scan";
    case Experiment::Tadpole: return "2D tadpole self-energy";
    case Experiment::Convergence: return "Rate of convergence of the flip-model density";
    case Experiment::ToyEdge: return "Semi-ellipse fit of the hierarchical toy model";
    case Experiment::JointDensity: return "Chi-square test of the 2x2 eigenvalue joint density";
  }
  return "";
}

// --config must be applied before the flags so explicit flags win.
std::string find_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  return {};
}

void add_options(CLI::App* sub, ExperimentConfig& c, std::vector<std::string>& tolerances,
                 std::string& config_path) {
  sub->add_option("--config", config_path, "JSON file with the same keys as the flags");
  sub->add_option("--ensemble", c.ensemble, "gue, flip2d, hier-toy, hier-iso or folded3d");
  sub->add_option("--dim", c.dim, "Matrix dimension");
  sub->add_option("--half-dim", c.half_dim, "Flip model N (dimension 2N); N for susy-dos");
  sub->add_option("--levels", c.levels, "Hierarchy depth");
  sub->add_option("--folds", c.folds, "Number of dyadic folds (folded3d)");
  sub->add_option("--normalization", c.normalization, "inverse-dim or unit");
  sub->add_option("--trials", c.trials, "Monte Carlo trials");
  sub->add_option("--bins", c.bins, "Histogram bins");
  sub->add_option("--range-lo", c.range_lo, "Histogram lower edge");
  sub->add_option("--range-hi", c.range_hi, "Histogram upper edge");
  sub->add_option("--seed", c.seed, "Master seed (required for sampling experiments)");
  sub->add_option("--energy", c.energy, "Energy E");
  sub->add_option("--epsilon", c.epsilon, "Lorentzian width or tadpole regulator");
  sub->add_option("--nodes", c.nodes, "Quadrature nodes per axis");
  sub->add_option("--a", c.a_values, "Norm-tail thresholds a (repeatable)");
  sub->add_option("--dims", c.dims, "Dimensions for the convergence study");
  sub->add_option("--window-lo", c.window_lo, "Pair-correlation window lower edge");
  sub->add_option("--window-hi", c.window_hi, "Pair-correlation window upper edge");
  sub->add_option("--s-max", c.s_max, "Largest unfolded separation");
  sub->add_option("--s-bins", c.s_bins, "Separation bins");
  sub->add_option("--bandwidth", c.bandwidth, "Gaussian smoothing width (convergence)");
  sub->add_option("--inner-radius", c.inner_radius, "Tadpole cutoff radius A");
  sub->add_option("--tolerance", tolerances, "Tolerance override name=value (repeatable)");
  sub->add_option("--json", c.json_path, "Write the JSON report here");
  sub->add_option("--csv", c.csv_path, "Write binned data as CSV here");
  sub->add_option("--svg", c.svg_path, "Write an SVG plot here");
  sub->add_option("--dump-matrix", c.dump_matrix_path, "Write the first sampled matrix (binary)");
}

void apply_tolerances(const std::vector<std::string>& items, ExperimentConfig& c) {
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidSpec("--tolerance expects name=value, got " + item);
    try {
      std::size_t pos = 0;
      const std::string text = item.substr(eq + 1);
      const double v = std::stod(text, &pos);
      if (pos != text.size()) throw std::invalid_argument(text);
      c.tolerances[item.substr(0, eq)] = v;
    } catch (const std::exception&) {
      throw InvalidSpec("--tolerance value is not a number: " + item);
    }
  }
}

void print_summary(const ExperimentReport& rep) {
  std::cout << rep.experiment << " (" << rep.wall_time << " s)\n";
  for (const auto& [k, v] : rep.metrics) std::cout << "  " << k << " = " << v << '\n';
  for (const auto& c : rep.criteria) {
    std::cout << "  [" << (c.passed ? "PASS" : "FAIL") << "] " << c.name << ": " << c.detail << '\n';
  }
  if (rep.status == ReportStatus::NumericalFailure) std::cout << "  numerical failure: " << rep.error << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  ExperimentConfig config;
  std::vector<std::string> tolerances;
  std::string config_path = find_config_path(argc, argv);
  std::string suite;

  try {
    if (!config_path.empty()) apply_json_file(config_path, config);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  CLI::App app{"Random-matrix laboratory: ensembles, spectral statistics and mean-field integrals"};
  app.require_subcommand(0, 1);
  app.add_option("--suite", suite, "Run a named suite")->check(CLI::IsMember({"acceptance"}));
  std::uint64_t suite_seed = kAcceptanceSeed;
  app.add_option("--suite-seed", suite_seed, "Base seed of the acceptance suite");

  std::vector<std::pair<CLI::App*, Experiment>> subs;
  for (Experiment e : all_experiments()) {
    CLI::App* sub = app.add_subcommand(std::string(to_string(e)), describe(e));
    add_options(sub, config, tolerances, config_path);
    subs.emplace_back(sub, e);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    const WorkerPool pool(threads_from_env());

    if (!suite.empty()) {
      AcceptanceOptions opts;
      opts.seed = suite_seed;
      opts.parallel = pool.executor();
      opts.out = &std::cout;
      const auto results = run_acceptance(opts);
      std::size_t passed = 0;
      for (const auto& r : results) passed += r.passed ? 1 : 0;
      std::cout << passed << "/" << results.size() << " criteria passed\n";
      return passed == results.size() ? 0 : 1;
    }

    const CLI::App* chosen = nullptr;
    for (const auto& [sub, e] : subs) {
      if (sub->parsed()) {
        chosen = sub;
        config.experiment = e;
      }
    }
    if (chosen == nullptr) {
      std::cerr << app.help();
      return kExitInvalid;
    }
    apply_tolerances(tolerances, config);

    const ExperimentReport report = run(config, pool.executor());
    print_summary(report);
    write_outputs(report, config);
    return report.status == ReportStatus::NumericalFailure ? kExitNumerical : 0;
  } catch (const InvalidSpec& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ContractViolation& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}
