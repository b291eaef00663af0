#include "rmt/harness/acceptance.hpp"

#include <chrono>
#include <cstdio>
#include <ostream>

#include "rmt/error.hpp"
#include "rmt/harness/experiments.hpp"

namespace rmt::harness {

namespace {

struct Plan {
  const char* name;
  double time_limit;
};

constexpr Plan kPlans[kAcceptanceCriteria] = {
    {"semicircle-gue", 120.0},
    {"semicircle-flip", 120.0},
    {"convergence-rate", 900.0},
    {"susy-vs-mc", 300.0},
    {"critical-points", 1.0},
    {"norm-tail", 300.0},
    {"sine-kernel", 300.0},
    {"vandermonde", 60.0},
    {"tadpole", 10.0},
    {"toy-edge", 0.0},
    {"folded-semicircle", 0.0},
};

ExperimentConfig base(Experiment e, std::uint64_t seed) {
  ExperimentConfig c;
  c.experiment = e;
  c.seed = seed;
  return c;
}

// Passes when the report is numerically sound and every named check passed.
bool require(const ExperimentReport& rep, const std::vector<std::string>& names, std::string& detail) {
  bool ok = rep.status == ReportStatus::Ok;
  if (!ok) detail += "numerical failure: " + rep.error + "; ";
  for (const auto& name : names) {
    bool found = false;
    for (const auto& c : rep.criteria) {
      if (c.name != name) continue;
      found = true;
      ok = ok && c.passed;
      detail += c.detail + "; ";
    }
    if (!found) {
      ok = false;
      detail += name + " missing; ";
    }
  }
  return ok;
}

}  // namespace

AcceptanceResult run_criterion(int id, const AcceptanceOptions& options) {
  if (id < 1 || id > kAcceptanceCriteria) throw InvalidSpec("acceptance criterion must be in 1..11");
  AcceptanceResult res;
  res.id = id;
  res.name = kPlans[id - 1].name;
  res.time_limit = kPlans[id - 1].time_limit;
  const std::uint64_t seed = options.seed + static_cast<std::uint64_t>(id);
  const auto& par = options.parallel;
  const auto start = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = false;

  switch (id) {
    case 1:
    case 2: {
      ExperimentConfig c = base(Experiment::Dos, seed);
      if (id == 1) {
        c.ensemble = "gue";
        c.dim = 512;
      } else {
        c.ensemble = "flip2d";
        c.half_dim = 256;
      }
      c.trials = 200;
      res.report = run(c, par);
      ok = require(res.report, {"semicircle_sup", "semicircle_l1"}, detail);
      break;
    }
    case 3: {
      ExperimentConfig c = base(Experiment::Convergence, seed);
      c.dims = {64, 128, 256, 512, 1024};
      res.report = run(c, par);
      ok = require(res.report, {"exponent", "mc_error_budget"}, detail);
      break;
    }
    case 4: {
      ExperimentConfig c = base(Experiment::SusyDos, seed);
      c.half_dim = 16;
      c.energy = 0.0;
      c.epsilon = 0.02;
      res.report = run(c, par);
      ok = require(res.report, {"susy_vs_mc", "normalization_identity"}, detail);
      break;
    }
    case 5: {
      ExperimentConfig c = base(Experiment::CriticalPoints, seed);
      res.report = run(c, par);
      ok = require(res.report, {"cubic_root", "saddle_equations", "s1_s2_zero", "s3_s4_positive"}, detail);
      break;
    }
    case 6: {
      ok = true;
      for (std::size_t dim : {64u, 256u}) {
        ExperimentConfig c = base(Experiment::NormTail, seed + dim);
        c.ensemble = "gue";
        c.dim = dim;
        c.trials = 10000;
        c.a_values = {1.5, 2.0, 3.0};
        res.report = run(c, par);
        detail += "dim " + std::to_string(dim) + ": ";
        ok = require(res.report, {"tail_bound a=1.5", "tail_bound a=2", "tail_bound a=3"}, detail) && ok;
      }
      break;
    }
    case 7: {
      ExperimentConfig c = base(Experiment::PairCorrelation, seed);
      c.ensemble = "gue";
      c.dim = 400;
      c.trials = 200;
      c.window_lo = -0.2;
      c.window_hi = 0.2;
      c.s_max = 3.0;
      c.s_bins = 30;
      res.report = run(c, par);
      ok = require(res.report, {"sine_kernel", "level_repulsion"}, detail);
      break;
    }
    case 8: {
      ExperimentConfig c = base(Experiment::JointDensity, seed);
      c.trials = 100000;
      res.report = run(c, par);
      ok = require(res.report, {"chi_square"}, detail);
      break;
    }
    case 9: {
      ExperimentConfig c = base(Experiment::Tadpole, seed);
      c.epsilon = 1e-4;
      res.report = run(c, par);
      ok = require(res.report, {"imaginary_part"}, detail);
      break;
    }
    case 10: {
      ExperimentConfig c = base(Experiment::ToyEdge, seed);
      c.levels = 4;
      c.trials = 200;
      res.report = run(c, par);
      ok = require(res.report, {"dos_symmetric", "semiellipse_residual", "edge_bracket"}, detail);
      break;
    }
    case 11: {
      ExperimentConfig c = base(Experiment::Dos, seed);
      c.ensemble = "folded3d";
      c.dim = 256;
      c.folds = 4;
      c.trials = 200;
      c.tolerances["sup"] = 0.05;
      res.report = run(c, par);
      ok = require(res.report, {"semicircle_sup"}, detail);
      break;
    }
    default:
      break;
  }

  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (res.time_limit > 0.0 && res.seconds > res.time_limit) {
    ok = false;
    detail += "runtime over the limit; ";
  }
  if (detail.size() >= 2) detail.resize(detail.size() - 2);
  res.passed = ok;
  res.detail = detail;
  if (options.out) *options.out << format_line(res) << std::endl;
  return res;
}

std::vector<AcceptanceResult> run_acceptance(const AcceptanceOptions& options) {
  std::vector<AcceptanceResult> out;
  for (int id = 1; id <= kAcceptanceCriteria; ++id) out.push_back(run_criterion(id, options));
  return out;
}

std::string format_line(const AcceptanceResult& r) {
  char head[160];
  if (r.time_limit > 0.0) {
    std::snprintf(head, sizeof head, "criterion %2d %-18s %s  (%.2f s, limit %.0f s)", r.id, r.name.c_str(),
                  r.passed ? "PASS" : "FAIL", r.seconds, r.time_limit);
  } else {
    std::snprintf(head, sizeof head, "criterion %2d %-18s %s  (%.2f s)", r.id, r.name.c_str(),
                  r.passed ? "PASS" : "FAIL", r.seconds);
  }
  return std::string(head) + "  " + r.detail;
}

}  // namespace rmt::harness
