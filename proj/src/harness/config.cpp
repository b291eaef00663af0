#include "rmt/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "rmt/error.hpp"

namespace rmt::harness {

namespace {

constexpr std::pair<Experiment, std::string_view> kNames[] = {
    {Experiment::Dos, "dos"},
    {Experiment::PairCorrelation, "pair-correlation"},
    {Experiment::NormTail, "norm-tail"},
    {Experiment::SusyDos, "susy-dos"},
    {Experiment::CriticalPoints, "critical-points"},
    {Experiment::Tadpole, "tadpole"},
    {Experiment::Convergence, "convergence"},
    {Experiment::ToyEdge, "toy-edge"},
    {Experiment::JointDensity, "joint-density"},
};

void check_output_path(const std::string& path) {
  if (path.empty()) return;
  const std::filesystem::path p(path);
  const auto parent = p.has_parent_path() ? p.parent_path() : std::filesystem::path(".");
  if (!std::filesystem::is_directory(parent)) {
    throw InvalidSpec("output directory does not exist: " + parent.string());
  }
}

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

template <typename T>
T get_as(const nlohmann::json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidSpec("config key '" + key + "' has the wrong type");
  }
}

}  // namespace

std::string_view to_string(Experiment e) {
  for (const auto& [k, name] : kNames) {
    if (k == e) return name;
  }
  return "unknown";
}

Experiment parse_experiment(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  throw InvalidSpec("unknown experiment '" + std::string(name) + "'");
}

const std::vector<Experiment>& all_experiments() {
  static const std::vector<Experiment> list = [] {
    std::vector<Experiment> v;
    for (const auto& [k, n] : kNames) v.push_back(k);
    return v;
  }();
  return list;
}

bool needs_seed(Experiment e) {
  return e != Experiment::CriticalPoints && e != Experiment::Tadpole;
}

double ExperimentConfig::tolerance(const std::string& name, double fallback) const {
  const auto it = tolerances.find(name);
  return it == tolerances.end() ? fallback : it->second;
}

EnsembleSpec ensemble_spec(const ExperimentConfig& c) {
  const EnsembleKind kind = parse_ensemble_kind(c.ensemble);
  Normalization norm = Normalization::InverseDim;
  if (c.normalization == "unit") {
    norm = Normalization::UnitEntries;
  } else if (c.normalization != "inverse-dim") {
    throw InvalidSpec("normalization must be 'inverse-dim' or 'unit'");
  }
  auto need = [](const std::optional<std::size_t>& v, const char* what) {
    if (!v) throw InvalidSpec(std::string("ensemble needs --") + what);
    return *v;
  };
  EnsembleSpec spec;
  switch (kind) {
    case EnsembleKind::GUE:
      spec = EnsembleSpec::gue(need(c.dim, "dim"), norm);
      break;
    case EnsembleKind::Flip2D:
      if (c.half_dim) {
        spec = EnsembleSpec::flip2d(*c.half_dim, norm);
        if (c.dim && *c.dim != spec.dim) throw InvalidSpec("flip2d: dim must equal 2 * half-dim");
      } else {
        const std::size_t d = need(c.dim, "half-dim");
        if (d % 2 != 0) throw InvalidSpec("flip2d: dim must be even");
        spec = EnsembleSpec::flip2d(d / 2, norm);
      }
      break;
    case EnsembleKind::HierToy:
      spec = EnsembleSpec::hier_toy(need(c.levels, "levels"), norm);
      break;
    case EnsembleKind::HierIso:
      spec = EnsembleSpec::hier_iso(need(c.levels, "levels"), norm);
      break;
    case EnsembleKind::Folded3D:
      spec = EnsembleSpec::folded3d(need(c.dim, "dim"), c.folds, norm);
      break;
  }
  if ((kind == EnsembleKind::HierToy || kind == EnsembleKind::HierIso) && c.dim && *c.dim != spec.dim) {
    throw InvalidSpec("dim does not match the hierarchy depth");
  }
  validate(spec);
  return spec;
}

void validate(const ExperimentConfig& c) {
  if (needs_seed(c.experiment) && !c.seed) {
    throw InvalidSpec("--seed is required for " + std::string(to_string(c.experiment)));
  }
  if (c.trials && *c.trials == 0) throw InvalidSpec("--trials must be positive");
  if (c.bins < 2) throw InvalidSpec("--bins must be at least 2");
  if (!std::isfinite(c.range_lo) || !std::isfinite(c.range_hi) || !(c.range_hi > c.range_lo)) {
    throw InvalidSpec("--range must be finite with lo < hi");
  }
  if (!(c.window_hi > c.window_lo)) throw InvalidSpec("--window must have lo < hi");
  if (!(c.s_max > 0.0) || c.s_bins == 0) throw InvalidSpec("--s-max and --s-bins must be positive");
  if (!(c.bandwidth > 0.0)) throw InvalidSpec("--bandwidth must be positive");
  if (c.epsilon && !(*c.epsilon > 0.0)) throw InvalidSpec("--epsilon must be positive");
  if (c.nodes && *c.nodes < 8) throw InvalidSpec("--nodes must be at least 8");
  for (double a : c.a_values) {
    if (!(a >= 0.0)) throw InvalidSpec("--a values must be non-negative");
  }
  for (const auto& p : {c.json_path, c.csv_path, c.svg_path, c.dump_matrix_path}) check_output_path(p);
  switch (c.experiment) {
    case Experiment::Dos:
    case Experiment::PairCorrelation:
    case Experiment::NormTail:
      (void)ensemble_spec(c);
      break;
    case Experiment::ToyEdge: {
      ExperimentConfig toy = c;
      toy.ensemble = "hier-toy";
      if (!toy.levels) toy.levels = 4;
      (void)ensemble_spec(toy);
      break;
    }
    default:
      break;
  }
}

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["experiment"] = to_string(c.experiment);
  j["ensemble"] = c.ensemble;
  if (c.dim) j["dim"] = *c.dim;
  if (c.half_dim) j["half-dim"] = *c.half_dim;
  if (c.levels) j["levels"] = *c.levels;
  j["folds"] = c.folds;
  j["normalization"] = c.normalization;
  if (c.trials) j["trials"] = *c.trials;
  j["bins"] = c.bins;
  j["range"] = {c.range_lo, c.range_hi};
  if (c.seed) j["seed"] = *c.seed;
  j["energy"] = c.energy;
  if (c.epsilon) j["epsilon"] = *c.epsilon;
  if (c.nodes) j["nodes"] = *c.nodes;
  if (!c.a_values.empty()) j["a"] = c.a_values;
  if (!c.dims.empty()) j["dims"] = c.dims;
  j["window"] = {c.window_lo, c.window_hi};
  j["s-max"] = c.s_max;
  j["s-bins"] = c.s_bins;
  j["bandwidth"] = c.bandwidth;
  j["inner-radius"] = c.inner_radius;
  if (!c.tolerances.empty()) j["tolerance"] = c.tolerances;
  return j;
}

void apply_json(const nlohmann::json& j, ExperimentConfig& c) {
  if (!j.is_object()) throw InvalidSpec("config file must hold a JSON object");
  for (const auto& [raw_key, v] : j.items()) {
    const std::string key = normalize_key(raw_key);
    if (key == "experiment") {
      c.experiment = parse_experiment(get_as<std::string>(v, key));
    } else if (key == "ensemble") {
      c.ensemble = get_as<std::string>(v, key);
    } else if (key == "dim") {
      c.dim = get_as<std::size_t>(v, key);
    } else if (key == "half-dim") {
      c.half_dim = get_as<std::size_t>(v, key);
    } else if (key == "levels") {
      c.levels = get_as<std::size_t>(v, key);
    } else if (key == "folds") {
      c.folds = get_as<std::size_t>(v, key);
    } else if (key == "normalization") {
      c.normalization = get_as<std::string>(v, key);
    } else if (key == "trials") {
      c.trials = get_as<std::size_t>(v, key);
    } else if (key == "bins") {
      c.bins = get_as<std::size_t>(v, key);
    } else if (key == "range") {
      const auto r = get_as<std::vector<double>>(v, key);
      if (r.size() != 2) throw InvalidSpec("range needs two numbers");
      c.range_lo = r[0];
      c.range_hi = r[1];
    } else if (key == "seed") {
      c.seed = get_as<std::uint64_t>(v, key);
    } else if (key == "energy") {
      c.energy = get_as<double>(v, key);
    } else if (key == "epsilon") {
      c.epsilon = get_as<double>(v, key);
    } else if (key == "nodes") {
      c.nodes = get_as<int>(v, key);
    } else if (key == "a") {
      c.a_values = get_as<std::vector<double>>(v, key);
    } else if (key == "dims") {
      c.dims = get_as<std::vector<std::size_t>>(v, key);
    } else if (key == "window") {
      const auto w = get_as<std::vector<double>>(v, key);
      if (w.size() != 2) throw InvalidSpec("window needs two numbers");
      c.window_lo = w[0];
      c.window_hi = w[1];
    } else if (key == "s-max") {
      c.s_max = get_as<double>(v, key);
    } else if (key == "s-bins") {
      c.s_bins = get_as<std::size_t>(v, key);
    } else if (key == "bandwidth") {
      c.bandwidth = get_as<double>(v, key);
    } else if (key == "inner-radius") {
      c.inner_radius = get_as<double>(v, key);
    } else if (key == "tolerance") {
      c.tolerances = get_as<std::map<std::string, double>>(v, key);
    } else if (key == "json") {
      c.json_path = get_as<std::string>(v, key);
    } else if (key == "csv") {
      c.csv_path = get_as<std::string>(v, key);
    } else if (key == "svg") {
      c.svg_path = get_as<std::string>(v, key);
    } else if (key == "dump-matrix") {
      c.dump_matrix_path = get_as<std::string>(v, key);
    } else {
      throw InvalidSpec("unknown config key '" + raw_key + "'");
    }
  }
}

void apply_json_file(const std::filesystem::path& path, ExperimentConfig& c) {
  std::ifstream in(path);
  if (!in) throw InvalidSpec("cannot read config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidSpec("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  apply_json(j, c);
}

}  // namespace rmt::harness
