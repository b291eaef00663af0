#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rmt/ensembles.hpp"

namespace rmt::harness {

enum class Experiment : std::uint8_t {
  Dos,
  PairCorrelation,
  NormTail,
  SusyDos,
  CriticalPoints,
  Tadpole,
  Convergence,
  ToyEdge,
  JointDensity,
};

std::string_view to_string(Experiment e);
Experiment parse_experiment(std::string_view name);  // throws InvalidSpec
const std::vector<Experiment>& all_experiments();

/// True for experiments that draw random matrices and therefore need a seed.
bool needs_seed(Experiment e);

/// Flat configuration shared by every subcommand. Fields an experiment does
/// not use are ignored; unset optionals fall back to per-experiment defaults.
struct ExperimentConfig {
  Experiment experiment = Experiment::Dos;

  std::string ensemble = "gue";
  std::optional<std::size_t> dim;
  std::optional<std::size_t> half_dim;
  std::optional<std::size_t> levels;
  std::size_t folds = 0;
  std::string normalization = "inverse-dim";

  std::optional<std::size_t> trials;
  std::size_t bins = 80;
  double range_lo = -2.5;
  double range_hi = 2.5;
  std::optional<std::uint64_t> seed;

  double energy = 0.0;
  std::optional<double> epsilon;
  std::optional<int> nodes;
  std::vector<double> a_values;
  std::vector<std::size_t> dims;
  double window_lo = -0.2;
  double window_hi = 0.2;
  double s_max = 3.0;
  std::size_t s_bins = 30;
  double bandwidth = 0.3;
  double inner_radius = 10.0;

  std::map<std::string, double> tolerances;

  std::string json_path;
  std::string csv_path;
  std::string svg_path;
  std::string dump_matrix_path;

  [[nodiscard]] double tolerance(const std::string& name, double fallback) const;
};

/// Builds the ensemble from the kind name and the dimension fields.
EnsembleSpec ensemble_spec(const ExperimentConfig& config);

/// Throws InvalidSpec for inconsistent settings (missing seed, bad range,
/// unwritable output directory, ...).
void validate(const ExperimentConfig& config);

nlohmann::ordered_json to_json(const ExperimentConfig& config);

/// Applies keys of a JSON object onto config. Keys use the CLI flag names
/// with dashes or underscores. Unknown keys raise InvalidSpec.
void apply_json(const nlohmann::json& j, ExperimentConfig& config);
void apply_json_file(const std::filesystem::path& path, ExperimentConfig& config);

}  // namespace rmt::harness
