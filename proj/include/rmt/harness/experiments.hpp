#pragma once

#include <cstdint>
#include <vector>

#include "rmt/executor.hpp"
#include "rmt/harness/config.hpp"
#include "rmt/harness/report.hpp"
#include "rmt/spectra.hpp"

namespace rmt::harness {

/// Runs one experiment. Numerical failures (insufficient statistics,
/// quadrature that misses its tolerance) produce a report with
/// status NumericalFailure instead of throwing; invalid configurations throw
/// InvalidSpec.
ExperimentReport run(const ExperimentConfig& config, const ParallelFor& parallel = serial_for);

/// Writes the JSON/CSV/SVG outputs requested by the config.
void write_outputs(const ExperimentReport& report, const ExperimentConfig& config);

struct ConvergenceConfig {
  std::vector<std::size_t> dims{64, 128, 256, 512, 1024};
  std::uint64_t seed = 0;
  double bandwidth = 0.3;
  double bulk = 1.0;
  std::size_t grid_points = 21;
  std::size_t batch = 50;
  std::size_t min_trials = 100;
  std::size_t max_trials = 4000;
  /// Stop once the largest MC standard error is below deviation * ratio.
  double error_ratio = 1.0 / 3.0;
};

struct ConvergencePoint {
  std::size_t dim = 0;
  std::size_t trials = 0;
  double deviation = 0.0;
  double max_std_err = 0.0;
};

struct ConvergenceResult {
  std::vector<ConvergencePoint> points;
  PowerLawFit fit;
  bool error_budget_met = false;
};

/// Bulk deviation of the flip-model DOS from the semicircle versus dim.
///
/// The DOS is smoothed with a Gaussian of width h and compared with the
/// semicircle smoothed the same way. The shared diagonal V0 is integrated
/// out exactly: spectra are centered and the kernel widened to
/// sqrt(h^2 + 1/D), which leaves the mean unchanged and removes the
/// dominant trial-to-trial fluctuation.
ConvergenceResult convergence_study(const ConvergenceConfig& config, const ParallelFor& parallel = serial_for);

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t degrees_of_freedom = 0;
  double p_value = 0.0;
  std::size_t cells = 0;
};

/// Chi-square test of 2x2 GUE eigenvalue pairs against gue_joint_density2,
/// binned in center c = (l1 + l2)/2 and gap g = l2 - l1.
ChiSquareResult joint_density_chi_square(const std::vector<std::pair<double, double>>& pairs);

}  // namespace rmt::harness
