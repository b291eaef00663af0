#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "rmt/executor.hpp"
#include "rmt/theory.hpp"

namespace rmt {

enum class QuadratureScheme : std::uint8_t {
  TensorGaussLegendre,  // one fixed rule, error from a second rule with doubled nodes
  AdaptiveNested,       // keep doubling until the error meets the tolerance
};

struct QuadratureConfig {
  int nodes_per_axis = 24;  // a0 and V0 nodes; b0 panels and the radial axis use the same count
  int radial_nodes = 24;
  double domain_halfwidth = 6.0;  // box half-width in units of 1/sqrt(N)
  QuadratureScheme scheme = QuadratureScheme::TensorGaussLegendre;
  /// Translate the a0 and b0 contours to the dominant saddle.
  bool translate = true;
  /// Imaginary part added to E (needed when the contours are not translated).
  double regulator = 0.0;
  double tolerance = 1e-3;
  int max_nodes = 96;
};

/// Throws InvalidSpec for node counts below 8 or a non-positive box.
void validate(const QuadratureConfig& config);

/// Integrand of the bosonic mean-field representation at one node.
///
/// Variables are the real contour parameters a0, b0, V0 and r = |a|^2.
/// With shifts (sa, sb) on the a0 and b0 contours,
///   A0 = a0 + sa + V0 + E,  iB0 = i (b0 + sb) + V0 + E,  D = A0^2 - r.
struct SusyIntegrand {
  int n = 4;
  std::complex<double> energy;  // E, possibly with a small positive imaginary part
  std::complex<double> shift_a{0.0, 0.0};
  std::complex<double> shift_b{0.0, 0.0};

  SusyIntegrand(int n, double e, const QuadratureConfig& config);

  struct Terms {
    std::complex<double> a0_cap;  // A0
    std::complex<double> ib0;     // iB0
    std::complex<double> d;       // A0^2 - |a|^2
    std::complex<double> log_gauss;
  };

  [[nodiscard]] Terms terms(double a0, double b0, double v0, double r) const;

  /// exp(-N(...)) (iB0)^(2N-2) D^(-N-2) times the density-of-states bracket.
  [[nodiscard]] std::complex<double> dos(double a0, double b0, double v0, double r) const;

  /// exp(-N(...)) (iB0)^(2N) D^(-N) times the no-observable bracket.
  [[nodiscard]] std::complex<double> normalization(double a0, double b0, double v0, double r) const;
};

struct SusyResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::complex<double> raw;  // complex integral before taking the physical part
  int nodes_per_axis = 0;
  std::size_t evaluations = 0;
  double min_abs_ib0 = 0.0;  // closest approach to the iB0 = 0 pole
  bool converged = false;
  bool near_pole = false;
};

/// Density of states of the flip model at finite N.
SusyResult nu_susy(int n, double e, const QuadratureConfig& config = {},
                   const ParallelFor& parallel = serial_for);

/// The same integral without observable; equals 1 exactly.
SusyResult susy_normalization(int n, double e, const QuadratureConfig& config = {},
                              const ParallelFor& parallel = serial_for);

/// Leading-order saddle plus Gaussian fluctuation result (1/pi) Im calE.
double leading_order_nu(int n, double e);

struct RegionScanConfig {
  double radius = 5.0;          // scan ||X|| <= radius
  int points_per_axis = 40;     // even, so the grid avoids the F_b pole plane
  int n = 16;                   // sets the excluded ball radius n^(-1/3 - delta)
  double delta = 0.1;
  double quadratic_coefficient = 0.25;
};

struct RegionScanReport {
  double action_at_origin = 0.0;
  double min_action_axis_boundary = 0.0;  // min Re S at ||X|| = radius along the 5 axes
  double ball_radius = 0.0;
  double min_action_ball_boundary = 0.0;  // min Re S on the spheres around S1 and S2
  double min_action_outside_balls = 0.0;  // over grid points away from all four balls
  std::size_t negative_points = 0;        // grid points away from the balls with Re S < 0
  std::size_t pole_points = 0;
  std::size_t scanned_points = 0;
  double min_action_near_s34 = 0.0;       // Re S sampled within 0.1 of S3 and S4
  double quadratic_offset = 0.0;          // max over grid of c ||X||^2 - Re S
};

RegionScanReport region_action_scan(const RegionScanConfig& config = {});

}  // namespace rmt
