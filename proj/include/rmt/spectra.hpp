#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "rmt/ensembles.hpp"
#include "rmt/error.hpp"
#include "rmt/executor.hpp"

namespace rmt {

/// Max-abs norm of H - H^H relative to the Frobenius norm of H.
template <typename Derived>
double hermitian_defect(const Eigen::MatrixBase<Derived>& h) {
  const double scale = static_cast<double>(h.norm());
  if (scale == 0.0) return 0.0;
  return static_cast<double>((h - h.adjoint()).cwiseAbs().maxCoeff()) / scale;
}

/// Sorted eigenvalues of a dense Hermitian (or real symmetric) matrix.
/// Throws ContractViolation when H is not Hermitian to 1e-12 relative.
template <typename Derived>
Eigen::VectorXd eigenvalues(const Eigen::MatrixBase<Derived>& h) {
  using Scalar = typename Derived::Scalar;
  using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (h.rows() != h.cols()) throw ContractViolation("eigenvalues: matrix is not square");
  if (h.rows() == 0) return {};
  if (hermitian_defect(h) > 1e-12) throw ContractViolation("eigenvalues: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Dense> solver(Dense(h), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("eigenvalues: solver did not converge");
  return solver.eigenvalues().template cast<double>();
}

/// True when H[a][b] == H[D-1-b][D-1-a] bit for bit.
bool is_flip_symmetric(const Eigen::MatrixXcd& h);

/// Real symmetric matrix unitarily equivalent to a flip-symmetric H.
///
/// With J the antidiagonal permutation, flip symmetry plus Hermiticity
/// means conj(H) = J H J. A unitary W with W W^T = J built from 2x2 blocks
/// on the index pairs (p, D-1-p) then makes W^H H W real.
Eigen::MatrixXd flip_real_form(const Eigen::MatrixXcd& h);

/// Eigenvalues of a sampled matrix; uses the real form when H is exactly
/// flip-symmetric.
Eigen::VectorXd eigenvalues(const HermitianMatrix& h);

template <typename Derived>
double operator_norm(const Eigen::MatrixBase<Derived>& h) {
  const Eigen::VectorXd ev = eigenvalues(h);
  if (ev.size() == 0) return 0.0;
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

double operator_norm(const HermitianMatrix& h);

struct SpectrumBatch {
  EnsembleSpec spec;
  std::uint64_t master_seed = 0;
  std::vector<Eigen::VectorXd> eigenvalues;  // one ascending array per trial
  /// Per-trial shift that was subtracted from every eigenvalue (the shared
  /// diagonal V0 when centering was requested, otherwise 0).
  std::vector<double> shifts;

  [[nodiscard]] std::size_t trials() const { return eigenvalues.size(); }
  [[nodiscard]] std::size_t dim() const { return eigenvalues.empty() ? 0 : eigenvalues.front().size(); }
};

struct CollectOptions {
  /// Subtract the shared diagonal value from each spectrum (ensembles with
  /// a single V0 only). The shift is recorded in SpectrumBatch::shifts.
  bool center_shared_diagonal = false;
  /// Stream index of the first trial, so a batch can be extended later.
  std::uint64_t first_stream = 0;
};

/// Samples `trials` matrices, trial t drawing from RandomStream(seed, t).
SpectrumBatch collect_spectra(const EnsembleSpec& spec, std::size_t trials, std::uint64_t seed,
                              const ParallelFor& parallel = serial_for,
                              CollectOptions options = {});

/// Wraps plain eigenvalue arrays (synthetic data, tests).
SpectrumBatch make_batch(std::vector<Eigen::VectorXd> spectra);

struct DOSEstimate {
  std::vector<double> bin_edges;
  std::vector<double> density;
  std::vector<double> std_err;
  std::size_t total_eigenvalues = 0;
  std::size_t below_range = 0;
  std::size_t above_range = 0;
  std::size_t trials = 0;

  [[nodiscard]] std::size_t bins() const { return density.size(); }
  [[nodiscard]] double bin_width() const { return bin_edges[1] - bin_edges[0]; }
  [[nodiscard]] double bin_center(std::size_t i) const { return 0.5 * (bin_edges[i] + bin_edges[i + 1]); }
};

/// Histogram density with lower-inclusive uniform bins on [lo, hi).
/// Errors are the standard error of the per-trial histograms.
DOSEstimate estimate_dos(const SpectrumBatch& batch, std::size_t bins, double lo, double hi);

/// DOSEstimate on an explicit density (reference curves, tests).
DOSEstimate dos_from_function(const std::function<double(double)>& f, std::size_t bins, double lo,
                              double hi);

enum class Kernel : std::uint8_t { Gaussian, Lorentzian };

struct SmoothedDOS {
  std::vector<double> energies;
  std::vector<double> density;
  std::vector<double> std_err;
  double width = 0.0;
  Kernel kernel = Kernel::Gaussian;
};

/// Kernel-smoothed DOS on a grid. For Gaussian, `width` is the standard
/// deviation; for Lorentzian it is the half-width epsilon.
SmoothedDOS smoothed_dos(const SpectrumBatch& batch, const std::vector<double>& energies,
                         Kernel kernel, double width);

struct TailEstimate {
  double estimate = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  std::size_t exceedances = 0;
  std::size_t trials = 0;

  [[nodiscard]] double wilson_width() const { return wilson_hi - wilson_lo; }
};

/// Wilson score interval for k successes in n trials at normal quantile z.
std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054);

/// Operator norms of `trials` independent samples.
std::vector<double> sample_norms(const EnsembleSpec& spec, std::size_t trials, std::uint64_t seed,
                                 const ParallelFor& parallel = serial_for);

/// Fraction of norms with ||H|| >= a * sqrt(6).
TailEstimate tail_from_norms(const std::vector<double>& norms, double a);

TailEstimate tail_probability(const EnsembleSpec& spec, double a, std::size_t trials,
                              std::uint64_t seed, const ParallelFor& parallel = serial_for);

struct R2Estimate {
  std::vector<double> s_edges;
  std::vector<double> r2;
  std::vector<double> std_err;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double mean_spacing = 0.0;
  double mean_count = 0.0;

  [[nodiscard]] std::size_t bins() const { return r2.size(); }
  [[nodiscard]] double bin_center(std::size_t i) const { return 0.5 * (s_edges[i] + s_edges[i + 1]); }
};

/// Two-level correlation of the levels inside [lo, hi], unfolded with the
/// measured mean spacing. A Poisson process gives r2 = 1.
R2Estimate pair_correlation(const SpectrumBatch& batch, double lo, double hi, double s_max,
                            std::size_t s_bins);

/// Symmetric q-quantile of |E| under the histogram density.
double support_edge(const DOSEstimate& dos, double q = 0.999);
/// Symmetric q-quantile of the pooled |eigenvalues|.
double support_edge(const SpectrumBatch& batch, double q = 0.999);

struct SemiEllipseFit {
  double amplitude = 0.0;
  double edge = 0.0;
  double rms_residual = 0.0;
};

/// Least-squares fit of C sqrt(E0^2 - E^2) to the nonzero bins.
SemiEllipseFit fit_semiellipse(const DOSEstimate& dos);

struct PowerLawFit {
  double exponent = 0.0;
  double intercept = 0.0;  // log of the prefactor
  double r_squared = 0.0;
};

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points);

struct Distance {
  double sup = 0.0;
  double l1 = 0.0;
};

/// Distances between bin values and reference(bin center) over bins whose
/// center lies in [lo, hi].
Distance dos_distance(const DOSEstimate& dos, const std::function<double(double)>& reference,
                      double lo, double hi);

}  // namespace rmt
