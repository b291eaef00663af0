#include "rmt/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/tools/minima.hpp>

namespace rmt {

namespace {

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Standard error of the mean of per-trial values, accumulated in trial order.
struct RunningMoments {
  std::vector<double> sum;
  std::vector<double> sum_sq;

  explicit RunningMoments(std::size_t n) : sum(n, 0.0), sum_sq(n, 0.0) {}

  void add(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      sum[i] += values[i];
      sum_sq[i] += values[i] * values[i];
    }
  }

  [[nodiscard]] std::vector<double> std_err(std::size_t trials) const {
    std::vector<double> out(sum.size(), 0.0);
    if (trials < 2) return out;
    const auto t = static_cast<double>(trials);
    for (std::size_t i = 0; i < sum.size(); ++i) {
      const double m = sum[i] / t;
      const double var = std::max(0.0, (sum_sq[i] - t * m * m) / (t - 1.0));
      out[i] = std::sqrt(var / t);
    }
    return out;
  }
};

}  // namespace

bool is_flip_symmetric(const Eigen::MatrixXcd& h) {
  const Eigen::Index d = h.rows();
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      if (h(a, b) != h(d - 1 - b, d - 1 - a)) return false;
    }
  }
  return true;
}

Eigen::MatrixXd flip_real_form(const Eigen::MatrixXcd& h) {
  const Eigen::Index d = h.rows();
  const double r = std::numbers::sqrt2 / 2.0;
  const std::complex<double> i(0.0, 1.0);

  // Right multiplication by W: columns (p, q = D-1-p) become
  // ((h_p + h_q) / sqrt2, i (h_p - h_q) / sqrt2).
  Eigen::MatrixXcd hw = h;
  for (Eigen::Index p = 0; p < d / 2; ++p) {
    const Eigen::Index q = d - 1 - p;
    hw.col(p) = r * (h.col(p) + h.col(q));
    hw.col(q) = (i * r) * (h.col(p) - h.col(q));
  }
  // Left multiplication by W^H acts the same way on rows, conjugated.
  Eigen::MatrixXd s(d, d);
  for (Eigen::Index p = 0; p < d / 2; ++p) {
    const Eigen::Index q = d - 1 - p;
    s.row(p) = (r * (hw.row(p) + hw.row(q))).real();
    s.row(q) = ((-i * r) * (hw.row(p) - hw.row(q))).real();
  }
  if (d % 2 == 1) s.row(d / 2) = hw.row(d / 2).real();
  // Symmetrize away rounding so the solver sees an exactly symmetric input.
  return 0.5 * (s + s.transpose());
}

Eigen::VectorXd eigenvalues(const HermitianMatrix& h) {
  if (is_flip_symmetric(h.entries)) {
    if (hermitian_defect(h.entries) > 1e-12) throw ContractViolation("eigenvalues: matrix is not Hermitian");
    return eigenvalues(flip_real_form(h.entries));
  }
  return eigenvalues(h.entries);
}

double operator_norm(const HermitianMatrix& h) {
  const Eigen::VectorXd ev = eigenvalues(h);
  if (ev.size() == 0) return 0.0;
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

SpectrumBatch collect_spectra(const EnsembleSpec& spec, std::size_t trials, std::uint64_t seed,
                              const ParallelFor& parallel, CollectOptions options) {
  if (options.center_shared_diagonal && !has_shared_diagonal(spec)) {
    throw InvalidSpec("centering requires an ensemble with a single shared diagonal");
  }
  const EnsembleSampler sampler(spec);
  SpectrumBatch batch;
  batch.spec = spec;
  batch.master_seed = seed;
  batch.eigenvalues.resize(trials);
  batch.shifts.assign(trials, 0.0);
  parallel(trials, [&](std::size_t t) {
    RandomStream stream(seed, options.first_stream + t);
    const HermitianMatrix h = sampler(stream);
    Eigen::VectorXd ev = eigenvalues(h);
    if (options.center_shared_diagonal) {
      const double v0 = h.entries(0, 0).real();
      ev.array() -= v0;
      batch.shifts[t] = v0;
    }
    batch.eigenvalues[t] = std::move(ev);
  });
  return batch;
}

SpectrumBatch make_batch(std::vector<Eigen::VectorXd> spectra) {
  SpectrumBatch batch;
  for (auto& s : spectra) std::sort(s.begin(), s.end());
  batch.shifts.assign(spectra.size(), 0.0);
  batch.eigenvalues = std::move(spectra);
  return batch;
}

DOSEstimate estimate_dos(const SpectrumBatch& batch, std::size_t bins, double lo, double hi) {
  if (batch.trials() == 0) throw InsufficientStatistics("estimate_dos: empty batch");
  if (bins < 2) throw InvalidSpec("estimate_dos: need at least 2 bins");
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
    throw InvalidSpec("estimate_dos: range must be finite with lo < hi");
  }
  DOSEstimate dos;
  dos.trials = batch.trials();
  dos.bin_edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) dos.bin_edges[i] = lo + width * static_cast<double>(i);

  RunningMoments moments(bins);
  std::vector<double> per_trial(bins);
  for (const auto& ev : batch.eigenvalues) {
    std::fill(per_trial.begin(), per_trial.end(), 0.0);
    const double scale = 1.0 / (static_cast<double>(ev.size()) * width);
    for (double x : ev) {
      ++dos.total_eigenvalues;
      if (x < lo) {
        ++dos.below_range;
        continue;
      }
      auto k = static_cast<std::size_t>(std::floor((x - lo) / width));
      // Guard the floating-point edge so a value just below hi stays in range.
      if (k >= bins) {
        if (x < hi) {
          k = bins - 1;
        } else {
          ++dos.above_range;
          continue;
        }
      }
      per_trial[k] += scale;
    }
    moments.add(per_trial);
  }
  const auto t = static_cast<double>(batch.trials());
  dos.density.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) dos.density[i] = moments.sum[i] / t;
  dos.std_err = moments.std_err(batch.trials());
  return dos;
}

DOSEstimate dos_from_function(const std::function<double(double)>& f, std::size_t bins, double lo,
                              double hi) {
  DOSEstimate dos;
  dos.bin_edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) dos.bin_edges[i] = lo + width * static_cast<double>(i);
  dos.density.resize(bins);
  dos.std_err.assign(bins, 0.0);
  for (std::size_t i = 0; i < bins; ++i) dos.density[i] = f(dos.bin_center(i));
  dos.trials = 1;
  return dos;
}

SmoothedDOS smoothed_dos(const SpectrumBatch& batch, const std::vector<double>& energies,
                         Kernel kernel, double width) {
  if (batch.trials() == 0) throw InsufficientStatistics("smoothed_dos: empty batch");
  if (!(width > 0.0)) throw InvalidSpec("smoothed_dos: kernel width must be positive");
  SmoothedDOS out;
  out.energies = energies;
  out.width = width;
  out.kernel = kernel;
  const std::size_t n = energies.size();
  RunningMoments moments(n);
  std::vector<double> per_trial(n);
  const double gauss_norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * width);
  for (const auto& ev : batch.eigenvalues) {
    const double inv_dim = 1.0 / static_cast<double>(ev.size());
    for (std::size_t g = 0; g < n; ++g) {
      double acc = 0.0;
      for (double x : ev) {
        const double u = energies[g] - x;
        if (kernel == Kernel::Gaussian) {
          const double z = u / width;
          acc += gauss_norm * std::exp(-0.5 * z * z);
        } else {
          acc += width / (std::numbers::pi * (u * u + width * width));
        }
      }
      per_trial[g] = acc * inv_dim;
    }
    moments.add(per_trial);
  }
  out.density.resize(n);
  for (std::size_t g = 0; g < n; ++g) out.density[g] = moments.sum[g] / static_cast<double>(batch.trials());
  out.std_err = moments.std_err(batch.trials());
  return out;
}

std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double z) {
  if (n == 0) throw InsufficientStatistics("wilson_interval: no trials");
  const auto nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

std::vector<double> sample_norms(const EnsembleSpec& spec, std::size_t trials, std::uint64_t seed,
                                 const ParallelFor& parallel) {
  const EnsembleSampler sampler(spec);
  std::vector<double> norms(trials);
  parallel(trials, [&](std::size_t t) {
    RandomStream stream(seed, t);
    norms[t] = operator_norm(sampler(stream));
  });
  return norms;
}

TailEstimate tail_from_norms(const std::vector<double>& norms, double a) {
  if (norms.empty()) throw InsufficientStatistics("tail_probability: no trials");
  const double threshold = a * std::sqrt(6.0);
  TailEstimate out;
  out.trials = norms.size();
  out.exceedances = static_cast<std::size_t>(
      std::count_if(norms.begin(), norms.end(), [threshold](double x) { return x >= threshold; }));
  out.estimate = static_cast<double>(out.exceedances) / static_cast<double>(out.trials);
  std::tie(out.wilson_lo, out.wilson_hi) = wilson_interval(out.exceedances, out.trials);
  return out;
}

TailEstimate tail_probability(const EnsembleSpec& spec, double a, std::size_t trials,
                              std::uint64_t seed, const ParallelFor& parallel) {
  if (trials == 0) throw InsufficientStatistics("tail_probability: no trials");
  return tail_from_norms(sample_norms(spec, trials, seed, parallel), a);
}

R2Estimate pair_correlation(const SpectrumBatch& batch, double lo, double hi, double s_max,
                            std::size_t s_bins) {
  if (batch.trials() == 0) throw InsufficientStatistics("pair_correlation: empty batch");
  if (!(hi > lo) || !(s_max > 0.0) || s_bins == 0) {
    throw InvalidSpec("pair_correlation: need lo < hi, s_max > 0 and at least one bin");
  }
  R2Estimate out;
  out.window_lo = lo;
  out.window_hi = hi;

  std::vector<std::vector<double>> windows(batch.trials());
  std::size_t total = 0;
  for (std::size_t t = 0; t < batch.trials(); ++t) {
    for (double x : batch.eigenvalues[t]) {
      if (x >= lo && x < hi) windows[t].push_back(x);
    }
    total += windows[t].size();
  }
  const double n_mean = static_cast<double>(total) / static_cast<double>(batch.trials());
  if (n_mean < 10.0) {
    throw InsufficientStatistics("pair_correlation: fewer than 10 levels per trial in the window");
  }
  out.mean_count = n_mean;
  out.mean_spacing = (hi - lo) / n_mean;

  const double ds = s_max / static_cast<double>(s_bins);
  out.s_edges.resize(s_bins + 1);
  for (std::size_t i = 0; i <= s_bins; ++i) out.s_edges[i] = ds * static_cast<double>(i);

  // Expected unordered pairs per bin for a unit-density Poisson process on
  // an interval of length n_mean: integral of (n_mean - s) over the bin.
  std::vector<double> expected(s_bins);
  for (std::size_t i = 0; i < s_bins; ++i) {
    const double a = out.s_edges[i];
    const double b = std::min(out.s_edges[i + 1], n_mean);
    expected[i] = b > a ? n_mean * (b - a) - 0.5 * (b * b - a * a) : 0.0;
  }

  RunningMoments moments(s_bins);
  std::vector<double> per_trial(s_bins);
  for (const auto& w : windows) {
    std::fill(per_trial.begin(), per_trial.end(), 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (std::size_t j = i + 1; j < w.size(); ++j) {
        const double s = (w[j] - w[i]) / out.mean_spacing;
        if (s >= s_max) break;
        per_trial[static_cast<std::size_t>(s / ds)] += 1.0;
      }
    }
    for (std::size_t i = 0; i < s_bins; ++i) per_trial[i] = expected[i] > 0.0 ? per_trial[i] / expected[i] : 0.0;
    moments.add(per_trial);
  }
  out.r2.resize(s_bins);
  for (std::size_t i = 0; i < s_bins; ++i) out.r2[i] = moments.sum[i] / static_cast<double>(batch.trials());
  out.std_err = moments.std_err(batch.trials());
  return out;
}

double support_edge(const DOSEstimate& dos, double q) {
  if (!(q > 0.5 && q < 1.0)) throw InvalidSpec("support_edge: q must lie in (0.5, 1)");
  const double w = dos.bin_width();
  double total = 0.0;
  for (double d : dos.density) total += d * w;
  if (!(total > 0.0)) throw InsufficientStatistics("support_edge: empty histogram");

  auto mass_within = [&](double x) {
    double m = 0.0;
    for (std::size_t i = 0; i < dos.bins(); ++i) {
      const double a = std::max(dos.bin_edges[i], -x);
      const double b = std::min(dos.bin_edges[i + 1], x);
      if (b > a) m += dos.density[i] * (b - a);
    }
    return m / total;
  };
  double lo = 0.0;
  double hi = std::max(std::abs(dos.bin_edges.front()), std::abs(dos.bin_edges.back()));
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass_within(mid) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double support_edge(const SpectrumBatch& batch, double q) {
  if (!(q > 0.5 && q < 1.0)) throw InvalidSpec("support_edge: q must lie in (0.5, 1)");
  std::vector<double> mags;
  for (const auto& ev : batch.eigenvalues) {
    for (double x : ev) mags.push_back(std::abs(x));
  }
  if (mags.empty()) throw InsufficientStatistics("support_edge: empty batch");
  std::sort(mags.begin(), mags.end());
  // Linear interpolation between order statistics.
  const double pos = q * static_cast<double>(mags.size() - 1);
  const auto k = static_cast<std::size_t>(pos);
  if (k + 1 >= mags.size()) return mags.back();
  const double frac = pos - static_cast<double>(k);
  return mags[k] + frac * (mags[k + 1] - mags[k]);
}

SemiEllipseFit fit_semiellipse(const DOSEstimate& dos) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < dos.bins(); ++i) {
    if (dos.density[i] > 0.0) {
      xs.push_back(dos.bin_center(i));
      ys.push_back(dos.density[i]);
    }
  }
  if (xs.size() < 5) throw InsufficientStatistics("fit_semiellipse: fewer than 5 usable bins");

  // For fixed E0 the amplitude is linear least squares; return SSE and C.
  auto solve = [&](double e0) {
    double fy = 0.0;
    double ff = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double f = std::sqrt(std::max(0.0, e0 * e0 - xs[i] * xs[i]));
      fy += f * ys[i];
      ff += f * f;
    }
    const double c = ff > 0.0 ? fy / ff : 0.0;
    double sse = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = ys[i] - c * std::sqrt(std::max(0.0, e0 * e0 - xs[i] * xs[i]));
      sse += r * r;
    }
    return std::pair{sse, c};
  };

  double xmax = 0.0;
  for (double x : xs) xmax = std::max(xmax, std::abs(x));
  const double half_bin = 0.5 * dos.bin_width();
  const double lo = std::max(half_bin, 0.25 * xmax);
  const double hi = 1.5 * xmax + half_bin;

  // Coarse scan to pick the basin, then Brent inside the neighbouring cells.
  constexpr int kScan = 200;
  double best = lo;
  double best_sse = solve(lo).first;
  for (int k = 1; k <= kScan; ++k) {
    const double e0 = lo + (hi - lo) * k / kScan;
    const double sse = solve(e0).first;
    if (sse < best_sse) {
      best_sse = sse;
      best = e0;
    }
  }
  const double step = (hi - lo) / kScan;
  const auto [e0, sse] = boost::math::tools::brent_find_minima(
      [&](double e) { return solve(e).first; }, std::max(lo, best - step), std::min(hi, best + step),
      52);
  SemiEllipseFit fit;
  fit.edge = e0;
  fit.amplitude = solve(e0).second;
  fit.rms_residual = std::sqrt(sse / static_cast<double>(xs.size()));
  return fit;
}

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw InsufficientStatistics("fit_power_law: need at least 3 points");
  std::vector<double> lx;
  std::vector<double> ly;
  for (const auto& [n, d] : points) {
    if (!(n > 0.0) || !(d > 0.0)) throw InvalidSpec("fit_power_law: values must be positive");
    lx.push_back(std::log(n));
    ly.push_back(std::log(d));
  }
  const double mx = mean_of(lx);
  const double my = mean_of(ly);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw InvalidSpec("fit_power_law: all abscissae equal");
  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

Distance dos_distance(const DOSEstimate& dos, const std::function<double(double)>& reference,
                      double lo, double hi) {
  Distance d;
  const double w = dos.bin_width();
  for (std::size_t i = 0; i < dos.bins(); ++i) {
    const double x = dos.bin_center(i);
    if (x < lo || x > hi) continue;
    const double diff = std::abs(dos.density[i] - reference(x));
    d.sup = std::max(d.sup, diff);
    d.l1 += diff * w;
  }
  return d;
}

}  // namespace rmt
