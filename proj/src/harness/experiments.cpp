#include "rmt/harness/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "rmt/error.hpp"
#include "rmt/matrix_io.hpp"
#include "rmt/quadrature.hpp"
#include "rmt/susy.hpp"
#include "rmt/theory.hpp"

namespace rmt::harness {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::vector<SeriesRow> dos_rows(const DOSEstimate& dos, const std::function<double(double)>& reference) {
  std::vector<SeriesRow> rows;
  rows.reserve(dos.bins());
  for (std::size_t i = 0; i < dos.bins(); ++i) {
    const double x = dos.bin_center(i);
    rows.push_back({x, dos.density[i], dos.std_err[i], reference(x)});
  }
  return rows;
}

// Largest |nu(E) - nu(-E)| / (se(E) + se(-E)) over mirrored bins of a
// histogram on a symmetric range.
double symmetry_score(const DOSEstimate& dos) {
  double worst = 0.0;
  const std::size_t n = dos.bins();
  for (std::size_t i = 0; i < n / 2; ++i) {
    const std::size_t j = n - 1 - i;
    const double diff = std::abs(dos.density[i] - dos.density[j]);
    const double se = dos.std_err[i] + dos.std_err[j];
    if (diff == 0.0) continue;
    worst = std::max(worst, se > 0.0 ? diff / se : std::numeric_limits<double>::infinity());
  }
  return worst;
}

std::function<double(double)> semicircle_reference(const EnsembleSpec& spec) {
  const double scale =
      spec.normalization == Normalization::UnitEntries ? std::sqrt(static_cast<double>(spec.dim)) : 1.0;
  return [scale](double e) { return semicircle(e / scale) / scale; };
}

void maybe_dump(const ExperimentConfig& c, const EnsembleSpec& spec) {
  if (c.dump_matrix_path.empty()) return;
  RandomStream stream(*c.seed, 0);
  write_matrix(std::filesystem::path(c.dump_matrix_path), sample(spec, stream));
}

void run_dos(const ExperimentConfig& c, const ParallelFor& parallel, ExperimentReport& rep) {
  const EnsembleSpec spec = ensemble_spec(c);
  maybe_dump(c, spec);
  const std::size_t trials = c.trials.value_or(200);
  const SpectrumBatch batch = collect_spectra(spec, trials, *c.seed, parallel);
  const DOSEstimate dos = estimate_dos(batch, c.bins, c.range_lo, c.range_hi);
  const auto reference = semicircle_reference(spec);
  const double edge = 2.0 * std::sqrt(spec.normalization == Normalization::UnitEntries
                                          ? static_cast<double>(spec.dim)
                                          : 1.0);
  const Distance dist = dos_distance(dos, reference, -edge, edge);

  rep.metric("dim", static_cast<double>(spec.dim));
  rep.metric("trials", static_cast<double>(trials));
  rep.metric("independent_parameters", static_cast<double>(independent_parameter_count(spec)));
  rep.metric("sup_distance", dist.sup);
  rep.metric("l1_distance", dist.l1);
  rep.metric("support_edge", support_edge(batch));
  rep.metric("total_eigenvalues", static_cast<double>(dos.total_eigenvalues));
  rep.metric("below_range", static_cast<double>(dos.below_range));
  rep.metric("above_range", static_cast<double>(dos.above_range));
  rep.check("semicircle_sup", dist.sup <= c.tolerance("sup", 0.03),
            "sup " + num(dist.sup) + " <= " + num(c.tolerance("sup", 0.03)));
  rep.check("semicircle_l1", dist.l1 <= c.tolerance("l1", 0.03),
            "L1 " + num(dist.l1) + " <= " + num(c.tolerance("l1", 0.03)));
  if (std::abs(c.range_lo + c.range_hi) < 1e-12 && trials > 1) {
    const double score = symmetry_score(dos);
    rep.metric("symmetry_score", score);
    rep.check("dos_symmetric", score <= 3.0, "max mirrored-bin z " + num(score) + " <= 3");
  }
  rep.series = dos_rows(dos, reference);
  rep.series_label = "density of states vs semicircle";
}

void run_pair_correlation(const ExperimentConfig& c, const ParallelFor& parallel, ExperimentReport& rep) {
  const EnsembleSpec spec = ensemble_spec(c);
  maybe_dump(c, spec);
  const std::size_t trials = c.trials.value_or(200);
  const SpectrumBatch batch = collect_spectra(spec, trials, *c.seed, parallel);
  rep.metric("dim", static_cast<double>(spec.dim));
  rep.metric("trials", static_cast<double>(trials));
  const R2Estimate r2 = pair_correlation(batch, c.window_lo, c.window_hi, c.s_max, c.s_bins);
  rep.metric("mean_spacing", r2.mean_spacing);
  rep.metric("levels_per_window", r2.mean_count);

  double max_dev = 0.0;
  double small_sum = 0.0;
  std::size_t small_bins = 0;
  for (std::size_t i = 0; i < r2.bins(); ++i) {
    const double ref = sine_kernel_r2_bin_average(r2.s_edges[i], r2.s_edges[i + 1]);
    rep.series.push_back({r2.bin_center(i), r2.r2[i], r2.std_err[i], ref});
    const double s = r2.bin_center(i);
    if (s >= 0.2 && s <= 2.0) max_dev = std::max(max_dev, std::abs(r2.r2[i] - ref));
    if (r2.s_edges[i + 1] <= 0.1 + 1e-12 || i == 0) {
      small_sum += r2.r2[i];
      ++small_bins;
    }
  }
  const double repulsion = small_sum / static_cast<double>(small_bins);
  rep.metric("max_deviation_bulk", max_dev);
  rep.metric("r2_small_s", repulsion);
  rep.check("sine_kernel", max_dev <= c.tolerance("r2", 0.1),
            "max |R2 - sine kernel| on s in [0.2, 2] = " + num(max_dev));
  rep.check("level_repulsion", repulsion < c.tolerance("repulsion", 0.2),
            "R2(s < 0.1) = " + num(repulsion));
  rep.series_label = "two-level correlation vs sine kernel";
}

void run_norm_tail(const ExperimentConfig& c, const ParallelFor& parallel, ExperimentReport& rep) {
  const EnsembleSpec spec = ensemble_spec(c);
  maybe_dump(c, spec);
  const std::size_t trials = c.trials.value_or(10000);
  const std::vector<double> a_values = c.a_values.empty() ? std::vector<double>{1.5, 2.0, 3.0} : c.a_values;
  const std::vector<double> norms = sample_norms(spec, trials, *c.seed, parallel);
  double mean = 0.0;
  for (double x : norms) mean += x;
  mean /= static_cast<double>(norms.size());
  rep.metric("dim", static_cast<double>(spec.dim));
  rep.metric("trials", static_cast<double>(trials));
  rep.metric("mean_norm", mean);
  rep.metric("max_norm", *std::max_element(norms.begin(), norms.end()));
  auto tail_json = nlohmann::ordered_json::array();
  for (double a : a_values) {
    const TailEstimate t = tail_from_norms(norms, a);
    const double bound = lemma1_bound(static_cast<double>(spec.dim), a);
    const std::string tag = "a=" + num(a);
    rep.metric("tail[" + tag + "]", t.estimate);
    rep.metric("bound[" + tag + "]", bound);
    rep.check("tail_bound " + tag, t.estimate <= bound + 3.0 * t.wilson_width(),
              num(static_cast<double>(t.exceedances)) + "/" + num(static_cast<double>(t.trials)) +
                  " exceedances, bound " + num(bound) + ", Wilson width " + num(t.wilson_width()));
    rep.series.push_back({a, t.estimate, 0.5 * t.wilson_width(), bound});
    tail_json.push_back({{"a", a},
                         {"exceedances", t.exceedances},
                         {"estimate", t.estimate},
                         {"wilson", {t.wilson_lo, t.wilson_hi}},
                         {"bound", bound}});
  }
  rep.details["tails"] = tail_json;
  rep.series_label = "P(||H|| >= a sqrt 6) vs bound";
}

void run_susy_dos(const ExperimentConfig& c, const ParallelFor& parallel, ExperimentReport& rep) {
  const std::size_t n = c.half_dim.value_or(16);
  QuadratureConfig q;
  q.nodes_per_axis = c.nodes.value_or(32);
  q.radial_nodes = q.nodes_per_axis;
  q.tolerance = c.tolerance("quadrature", 1e-3);
  q.scheme = QuadratureScheme::AdaptiveNested;
  const SusyResult z = susy_normalization(static_cast<int>(n), c.energy, q, parallel);
  const SusyResult nu = nu_susy(static_cast<int>(n), c.energy, q, parallel);
  rep.metric("N", static_cast<double>(n));
  rep.metric("energy", c.energy);
  rep.metric("nu_susy", nu.value);
  rep.metric("nu_susy_error", nu.error_estimate);
  rep.metric("normalization", z.value);
  rep.metric("normalization_error", z.error_estimate);
  rep.metric("leading_order", leading_order_nu(static_cast<int>(n), c.energy));
  rep.metric("semicircle", semicircle(c.energy));
  rep.metric("min_abs_ib0", std::min(nu.min_abs_ib0, z.min_abs_ib0));
  rep.metric("nodes_per_axis", nu.nodes_per_axis);
  if (!nu.converged || !z.converged) {
    rep.status = ReportStatus::NumericalFailure;
    rep.error = "susy quadrature did not reach tolerance " + num(q.tolerance) + " (errors " +
                num(nu.error_estimate) + ", " + num(z.error_estimate) + ")";
    return;
  }
  if (nu.near_pole || z.near_pole) rep.details["warning"] = "quadrature node close to the iB0 = 0 pole";

  const double eps = c.epsilon.value_or(0.02);
  const std::size_t trials = c.trials.value_or(20000);
  const SpectrumBatch batch = collect_spectra(EnsembleSpec::flip2d(n), trials, *c.seed, parallel);
  const SmoothedDOS mc = smoothed_dos(batch, {c.energy}, Kernel::Lorentzian, eps);
  const double diff = std::abs(nu.value - mc.density[0]);
  rep.metric("mc_trials", static_cast<double>(trials));
  rep.metric("mc_epsilon", eps);
  rep.metric("mc_nu", mc.density[0]);
  rep.metric("mc_std_err", mc.std_err[0]);
  rep.metric("abs_difference", diff);
  rep.check("susy_vs_mc", diff <= c.tolerance("cross", 0.06),
            "|nu_susy - MC| = " + num(diff) + " <= " + num(c.tolerance("cross", 0.06)));
  rep.check("normalization_identity", std::abs(z.value - 1.0) <= c.tolerance("normalization", 1e-3),
            "Z = " + num(z.value));
  rep.series.push_back({c.energy, nu.value, nu.error_estimate, mc.density[0]});
  rep.series_label = "susy density of states vs Monte Carlo";
}

void run_critical_points(const ExperimentConfig& c, ExperimentReport& rep) {
  const CriticalPointSet cps = critical_points();
  const double z = cps.z_s;
  const double cubic = ((4.0 * z - 5.0) * z + 3.0) * z - 1.0;
  rep.metric("z_s", z);
  rep.metric("cubic_residual", cubic);
  auto pts = nlohmann::ordered_json::array();
  double worst_gradient = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& p = cps.points[i];
    const double g = action_gradient(p).cwiseAbs().maxCoeff();
    worst_gradient = std::max(worst_gradient, g);
    rep.metric("re_s[S" + std::to_string(i + 1) + "]", cps.actions[i]);
    rep.metric("saddle_residual[S" + std::to_string(i + 1) + "]", g);
    pts.push_back({{"name", "S" + std::to_string(i + 1)},
                   {"a0", p.a0}, {"b0", p.b0}, {"a_re", p.a_re}, {"a_im", p.a_im}, {"v0", p.v0},
                   {"re_s", cps.actions[i]}});
  }
  rep.details["critical_points"] = pts;
  rep.metric("re_s_closed_form[S3]", critical_action_s3(z));
  rep.metric("action_lower_bound", -0.25 + std::log(1.5));

  double det_defect = 0.0;
  for (double e : {0.0, 0.5, 1.0, 1.5}) {
    const auto ce = saddle_energy(e, SaddleConvention::Translated);
    const auto expected = (1.0 - ce * ce) * (1.0 - ce * ce);
    det_defect = std::max(det_defect, std::abs(hessian_q(ce).determinant() - expected));
  }
  rep.metric("hessian_det_defect", det_defect);

  RegionScanConfig scan_cfg;
  scan_cfg.n = static_cast<int>(c.half_dim.value_or(16));
  const RegionScanReport scan = region_action_scan(scan_cfg);
  rep.metric("scan_min_axis_boundary", scan.min_action_axis_boundary);
  rep.metric("scan_ball_radius", scan.ball_radius);
  rep.metric("scan_min_ball_boundary", scan.min_action_ball_boundary);
  rep.metric("scan_min_outside_balls", scan.min_action_outside_balls);
  rep.metric("scan_negative_points", static_cast<double>(scan.negative_points));
  rep.metric("scan_points", static_cast<double>(scan.scanned_points));
  rep.metric("scan_min_near_s34", scan.min_action_near_s34);
  rep.metric("scan_quadratic_offset", scan.quadratic_offset);

  rep.check("cubic_root", z > 0.5 && z < 1.0 && std::abs(cubic) <= 1e-12, "z_s = " + num(z));
  rep.check("saddle_equations", worst_gradient < 1e-8, "max residual " + num(worst_gradient));
  rep.check("s1_s2_zero", cps.actions[0] == 0.0 && cps.actions[1] == 0.0,
            "Re S = " + num(cps.actions[0]) + ", " + num(cps.actions[1]));
  rep.check("s3_s4_positive",
            std::abs(cps.actions[2] - cps.actions[3]) <= 1e-12 && cps.actions[2] > 0.15,
            "Re S = " + num(cps.actions[2]));
  rep.check("hessian_determinant", det_defect < 1e-12, "defect " + num(det_defect));
  rep.check("scan_no_negative", scan.negative_points == 0, num(static_cast<double>(scan.negative_points)) + " points");
  rep.check("scan_axis_boundary", scan.min_action_axis_boundary > 6.0, num(scan.min_action_axis_boundary));
  rep.check("scan_outside_exceeds_ball_boundary",
            scan.min_action_outside_balls >= scan.min_action_ball_boundary,
            num(scan.min_action_outside_balls) + " >= " + num(scan.min_action_ball_boundary));
  rep.check("scan_near_s34", scan.min_action_near_s34 >= 0.15, num(scan.min_action_near_s34));
  for (std::size_t i = 0; i < 4; ++i) {
    rep.series.push_back({static_cast<double>(i + 1), cps.actions[i], 0.0, i < 2 ? 0.0 : critical_action_s3(z)});
  }
  rep.series_label = "Re S at the critical points";
}

void run_tadpole(const ExperimentConfig& c, ExperimentReport& rep) {
  const std::vector<double> eps_list =
      c.epsilon ? std::vector<double>{*c.epsilon} : std::vector<double>{1e-2, 1e-3, 1e-4};
  const double target = std::numbers::pi * std::numbers::pi;
  double last_err = std::numeric_limits<double>::infinity();
  bool monotone = true;
  double final_rel = 0.0;
  for (double eps : eps_list) {
    const auto sigma = tadpole_self_energy(eps, c.inner_radius);
    const double err = std::abs(sigma.imag() - target);
    monotone = monotone && err <= last_err;
    last_err = err;
    final_rel = err / target;
    rep.metric("im[eps=" + num(eps) + "]", sigma.imag());
    rep.metric("re[eps=" + num(eps) + "]", sigma.real());
    rep.series.push_back({eps, sigma.imag(), 0.0, target});
  }
  rep.metric("relative_error", final_rel);
  rep.check("imaginary_part", final_rel <= c.tolerance("tadpole", 0.01),
            "|Im - pi^2| / pi^2 = " + num(final_rel) + " at eps = " + num(eps_list.back()));
  if (eps_list.size() > 1) rep.check("epsilon_monotone", monotone, "error shrinks as eps decreases");
  rep.series_label = "Im self-energy vs pi^2";
}

void run_convergence(const ExperimentConfig& c, const ParallelFor& parallel, ExperimentReport& rep) {
  ConvergenceConfig cc;
  if (!c.dims.empty()) cc.dims = c.dims;
  cc.seed = *c.seed;
  cc.bandwidth = c.bandwidth;
  if (c.trials) {
    cc.min_trials = *c.trials;
    cc.max_trials = std::max(cc.max_trials, *c.trials);
  }
  const ConvergenceResult res = convergence_study(cc, parallel);
  auto pts = nlohmann::ordered_json::array();
  for (const auto& p : res.points) {
    const std::string tag = "[dim=" + std::to_string(p.dim) + "]";
    rep.metric("deviation" + tag, p.deviation);
    rep.metric("max_std_err" + tag, p.max_std_err);
    rep.metric("trials" + tag, static_cast<double>(p.trials));
    pts.push_back({{"dim", p.dim}, {"trials", p.trials}, {"deviation", p.deviation}, {"max_std_err", p.max_std_err}});
    rep.series.push_back({static_cast<double>(p.dim), p.deviation, p.max_std_err,
                          std::exp(res.fit.intercept) * std::pow(static_cast<double>(p.dim), res.fit.exponent)});
  }
  rep.details["points"] = pts;
  rep.metric("exponent", res.fit.exponent);
  rep.metric("r_squared", res.fit.r_squared);
  const double lo = c.tolerance("exponent_lo", -1.3);
  const double hi = c.tolerance("exponent_hi", -0.7);
  rep.check("exponent", res.fit.exponent >= lo && res.fit.exponent <= hi,
            "gamma = " + num(res.fit.exponent) + " in [" + num(lo) + ", " + num(hi) + "]");
  rep.check("mc_error_budget", res.error_budget_met, "MC error <= 1/3 of deviation at every dim");
  rep.series_label = "bulk deviation vs dim";
}

void run_toy_edge(const ExperimentConfig& c, const ParallelFor& parallel, ExperimentReport& rep) {
  ExperimentConfig cfg = c;
  cfg.ensemble = "hier-toy";
  if (!cfg.levels) cfg.levels = 4;
  const EnsembleSpec spec = ensemble_spec(cfg);
  maybe_dump(cfg, spec);
  const std::size_t trials = c.trials.value_or(200);
  const SpectrumBatch batch = collect_spectra(spec, trials, *c.seed, parallel);
  const DOSEstimate dos = estimate_dos(batch, c.bins, c.range_lo, c.range_hi);
  const SemiEllipseFit fit = fit_semiellipse(dos);
  const double peak = *std::max_element(dos.density.begin(), dos.density.end());
  const double score = symmetry_score(dos);
  rep.metric("dim", static_cast<double>(spec.dim));
  rep.metric("trials", static_cast<double>(trials));
  rep.metric("fit_amplitude", fit.amplitude);
  rep.metric("fit_edge", fit.edge);
  rep.metric("fit_rms_residual", fit.rms_residual);
  rep.metric("peak_density", peak);
  rep.metric("support_edge", support_edge(batch));
  rep.metric("symmetry_score", score);
  rep.check("dos_symmetric", score <= 3.0, "max mirrored-bin z " + num(score) + " <= 3");
  rep.check("semiellipse_residual", fit.rms_residual <= c.tolerance("rms", 0.05) * peak,
            "rms " + num(fit.rms_residual) + " <= " + num(c.tolerance("rms", 0.05)) + " * peak " + num(peak));
  const double lo = c.tolerance("edge_lo", 1.2);
  const double hi = c.tolerance("edge_hi", 1.9);
  rep.check("edge_bracket", fit.edge >= lo && fit.edge <= hi,
            "E0 = " + num(fit.edge) + " in [" + num(lo) + ", " + num(hi) + "]");
  rep.series = dos_rows(dos, [&](double e) {
    return fit.amplitude * std::sqrt(std::max(0.0, fit.edge * fit.edge - e * e));
  });
  rep.series_label = "toy-model density vs fitted semi-ellipse";
}

void run_joint_density(const ExperimentConfig& c, const ParallelFor& parallel, ExperimentReport& rep) {
  const std::size_t trials = c.trials.value_or(100000);
  const SpectrumBatch batch = collect_spectra(EnsembleSpec::gue(2), trials, *c.seed, parallel);
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(trials);
  for (const auto& ev : batch.eigenvalues) pairs.emplace_back(ev(0), ev(1));
  const ChiSquareResult chi = joint_density_chi_square(pairs);
  rep.metric("trials", static_cast<double>(trials));
  rep.metric("normalization_constant", gue_joint_normalization2());
  rep.metric("chi_square", chi.statistic);
  rep.metric("degrees_of_freedom", static_cast<double>(chi.degrees_of_freedom));
  rep.metric("p_value", chi.p_value);
  rep.check("chi_square", chi.p_value >= c.tolerance("significance", 0.01),
            "p = " + num(chi.p_value) + " with " + std::to_string(chi.degrees_of_freedom) + " dof");

  // Gap marginal for the plot: sqrt(2/pi) g^2 exp(-g^2/2).
  std::vector<Eigen::VectorXd> gaps;
  gaps.reserve(trials);
  for (const auto& [l1, l2] : pairs) gaps.push_back(Eigen::VectorXd::Constant(1, l2 - l1));
  const DOSEstimate hist = estimate_dos(make_batch(std::move(gaps)), 40, 0.0, 4.0);
  rep.series = dos_rows(hist, [](double g) { return std::sqrt(2.0 / std::numbers::pi) * g * g * std::exp(-0.5 * g * g); });
  rep.series_label = "eigenvalue gap density";
}

}  // namespace

ConvergenceResult convergence_study(const ConvergenceConfig& cfg, const ParallelFor& parallel) {
  if (cfg.dims.size() < 3) throw InvalidSpec("convergence: need at least 3 dimensions");
  if (cfg.grid_points < 2 || cfg.batch == 0 || cfg.min_trials < 2) {
    throw InvalidSpec("convergence: grid, batch and trial counts too small");
  }
  std::vector<double> grid(cfg.grid_points);
  for (std::size_t g = 0; g < cfg.grid_points; ++g) {
    grid[g] = -cfg.bulk + 2.0 * cfg.bulk * static_cast<double>(g) / static_cast<double>(cfg.grid_points - 1);
  }
  std::vector<double> reference(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) reference[g] = smoothed_semicircle(grid[g], cfg.bandwidth);

  ConvergenceResult res;
  res.error_budget_met = true;
  std::vector<std::pair<double, double>> fit_points;
  for (std::size_t dim : cfg.dims) {
    if (dim < 2 || dim % 2 != 0) throw InvalidSpec("convergence: dimensions must be even");
    const EnsembleSpec spec = EnsembleSpec::flip2d(dim / 2);
    const std::uint64_t seed = cfg.seed ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(dim));
    const double width = std::sqrt(cfg.bandwidth * cfg.bandwidth + 1.0 / static_cast<double>(dim));
    SpectrumBatch all;
    ConvergencePoint point;
    point.dim = dim;
    while (true) {
      const std::size_t more = all.trials() == 0 ? cfg.min_trials : cfg.batch;
      CollectOptions opts;
      opts.center_shared_diagonal = true;
      opts.first_stream = all.trials();
      SpectrumBatch b = collect_spectra(spec, more, seed, parallel, opts);
      for (auto& ev : b.eigenvalues) all.eigenvalues.push_back(std::move(ev));
      const SmoothedDOS s = smoothed_dos(all, grid, Kernel::Gaussian, width);
      point.deviation = 0.0;
      point.max_std_err = 0.0;
      for (std::size_t g = 0; g < grid.size(); ++g) {
        point.deviation = std::max(point.deviation, std::abs(s.density[g] - reference[g]));
        point.max_std_err = std::max(point.max_std_err, s.std_err[g]);
      }
      point.trials = all.trials();
      if (point.max_std_err <= cfg.error_ratio * point.deviation) break;
      if (all.trials() >= cfg.max_trials) {
        res.error_budget_met = false;
        break;
      }
    }
    res.points.push_back(point);
    fit_points.emplace_back(static_cast<double>(dim), point.deviation);
  }
  res.fit = fit_power_law(fit_points);
  return res;
}

ChiSquareResult joint_density_chi_square(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 100) throw InsufficientStatistics("chi-square: need at least 100 samples");
  constexpr int kC = 20;
  constexpr int kG = 18;
  constexpr double c_lo = -2.5;
  constexpr double c_hi = 2.5;
  constexpr double g_hi = 4.5;
  const double dc = (c_hi - c_lo) / kC;
  const double dg = g_hi / kG;

  std::vector<double> observed(kC * kG + 1, 0.0);  // last slot collects out-of-grid samples
  for (const auto& [l1, l2] : pairs) {
    const double c = 0.5 * (l1 + l2);
    const double g = std::abs(l2 - l1);
    const int ic = static_cast<int>(std::floor((c - c_lo) / dc));
    const int ig = static_cast<int>(std::floor(g / dg));
    if (ic < 0 || ic >= kC || ig < 0 || ig >= kG) {
      observed.back() += 1.0;
    } else {
      observed[ic * kG + ig] += 1.0;
    }
  }

  // Cell probabilities of the (c, g) density 2 f(c - g/2, c + g/2).
  const GaussRule rule = gauss_legendre(8);
  std::vector<double> prob(kC * kG + 1, 0.0);
  double inside = 0.0;
  for (int ic = 0; ic < kC; ++ic) {
    for (int ig = 0; ig < kG; ++ig) {
      double p = 0.0;
      for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
        for (Eigen::Index j = 0; j < rule.nodes.size(); ++j) {
          const double c = c_lo + dc * (ic + 0.5 * (rule.nodes(i) + 1.0));
          const double g = dg * (ig + 0.5 * (rule.nodes(j) + 1.0));
          p += rule.weights(i) * rule.weights(j) * 2.0 * gue_joint_density2(c - 0.5 * g, c + 0.5 * g);
        }
      }
      p *= 0.25 * dc * dg;
      prob[ic * kG + ig] = p;
      inside += p;
    }
  }
  prob.back() = std::max(0.0, 1.0 - inside);

  const auto n = static_cast<double>(pairs.size());
  double pooled_obs = 0.0;
  double pooled_exp = 0.0;
  ChiSquareResult out;
  for (std::size_t k = 0; k < prob.size(); ++k) {
    const double expected = n * prob[k];
    if (expected < 5.0) {
      pooled_obs += observed[k];
      pooled_exp += expected;
      continue;
    }
    out.statistic += (observed[k] - expected) * (observed[k] - expected) / expected;
    ++out.cells;
  }
  if (pooled_exp > 0.0) {
    out.statistic += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++out.cells;
  }
  if (out.cells < 2) throw InsufficientStatistics("chi-square: too few populated cells");
  out.degrees_of_freedom = out.cells - 1;
  const boost::math::chi_squared dist(static_cast<double>(out.degrees_of_freedom));
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

ExperimentReport run(const ExperimentConfig& config, const ParallelFor& parallel) {
  validate(config);
  ExperimentReport rep;
  rep.experiment = std::string(to_string(config.experiment));
  rep.config = to_json(config);
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (config.experiment) {
      case Experiment::Dos: run_dos(config, parallel, rep); break;
      case Experiment::PairCorrelation: run_pair_correlation(config, parallel, rep); break;
      case Experiment::NormTail: run_norm_tail(config, parallel, rep); break;
      case Experiment::SusyDos: run_susy_dos(config, parallel, rep); break;
      case Experiment::CriticalPoints: run_critical_points(config, rep); break;
      case Experiment::Tadpole: run_tadpole(config, rep); break;
      case Experiment::Convergence: run_convergence(config, parallel, rep); break;
      case Experiment::ToyEdge: run_toy_edge(config, parallel, rep); break;
      case Experiment::JointDensity: run_joint_density(config, parallel, rep); break;
    }
  } catch (const InsufficientStatistics& e) {
    rep.status = ReportStatus::NumericalFailure;
    rep.error = e.what();
  } catch (const QuadratureError& e) {
    rep.status = ReportStatus::NumericalFailure;
    rep.error = e.what();
  } catch (const PoleError& e) {
    rep.status = ReportStatus::NumericalFailure;
    rep.error = e.what();
  }
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

void write_outputs(const ExperimentReport& report, const ExperimentConfig& config) {
  if (!config.json_path.empty()) emit_json(report, config.json_path);
  if (!config.csv_path.empty()) emit_csv(report, config.csv_path);
  if (!config.svg_path.empty()) emit_svg(report, config.svg_path);
}

}  // namespace rmt::harness
