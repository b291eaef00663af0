#include "rmt/susy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rmt/error.hpp"
#include "rmt/quadrature.hpp"

namespace rmt {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

struct Grid {
  GaussRule a0;
  GaussRule b0;
  GaussRule v0;
  GaussRule r;
};

// Box around the two real saddles of the b0 direction (b0 = 0 and -2 Im calE),
// split into panels once the Gaussian width is narrower than their distance.
Grid make_grid(int n, double e, int nodes, int radial_nodes, double halfwidth) {
  const double s = std::sqrt(std::max(0.0, 1.0 - e * e / 4.0));
  const double l = halfwidth / std::sqrt(static_cast<double>(n));
  Grid g;
  g.a0 = gauss_legendre(nodes, -l, l);
  g.v0 = gauss_legendre(nodes, -l, l);
  g.r = gauss_legendre(radial_nodes, 0.0, l * l);
  if (l >= s) {
    g.b0 = gauss_legendre(2 * nodes, -2.0 * s - l, l);
  } else {
    Eigen::VectorXd breaks(4);
    breaks << -2.0 * s - l, -2.0 * s + l, -l, l;
    g.b0 = composite_gauss_legendre(nodes, breaks);
  }
  return g;
}

enum class Observable { Dos, Normalization };

struct RawIntegral {
  std::complex<double> value;
  std::size_t evaluations = 0;
  double min_abs_ib0 = std::numeric_limits<double>::infinity();
};

RawIntegral integrate_once(const SusyIntegrand& f, double e, const QuadratureConfig& config, int nodes,
                           Observable what, const ParallelFor& parallel) {
  const int radial = std::max(config.radial_nodes, nodes * config.radial_nodes / config.nodes_per_axis);
  const Grid g = make_grid(f.n, e, nodes, radial, config.domain_halfwidth);
  const auto na = static_cast<std::size_t>(g.a0.nodes.size());
  std::vector<std::complex<double>> partial(na);
  std::vector<double> min_beta(na, std::numeric_limits<double>::infinity());

  parallel(na, [&](std::size_t ia) {
    const double a0 = g.a0.nodes(static_cast<Eigen::Index>(ia));
    std::complex<double> acc = 0.0;
    double mb = std::numeric_limits<double>::infinity();
    for (Eigen::Index ib = 0; ib < g.b0.nodes.size(); ++ib) {
      const double b0 = g.b0.nodes(ib);
      for (Eigen::Index iv = 0; iv < g.v0.nodes.size(); ++iv) {
        const double v0 = g.v0.nodes(iv);
        const double w_abv = g.b0.weights(ib) * g.v0.weights(iv);
        mb = std::min(mb, std::abs(kI * (b0 + f.shift_b) + v0 + f.energy));
        std::complex<double> inner = 0.0;
        for (Eigen::Index ir = 0; ir < g.r.nodes.size(); ++ir) {
          const double r = g.r.nodes(ir);
          inner += g.r.weights(ir) *
                   (what == Observable::Dos ? f.dos(a0, b0, v0, r) : f.normalization(a0, b0, v0, r));
        }
        acc += w_abv * inner;
      }
    }
    partial[ia] = g.a0.weights(static_cast<Eigen::Index>(ia)) * acc;
    min_beta[ia] = mb;
  });

  RawIntegral out;
  for (std::size_t ia = 0; ia < na; ++ia) {
    out.value += partial[ia];
    out.min_abs_ib0 = std::min(out.min_abs_ib0, min_beta[ia]);
  }
  out.evaluations = na * static_cast<std::size_t>(g.b0.nodes.size() * g.v0.nodes.size() * g.r.nodes.size());
  return out;
}

double physical_part(Observable what, int n, std::complex<double> raw) {
  const auto nn = static_cast<double>(n);
  if (what == Observable::Normalization) {
    // (N/pi)^(5/2) normalizes the four Gaussian directions and the
    // radial pi from d^2a = pi d|a|^2.
    return (std::pow(nn / std::numbers::pi, 2.5) * std::numbers::pi * raw).real();
  }
  return -std::sqrt(nn) / (2.0 * std::pow(std::numbers::pi, 2.5)) * raw.imag();
}

SusyResult evaluate(int n, double e, const QuadratureConfig& config, Observable what,
                    const ParallelFor& parallel) {
  validate(config);
  if (n < 4 || n > 512) throw InvalidSpec("susy integral: N must lie in [4, 512]");
  if (!(std::abs(e) < 2.0)) throw InvalidSpec("susy integral: |E| must be below 2");
  const SusyIntegrand f(n, e, config);

  SusyResult result;
  int nodes = config.nodes_per_axis;
  RawIntegral coarse = integrate_once(f, e, config, nodes, what, parallel);
  result.evaluations += coarse.evaluations;
  while (true) {
    const RawIntegral fine = integrate_once(f, e, config, 2 * nodes, what, parallel);
    result.evaluations += fine.evaluations;
    const double v_coarse = physical_part(what, n, coarse.value);
    const double v_fine = physical_part(what, n, fine.value);
    result.value = v_fine;
    result.raw = fine.value;
    result.error_estimate = std::abs(v_fine - v_coarse);
    result.nodes_per_axis = 2 * nodes;
    result.min_abs_ib0 = std::min(coarse.min_abs_ib0, fine.min_abs_ib0);
    result.converged = result.error_estimate <= config.tolerance && std::isfinite(result.value);
    if (result.converged || config.scheme == QuadratureScheme::TensorGaussLegendre ||
        4 * nodes > config.max_nodes) {
      break;
    }
    nodes *= 2;
    coarse = fine;
  }
  result.near_pole = result.min_abs_ib0 < 1e-8;
  return result;
}

}  // namespace

void validate(const QuadratureConfig& config) {
  if (config.nodes_per_axis < 8 || config.radial_nodes < 8) {
    throw InvalidSpec("quadrature: at least 8 nodes per axis are required");
  }
  if (!(config.domain_halfwidth > 0.0)) throw InvalidSpec("quadrature: box half-width must be positive");
  if (!(config.regulator >= 0.0)) throw InvalidSpec("quadrature: regulator must be non-negative");
  if (!(config.tolerance > 0.0)) throw InvalidSpec("quadrature: tolerance must be positive");
}

SusyIntegrand::SusyIntegrand(int n_, double e, const QuadratureConfig& config)
    : n(n_), energy(e, config.regulator) {
  if (config.translate) {
    const std::complex<double> cal_e = saddle_energy(e, SaddleConvention::Translated);
    shift_a = cal_e;
    shift_b = -kI * cal_e;
  }
}

SusyIntegrand::Terms SusyIntegrand::terms(double a0, double b0, double v0, double r) const {
  Terms t;
  const std::complex<double> a = a0 + shift_a;
  const std::complex<double> b = b0 + shift_b;
  t.a0_cap = a + v0 + energy;
  t.ib0 = kI * b + v0 + energy;
  t.d = t.a0_cap * t.a0_cap - r;
  t.log_gauss = -static_cast<double>(n) * (a * a + b * b + r + v0 * v0);
  return t;
}

std::complex<double> SusyIntegrand::dos(double a0, double b0, double v0, double r) const {
  const Terms t = terms(a0, b0, v0, r);
  const auto nn = static_cast<double>(n);
  // Integer powers, so the branch of the logarithms is irrelevant.
  const std::complex<double> w =
      std::exp(t.log_gauss + (2.0 * nn - 2.0) * std::log(t.ib0) - (nn + 2.0) * std::log(t.d));
  const std::complex<double> a = t.a0_cap;
  const std::complex<double> b = t.ib0;
  const std::complex<double> bracket =
      (nn + 1.0) * ((2.0 * nn - 1.0) * a - 4.0 * nn * a * a * b) + 2.0 * nn * b * t.d * (1.0 + nn * a * b);
  return w * bracket;
}

std::complex<double> SusyIntegrand::normalization(double a0, double b0, double v0, double r) const {
  const Terms t = terms(a0, b0, v0, r);
  const auto nn = static_cast<double>(n);
  const std::complex<double> w = std::exp(t.log_gauss + 2.0 * nn * std::log(t.ib0) - nn * std::log(t.d));
  const std::complex<double> bd = t.ib0 * t.d;
  return w * (1.0 - 2.0 * t.a0_cap / bd + (2.0 * nn - 1.0) / (2.0 * nn * t.ib0 * bd));
}

SusyResult nu_susy(int n, double e, const QuadratureConfig& config, const ParallelFor& parallel) {
  return evaluate(n, e, config, Observable::Dos, parallel);
}

SusyResult susy_normalization(int n, double e, const QuadratureConfig& config, const ParallelFor& parallel) {
  return evaluate(n, e, config, Observable::Normalization, parallel);
}

double leading_order_nu(int /*n*/, double e) {
  if (std::abs(e) >= 2.0) return 0.0;
  return saddle_energy(e, SaddleConvention::Translated).imag() / std::numbers::pi;
}

RegionScanReport region_action_scan(const RegionScanConfig& config) {
  if (config.points_per_axis < 4 || config.points_per_axis % 2 != 0) {
    throw InvalidSpec("region scan: points_per_axis must be even and at least 4");
  }
  using Vec5 = Eigen::Matrix<double, 5, 1>;
  RegionScanReport rep;
  const CriticalPointSet cps = critical_points();
  rep.action_at_origin = action_re(cps.points[0]);

  rep.min_action_axis_boundary = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 5; ++axis) {
    for (double sign : {-1.0, 1.0}) {
      Vec5 x = Vec5::Zero();
      x(axis) = sign * config.radius;
      rep.min_action_axis_boundary = std::min(rep.min_action_axis_boundary, action_re(SaddleData::at(x, 0.0)));
    }
  }

  rep.ball_radius = std::pow(static_cast<double>(config.n), -1.0 / 3.0 - config.delta);

  // Sphere samples: the 10 axis directions plus the 40 two-axis diagonals.
  std::vector<Vec5> directions;
  for (int i = 0; i < 5; ++i) {
    for (double si : {-1.0, 1.0}) {
      Vec5 d = Vec5::Zero();
      d(i) = si;
      directions.push_back(d);
      for (int j = i + 1; j < 5; ++j) {
        for (double sj : {-1.0, 1.0}) {
          Vec5 dd = Vec5::Zero();
          dd(i) = si / std::numbers::sqrt2;
          dd(j) = sj / std::numbers::sqrt2;
          directions.push_back(dd);
        }
      }
    }
  }
  rep.min_action_ball_boundary = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 2; ++k) {
    for (const Vec5& d : directions) {
      const Vec5 x = cps.points[k].coords() + rep.ball_radius * d;
      rep.min_action_ball_boundary = std::min(rep.min_action_ball_boundary, action_re(SaddleData::at(x, 0.0)));
    }
  }
  rep.min_action_near_s34 = std::numeric_limits<double>::infinity();
  for (int k = 2; k < 4; ++k) {
    rep.min_action_near_s34 = std::min(rep.min_action_near_s34, cps.actions[k]);
    for (const Vec5& d : directions) {
      for (double rad : {0.05, 0.1}) {
        const Vec5 x = cps.points[k].coords() + rad * d;
        rep.min_action_near_s34 = std::min(rep.min_action_near_s34, action_re(SaddleData::at(x, 0.0)));
      }
    }
  }

  // Grid over (a0, b0, |a|, V0); Re S depends on a only through |a|.
  const int m = config.points_per_axis;
  const double k_rad = config.radius;
  const double h = 2.0 * k_rad / (m - 1);
  rep.min_action_outside_balls = std::numeric_limits<double>::infinity();
  rep.quadratic_offset = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m / 2; ++k) {
        for (int l = 0; l < m; ++l) {
          const Vec5 x(-k_rad + i * h, -k_rad + j * h, (k + 0.5) * h, 0.0, -k_rad + l * h);
          const double norm2 = x.squaredNorm();
          if (norm2 > k_rad * k_rad) continue;
          ++rep.scanned_points;
          double s = 0.0;
          try {
            s = action_re(SaddleData::at(x, 0.0));
          } catch (const PoleError&) {
            ++rep.pole_points;
            continue;
          }
          rep.quadratic_offset = std::max(rep.quadratic_offset, config.quadratic_coefficient * norm2 - s);
          bool in_ball = false;
          for (const auto& p : cps.points) {
            if ((x - p.coords()).norm() < rep.ball_radius) in_ball = true;
          }
          if (in_ball) continue;
          rep.min_action_outside_balls = std::min(rep.min_action_outside_balls, s);
          if (s < 0.0) ++rep.negative_points;
        }
      }
    }
  }
  return rep;
}

}  // namespace rmt
