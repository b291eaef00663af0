#include "rmt/theory.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rmt/error.hpp"
#include "rmt/quadrature.hpp"

namespace rmt {

namespace {

using boost::math::quadrature::gauss_kronrod;

template <typename F>
double integrate(F f, double a, double b) {
  return gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

double sinc_pi(double s) {
  const double x = std::numbers::pi * s;
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

}  // namespace

double smoothed_semicircle(double e, double h) {
  if (!(h > 0.0)) throw InvalidSpec("smoothed_semicircle: bandwidth must be positive");
  // E = 2 sin(theta) turns the semicircle measure into (2/pi) cos^2(theta).
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * h);
  auto f = [&](double theta) {
    const double c = std::cos(theta);
    const double z = (e - 2.0 * std::sin(theta)) / h;
    return 2.0 / std::numbers::pi * c * c * norm * std::exp(-0.5 * z * z);
  };
  // Only sin(theta) within 12 widths of e/2 contributes; narrow kernels
  // would otherwise fall between the nodes. Split at the peak as well.
  const double lo = std::asin(std::clamp((e - 12.0 * h) / 2.0, -1.0, 1.0));
  const double hi = std::asin(std::clamp((e + 12.0 * h) / 2.0, -1.0, 1.0));
  if (!(hi > lo)) return 0.0;
  const double peak = std::asin(std::clamp(e / 2.0, -1.0, 1.0));
  return integrate(f, lo, peak) + integrate(f, peak, hi);
}

double sine_kernel_r2(double s) {
  if (!(s > 0.0)) throw InvalidSpec("sine_kernel_r2: s must be positive");
  const double k = sinc_pi(s);
  return 1.0 - k * k;
}

double sine_kernel_r2_bin_average(double a, double b) {
  if (!(a >= 0.0 && b > a)) throw InvalidSpec("sine_kernel_r2_bin_average: need 0 <= a < b");
  auto f = [](double s) {
    const double k = sinc_pi(s);
    return 1.0 - k * k;
  };
  return integrate(f, a, b) / (b - a);
}

double gue_joint_normalization2() {
  static const double z = [] {
    const GaussRule rule = gauss_legendre(96, -9.0, 9.0);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
      for (Eigen::Index j = 0; j < rule.nodes.size(); ++j) {
        const double x = rule.nodes(i);
        const double y = rule.nodes(j);
        acc += rule.weights(i) * rule.weights(j) * std::exp(-(x * x + y * y)) * (x - y) * (x - y);
      }
    }
    return acc;
  }();
  return z;
}

double gue_joint_density2(double l1, double l2) {
  const double d = l1 - l2;
  return std::exp(-(l1 * l1 + l2 * l2)) * d * d / gue_joint_normalization2();
}

std::complex<double> saddle_energy(double e, SaddleConvention convention) {
  if (!(std::abs(e) <= 2.0)) throw InvalidSpec("saddle_energy: |E| must not exceed 2");
  const double s = std::sqrt(std::max(0.0, 1.0 - e * e / 4.0));
  if (convention == SaddleConvention::Standard) return {e / 2.0, -s};
  return {-e / 2.0, s};
}

SaddleData SaddleData::at(const Eigen::Matrix<double, 5, 1>& x, double energy) {
  SaddleData d;
  d.a0 = x(0);
  d.b0 = x(1);
  d.a_re = x(2);
  d.a_im = x(3);
  d.v0 = x(4);
  d.energy = energy;
  d.cal_e = saddle_energy(energy, SaddleConvention::Translated);
  return d;
}

namespace {

struct ActionParts {
  double er;  // E / 2
  double ei;  // sqrt(1 - E^2 / 4)
  double r;   // |a|^2
  double x;   // a0 + V0 + er
  double fa;
  double fb;
};

ActionParts parts(const SaddleData& d) {
  ActionParts p{};
  p.er = d.energy / 2.0;
  p.ei = std::sqrt(std::max(0.0, 1.0 - d.energy * d.energy / 4.0));
  p.r = d.a_re * d.a_re + d.a_im * d.a_im;
  p.x = d.a0 + d.v0 + p.er;
  p.fa = p.x * p.x * (p.x * p.x + 2.0 * (p.ei * p.ei - p.r)) + (p.ei * p.ei + p.r) * (p.ei * p.ei + p.r);
  const double bb = d.b0 + p.ei;
  const double vv = d.v0 + p.er;
  p.fb = bb * bb + vv * vv;
  if (p.fb == 0.0) throw PoleError("action_re: F_b vanishes");
  return p;
}

}  // namespace

double action_re(const SaddleData& d) {
  const ActionParts p = parts(d);
  return d.a0 * d.a0 + d.b0 * d.b0 + 2.0 * d.b0 * p.ei - 2.0 * d.a0 * p.er + p.r + d.v0 * d.v0 +
         0.5 * std::log(p.fa) - std::log(p.fb);
}

Eigen::Matrix<double, 5, 1> action_gradient(const SaddleData& d) {
  const ActionParts p = parts(d);
  const double xa = p.x * (p.x * p.x + p.ei * p.ei - p.r) / p.fa;
  const double ra = 1.0 + (-p.x * p.x + p.ei * p.ei + p.r) / p.fa;
  Eigen::Matrix<double, 5, 1> g;
  g(0) = 2.0 * (d.a0 - p.er + xa);
  g(1) = 2.0 * (d.b0 + p.ei) * (1.0 - 1.0 / p.fb);
  g(2) = 2.0 * d.a_re * ra;
  g(3) = 2.0 * d.a_im * ra;
  g(4) = 2.0 * (d.v0 * (1.0 - 1.0 / p.fb) - p.er / p.fb + xa);
  return g;
}

double cubic_root_zs() {
  auto f = [](double z) { return ((4.0 * z - 5.0) * z + 3.0) * z - 1.0; };
  double lo = 0.5;
  double hi = 1.0;
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

double critical_action_s3(double z) {
  return (2.0 * z - 1.0) * (z - 1.0) / z + std::log((4.0 * z * z - 3.0 * z + 1.0) / (z * z));
}

CriticalPointSet critical_points() {
  CriticalPointSet set;
  set.z_s = cubic_root_zs();
  const double z = set.z_s;
  const double sz = std::sqrt(z);
  using Vec5 = Eigen::Matrix<double, 5, 1>;
  set.points[0] = SaddleData::at(Vec5::Zero(), 0.0);
  set.points[1] = SaddleData::at(Vec5(0.0, -2.0, 0.0, 0.0, 0.0), 0.0);
  set.points[2] = SaddleData::at(Vec5((z - 1.0) / sz, -1.0, 0.0, 0.0, sz), 0.0);
  set.points[3] = SaddleData::at(Vec5(-(z - 1.0) / sz, -1.0, 0.0, 0.0, -sz), 0.0);
  for (std::size_t i = 0; i < 4; ++i) set.actions[i] = action_re(set.points[i]);
  return set;
}

double smoothstep_cutoff(double p, double inner_radius) {
  const double t = p - inner_radius;
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  return 1.0 - t * t * (3.0 - 2.0 * t);
}

std::complex<double> tadpole_self_energy(double eps, double inner_radius) {
  return tadpole_self_energy(
      eps, [inner_radius](double p) { return smoothstep_cutoff(p, inner_radius); }, inner_radius + 1.0);
}

std::complex<double> tadpole_self_energy(double eps, const std::function<double(double)>& cutoff,
                                         double support) {
  if (!(eps > 0.0)) throw InvalidSpec("tadpole_self_energy: epsilon must be positive");
  if (!(support > 1.5)) throw InvalidSpec("tadpole_self_energy: cutoff support must exceed 1.5");
  // Radial reduction with u = p^2: integral = pi * int du cutoff(sqrt u) / (u - 1 - i eps).
  const double delta = 0.5;
  const double u_max = support * support;
  auto kappa = [&](double u) { return cutoff(std::sqrt(std::max(0.0, u))); };
  auto re_part = [&](double u) {
    const double v = u - 1.0;
    return kappa(u) * v / (v * v + eps * eps);
  };
  auto im_part = [&](double u) {
    const double v = u - 1.0;
    return kappa(u) * eps / (v * v + eps * eps);
  };

  double re = integrate(re_part, 0.0, 1.0 - delta);
  double im = integrate(im_part, 0.0, 1.0 - delta);

  // Principal-value pairing u = 1 +- v on the resonance window.
  re += integrate([&](double v) { return (kappa(1.0 + v) - kappa(1.0 - v)) * v / (v * v + eps * eps); },
                  0.0, delta);
  // u = 1 + eps tan(t) flattens the Lorentzian.
  const double t_max = std::atan(delta / eps);
  im += integrate([&](double t) { return kappa(1.0 + eps * std::tan(t)); }, -t_max, 0.0) +
        integrate([&](double t) { return kappa(1.0 + eps * std::tan(t)); }, 0.0, t_max);

  // Tail in unit steps of p so kinks of the cutoff fall on panel edges.
  double lo = 1.0 + delta;
  for (double p = 2.0; lo < u_max; p += 1.0) {
    const double hi = std::min(u_max, p * p);
    if (hi > lo) {
      re += integrate(re_part, lo, hi);
      im += integrate(im_part, lo, hi);
      lo = hi;
    }
  }
  return std::numbers::pi * std::complex<double>(re, im);
}

}  // namespace rmt
