#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>

namespace rmt {

/// Wigner semicircle (1/pi) sqrt(1 - E^2/4) on [-2, 2].
template <typename T>
T semicircle(T e) {
  using std::abs;
  using std::sqrt;
  if (abs(e) >= T(2)) return T(0);
  return sqrt(T(1) - e * e / T(4)) / std::numbers::pi_v<T>;
}

/// Semicircle convolved with a centred Gaussian of standard deviation h.
double smoothed_semicircle(double e, double h);

/// Smooth part of the GUE two-level correlation, 1 - (sin(pi s) / (pi s))^2.
/// Throws InvalidSpec for s <= 0.
double sine_kernel_r2(double s);

/// Average of sine_kernel_r2 over [a, b] with 0 <= a < b.
double sine_kernel_r2_bin_average(double a, double b);

/// Tail bound 8 N a^6 / 27 * exp(-N^(1/3) a^2 / 3) for P(||H|| >= a sqrt 6).
template <typename T>
T lemma1_bound(T n, T a) {
  using std::cbrt;
  using std::exp;
  using std::pow;
  return T(8) * n * pow(a, 6) / T(27) * exp(-cbrt(n) * a * a / T(3));
}

/// Normalized joint eigenvalue density of 2x2 GUE with covariance 1/2:
/// exp(-(l1^2 + l2^2)) (l1 - l2)^2 / Z.
double gue_joint_density2(double l1, double l2);

/// Normalization constant Z above, from a 2D Gauss-Legendre quadrature.
double gue_joint_normalization2();

enum class SaddleConvention : std::uint8_t {
  Standard,    // E/2 - i sqrt(1 - E^2/4), so that E - calE = conj(calE)
  Translated,  // -E/2 + i sqrt(1 - E^2/4), the shift used for the flip model
};

/// Saddle value of the mean field. Throws InvalidSpec for |E| > 2.
std::complex<double> saddle_energy(double e, SaddleConvention convention = SaddleConvention::Standard);

/// Point in the five real mean-field coordinates, evaluated at energy E.
struct SaddleData {
  double a0 = 0.0;
  double b0 = 0.0;
  double a_re = 0.0;
  double a_im = 0.0;
  double v0 = 0.0;
  double energy = 0.0;
  std::complex<double> cal_e{0.0, 1.0};  // translated convention

  [[nodiscard]] Eigen::Matrix<double, 5, 1> coords() const { return {a0, b0, a_re, a_im, v0}; }
  static SaddleData at(const Eigen::Matrix<double, 5, 1>& x, double energy);
};

/// Real part of the translated action. Throws PoleError when F_b == 0.
double action_re(const SaddleData& x);

/// Analytic gradient of action_re in the order (a0, b0, a_re, a_im, v0).
Eigen::Matrix<double, 5, 1> action_gradient(const SaddleData& x);

/// Unique real root of 4 z^3 - 5 z^2 + 3 z - 1 in (1/2, 1), by bisection.
double cubic_root_zs();

struct CriticalPointSet {
  std::array<SaddleData, 4> points;
  std::array<double, 4> actions{};
  double z_s = 0.0;
};

/// The four critical points of Re S at E = 0.
CriticalPointSet critical_points();

/// Closed form of Re S at S3/S4: (2z-1)(z-1)/z + log((4z^2 - 3z + 1)/z^2).
double critical_action_s3(double z);

/// Hessian of the bosonic saddle in the (a0, b0, V0) block.
template <typename T>
Eigen::Matrix<std::complex<T>, 3, 3> hessian_q(std::complex<T> e) {
  const std::complex<T> i(T(0), T(1));
  const std::complex<T> e2 = e * e;
  Eigen::Matrix<std::complex<T>, 3, 3> q;
  q << T(1) - e2, T(0), -e2,
       T(0), T(1) - e2, i * e2,
       -e2, i * e2, T(1);
  return q;
}

/// Smooth radial momentum cutoff: 1 on [0, A], 0 beyond A + 1, C1 smoothstep between.
double smoothstep_cutoff(double p, double inner_radius);

/// 2D tadpole integral of cutoff(|p|) / (p^2 - 1 - i eps) over the plane.
/// Throws InvalidSpec for eps <= 0.
std::complex<double> tadpole_self_energy(double eps, double inner_radius = 10.0);

/// Same integral with an arbitrary radial cutoff supported on [0, support].
std::complex<double> tadpole_self_energy(double eps, const std::function<double(double)>& cutoff,
                                         double support);

}  // namespace rmt
