#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rmt/error.hpp"
#include "rmt/quadrature.hpp"
#include "rmt/theory.hpp"

using namespace rmt;
using std::numbers::pi;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  for (int n : {1, 2, 5, 16, 64}) {
    const auto rule = gauss_legendre(n);
    for (int k = 0; k <= 2 * n - 1; k += 1) {
      const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
      CHECK(rule.weights.dot(rule.nodes.array().pow(k).matrix()) == doctest::Approx(exact).epsilon(1e-12));
    }
  }
  const auto mapped = gauss_legendre(8, 0.0, 3.0);
  CHECK(mapped.weights.sum() == doctest::Approx(3.0));
  Eigen::VectorXd bp(3);
  bp << 0.0, 1.0, 4.0;
  const auto comp = composite_gauss_legendre(6, bp);
  CHECK(comp.nodes.size() == 12);
  CHECK(comp.weights.dot(comp.nodes.array().square().matrix()) == doctest::Approx(64.0 / 3.0));
}

TEST_CASE("semicircle values and moments") {
  CHECK(semicircle(0.0) == doctest::Approx(1.0 / pi));
  CHECK(semicircle(2.0) == 0.0);
  CHECK(semicircle(-2.0) == 0.0);
  CHECK(semicircle(2.5) == 0.0);
  Eigen::VectorXd bp(3);
  bp << -2.0, 0.0, 2.0;
  const auto rule = composite_gauss_legendre(200, bp);
  double m0 = 0, m2 = 0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
    const double e = rule.nodes(i);
    m0 += rule.weights(i) * semicircle(e);
    m2 += rule.weights(i) * e * e * semicircle(e);
  }
  CHECK(std::abs(m0 - 1.0) < 1e-5);  // square-root edges limit plain GL
  CHECK(std::abs(m2 - 1.0) < 1e-5);
}

TEST_CASE("smoothed semicircle") {
  CHECK(smoothed_semicircle(0.0, 1e-6) == doctest::Approx(1.0 / pi).epsilon(1e-6));
  // Mass is conserved: a coarse integral over a wide window.
  double total = 0;
  for (double e = -6.0; e < 6.0; e += 0.01) total += 0.01 * smoothed_semicircle(e + 0.005, 0.3);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(smoothed_semicircle(0.0, 0.3) < 1.0 / pi);
}

TEST_CASE("sine kernel") {
  CHECK(sine_kernel_r2(1.0) == doctest::Approx(1.0));
  CHECK(sine_kernel_r2(0.5) == doctest::Approx(1.0 - 4.0 / (pi * pi)));
  CHECK(sine_kernel_r2(1e-6) < 1e-9);
  CHECK(sine_kernel_r2(1e4) == doctest::Approx(1.0));
  CHECK_THROWS_AS(sine_kernel_r2(0.0), InvalidSpec);
  for (double s = 0.01; s < 20.0; s += 0.01) {
    const double r = sine_kernel_r2(s);
    REQUIRE(r >= 0.0);
    REQUIRE(r <= 1.05);
  }
  const double avg = sine_kernel_r2_bin_average(0.9, 1.1);
  CHECK(avg == doctest::Approx(1.0).epsilon(0.01));
  CHECK(sine_kernel_r2_bin_average(0.0, 0.1) < sine_kernel_r2(0.1));
}

TEST_CASE("norm tail bound") {
  CHECK(lemma1_bound(1000.0, 3.0) == doctest::Approx(216000.0 * std::exp(-30.0)));
  CHECK(lemma1_bound(1000.0, 3.0) == doctest::Approx(2.02e-8).epsilon(0.01));
  CHECK(lemma1_bound(64.0, 0.0) == 0.0);
  double prev = lemma1_bound(64.0, 3.0);
  for (double n : {128.0, 256.0, 512.0, 1024.0}) {
    const double b = lemma1_bound(n, 3.0);
    CHECK(b < prev);
    prev = b;
  }
}

TEST_CASE("2x2 joint density") {
  CHECK(gue_joint_density2(0.7, 0.7) == 0.0);
  CHECK(gue_joint_density2(0.3, -1.1) == doctest::Approx(gue_joint_density2(-1.1, 0.3)));
  CHECK(gue_joint_normalization2() == doctest::Approx(pi).epsilon(1e-10));
  // Integral of the normalized density, independent 2D rule.
  const auto rule = gauss_legendre(120, -7.0, 7.0);
  double total = 0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
    for (Eigen::Index j = 0; j < rule.nodes.size(); ++j) {
      total += rule.weights(i) * rule.weights(j) * gue_joint_density2(rule.nodes(i), rule.nodes(j));
    }
  }
  CHECK(std::abs(total - 1.0) < 1e-8);
}

TEST_CASE("saddle energies") {
  const auto s0 = saddle_energy(0.0);
  CHECK(s0.real() == doctest::Approx(0.0));
  CHECK(s0.imag() == doctest::Approx(-1.0));
  const auto s1 = saddle_energy(1.0);
  CHECK(s1.real() == doctest::Approx(0.5));
  CHECK(s1.imag() == doctest::Approx(-0.866025).epsilon(1e-6));
  for (double e : {-1.9, -0.5, 0.0, 0.3, 1.7}) {
    for (auto conv : {SaddleConvention::Standard, SaddleConvention::Translated}) {
      CHECK(std::abs(saddle_energy(e, conv)) == doctest::Approx(1.0).epsilon(1e-14));
    }
    const auto st = saddle_energy(e);
    CHECK(std::abs(e - st - std::conj(st)) < 1e-14);
  }
  CHECK_THROWS_AS(saddle_energy(2.5), InvalidSpec);
}

TEST_CASE("critical points") {
  const double z = cubic_root_zs();
  CHECK(z > 0.5);
  CHECK(z < 1.0);
  CHECK(z == doctest::Approx(0.6880).epsilon(1e-4));
  CHECK(std::abs(4 * z * z * z - 5 * z * z + 3 * z - 1) < 1e-12);

  const auto cp = critical_points();
  CHECK(cp.actions[0] == doctest::Approx(0.0));
  CHECK(cp.actions[1] == doctest::Approx(0.0));
  CHECK(cp.actions[2] > 0.15);
  CHECK(cp.actions[2] == doctest::Approx(cp.actions[3]));
  CHECK(cp.actions[2] == doctest::Approx(critical_action_s3(z)));
  CHECK(cp.actions[2] == doctest::Approx(0.39034).epsilon(1e-4));
  CHECK(action_re(SaddleData{}) == doctest::Approx(0.0));

  for (const auto& p : cp.points) {
    const auto g = action_gradient(p);
    CHECK(g.cwiseAbs().maxCoeff() < 1e-8);
    // Central finite differences confirm both the analytic gradient and the zero.
    const auto x = p.coords();
    for (int k = 0; k < 5; ++k) {
      const double h = 1e-6;
      auto xp = x, xm = x;
      xp(k) += h;
      xm(k) -= h;
      const double fd = (action_re(SaddleData::at(xp, 0.0)) - action_re(SaddleData::at(xm, 0.0))) / (2 * h);
      CHECK(std::abs(fd) < 1e-6);
    }
  }
}

TEST_CASE("analytic gradient matches finite differences away from critical points") {
  Eigen::Matrix<double, 5, 1> x;
  x << 0.3, -0.2, 0.4, 0.1, -0.25;
  const auto p = SaddleData::at(x, 0.0);
  const auto g = action_gradient(p);
  for (int k = 0; k < 5; ++k) {
    const double h = 1e-6;
    auto xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    const double fd = (action_re(SaddleData::at(xp, 0.0)) - action_re(SaddleData::at(xm, 0.0))) / (2 * h);
    CHECK(g(k) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("hessian determinant") {
  for (double e : {0.0, 0.5, -1.2}) {
    const auto cal = saddle_energy(e, SaddleConvention::Translated);
    const auto q = hessian_q(cal);
    const auto expect = (1.0 - cal * cal) * (1.0 - cal * cal);
    CHECK(std::abs(q.determinant() - expect) < 1e-12);
  }
}

TEST_CASE("tadpole self-energy") {
  const auto t = tadpole_self_energy(1e-4);
  CHECK(std::abs(t.imag() - pi * pi) / (pi * pi) < 0.01);
  double prev = 1.0;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const double err = std::abs(tadpole_self_energy(eps).imag() - pi * pi);
    CHECK(err < prev);
    prev = err;
  }
  const auto zero = tadpole_self_energy(1e-3, [](double) { return 0.0; }, 5.0);
  CHECK(std::abs(zero) == 0.0);
  CHECK_THROWS_AS(tadpole_self_energy(0.0), InvalidSpec);
  CHECK(smoothstep_cutoff(3.0, 10.0) == 1.0);
  CHECK(smoothstep_cutoff(11.5, 10.0) == 0.0);
  CHECK(smoothstep_cutoff(10.5, 10.0) == doctest::Approx(0.5));
}
