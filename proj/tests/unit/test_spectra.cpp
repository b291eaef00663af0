#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rmt/error.hpp"
#include "rmt/spectra.hpp"
#include "rmt/theory.hpp"

using namespace rmt;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Closed-form eigenvalues of a real symmetric 3x3 matrix (trigonometric cubic).
std::array<double, 3> sym3_eigenvalues(const Eigen::Matrix3d& a) {
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double q = a.trace() / 3.0;
  const double p2 = std::pow(a(0, 0) - q, 2) + std::pow(a(1, 1) - q, 2) + std::pow(a(2, 2) - q, 2) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  const Eigen::Matrix3d b = (a - q * Eigen::Matrix3d::Identity()) / p;
  const double r = std::clamp(b.determinant() / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  return {e3, 3.0 * q - e1 - e3, e1};
}

// Semicircle variates by rejection.
double semicircle_draw(RandomStream& s) {
  for (;;) {
    const double x = 4.0 * s.uniform() - 2.0;
    const double y = s.uniform() / std::numbers::pi;
    if (y <= semicircle(x)) return x;
  }
}

}  // namespace

TEST_CASE("eigenvalues of small closed forms") {
  Eigen::Matrix3d d = Eigen::Vector3d(3, 1, 2).asDiagonal();
  const auto e = eigenvalues(d);
  CHECK(e(0) == doctest::Approx(1.0));
  CHECK(e(1) == doctest::Approx(2.0));
  CHECK(e(2) == doctest::Approx(3.0));

  Eigen::Matrix2d x;
  x << 0, 1, 1, 0;
  const auto ex = eigenvalues(x);
  CHECK(ex(0) == doctest::Approx(-1.0));
  CHECK(ex(1) == doctest::Approx(1.0));

  Eigen::Matrix2d nonsym;
  nonsym << 0, 1, 0.5, 0;
  CHECK_THROWS_AS(eigenvalues(nonsym), ContractViolation);
}

TEST_CASE("eigensolver agrees with closed forms for dim <= 3") {
  for (int t = 0; t < 200; ++t) {
    RandomStream s(31, t);
    // 2x2 Hermitian: (a+d)/2 +- sqrt(((a-d)/2)^2 + |b|^2).
    const auto h2 = sample_gue(2, s);
    const double a = h2.entries(0, 0).real(), dd = h2.entries(1, 1).real();
    const double rad = std::sqrt(std::pow((a - dd) / 2.0, 2) + std::norm(h2.entries(0, 1)));
    const auto e2 = eigenvalues(h2);
    CHECK(std::abs(e2(0) - ((a + dd) / 2.0 - rad)) < 1e-8);
    CHECK(std::abs(e2(1) - ((a + dd) / 2.0 + rad)) < 1e-8);

    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j) m(i, j) = m(j, i) = s.gaussian();
    }
    const auto ref = sym3_eigenvalues(m);
    const auto e3 = eigenvalues(m);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(e3(i) - ref[i]) < 1e-8);
  }
}

TEST_CASE("real form of flip-symmetric matrices preserves the spectrum") {
  for (const auto& spec : {EnsembleSpec::flip2d(1), EnsembleSpec::flip2d(5), EnsembleSpec::hier_iso(4),
                           EnsembleSpec::folded3d(11, 2)}) {
    for (int t = 0; t < 5; ++t) {
      RandomStream s(2, t);
      const auto h = sample(spec, s);
      REQUIRE(is_flip_symmetric(h.entries));
      const Eigen::MatrixXd r = flip_real_form(h.entries);
      CHECK((r - r.transpose()).cwiseAbs().maxCoeff() < 1e-14);
      const Eigen::VectorXd via_real = eigenvalues(h);
      const Eigen::VectorXd via_complex = eigenvalues(h.entries);
      CHECK((via_real - via_complex).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  RandomStream s(2, 0);
  CHECK_FALSE(is_flip_symmetric(sample_gue(4, s).entries));
}

TEST_CASE("operator norm") {
  Eigen::Matrix2d d = Eigen::Vector2d(-3, 2).asDiagonal();
  CHECK(operator_norm(d) == doctest::Approx(3.0));
  CHECK(operator_norm(Eigen::Matrix3d::Identity().eval()) == doctest::Approx(1.0));
  const auto norms = sample_norms(EnsembleSpec::gue(256), 20, 5);
  double mean = 0;
  for (double n : norms) mean += n / static_cast<double>(norms.size());
  CHECK(std::abs(mean - 2.0) < 0.1);
}

TEST_CASE("gue max eigenvalue near the edge") {
  const auto batch = collect_spectra(EnsembleSpec::gue(512), 10, 3);
  double mean = 0;
  for (const auto& ev : batch.eigenvalues) mean += ev(ev.size() - 1) / 10.0;
  CHECK(std::abs(mean - 2.0) < 0.1);
  CHECK(std::abs(support_edge(batch) - 2.0) < 0.1);
  for (const auto& ev : batch.eigenvalues) {
    CHECK(ev.size() == 512);
    CHECK(std::is_sorted(ev.data(), ev.data() + ev.size()));
  }
}

TEST_CASE("dos histogram conventions") {
  SUBCASE("lower-inclusive bins") {
    const auto dos = estimate_dos(make_batch({vec({0.0})}), 2, -1.0, 1.0);
    CHECK(dos.density[0] == 0.0);
    CHECK(dos.density[1] == doctest::Approx(1.0));
    CHECK(dos.bin_edges.size() == dos.density.size() + 1);
  }
  SUBCASE("out-of-range counts") {
    const auto dos = estimate_dos(make_batch({vec({-5.0, 0.2, 1.0, 7.0})}), 4, -1.0, 1.0);
    CHECK(dos.below_range == 1);
    CHECK(dos.above_range == 2);  // upper edge is exclusive
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(estimate_dos(make_batch({}), 4, -1.0, 1.0), InsufficientStatistics);
    CHECK_THROWS_AS(estimate_dos(make_batch({vec({0.0})}), 1, -1.0, 1.0), InvalidSpec);
    CHECK_THROWS_AS(estimate_dos(make_batch({vec({0.0})}), 4, 1.0, 1.0), InvalidSpec);
  }
}

TEST_CASE("dos normalization and positivity") {
  for (const auto& spec : {EnsembleSpec::gue(40), EnsembleSpec::flip2d(20), EnsembleSpec::hier_toy(2)}) {
    const auto batch = collect_spectra(spec, 30, 9);
    const auto dos = estimate_dos(batch, 50, -6.0, 6.0);
    REQUIRE(dos.below_range + dos.above_range == 0);
    double total = 0;
    for (double v : dos.density) {
      CHECK(v >= 0.0);
      total += v * dos.bin_width();
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
}

TEST_CASE("dos is sign-symmetric for every ensemble") {
  for (const auto& spec : {EnsembleSpec::gue(64), EnsembleSpec::flip2d(32), EnsembleSpec::hier_toy(3),
                           EnsembleSpec::hier_iso(6), EnsembleSpec::folded3d(64, 2)}) {
    CAPTURE(to_string(spec.kind));
    const auto dos = estimate_dos(collect_spectra(spec, 100, 13), 20, -3.0, 3.0);
    for (std::size_t i = 0; i < dos.bins() / 2; ++i) {
      const std::size_t j = dos.bins() - 1 - i;
      const double tol = 3.0 * (dos.std_err[i] + dos.std_err[j]);
      CHECK(std::abs(dos.density[i] - dos.density[j]) <= tol + 1e-12);
    }
  }
}

TEST_CASE("per-bin error shrinks as one over root trials") {
  const auto batch = collect_spectra(EnsembleSpec::gue(64), 200, 21);
  std::vector<std::pair<double, double>> pts;
  for (std::size_t t : {50u, 100u, 200u}) {
    std::vector<Eigen::VectorXd> sub(batch.eigenvalues.begin(),
                                     batch.eigenvalues.begin() + static_cast<std::ptrdiff_t>(t));
    const auto dos = estimate_dos(make_batch(std::move(sub)), 20, -1.5, 1.5);
    double mean = 0;
    for (double e : dos.std_err) mean += e / static_cast<double>(dos.bins());
    pts.emplace_back(static_cast<double>(t), mean);
  }
  const auto fit = fit_power_law(pts);
  CHECK(std::abs(fit.exponent + 0.5) < 0.1);
}

TEST_CASE("centering the shared diagonal") {
  const auto spec = EnsembleSpec::flip2d(8);
  const auto raw = collect_spectra(spec, 4, 1);
  const auto centered = collect_spectra(spec, 4, 1, serial_for, {.center_shared_diagonal = true});
  for (std::size_t t = 0; t < 4; ++t) {
    CHECK((raw.eigenvalues[t].array() - centered.shifts[t] - centered.eigenvalues[t].array()).abs().maxCoeff() <
          1e-12);
  }
  CHECK_THROWS_AS(collect_spectra(EnsembleSpec::gue(4), 1, 1, serial_for, {.center_shared_diagonal = true}),
                  InvalidSpec);
}

TEST_CASE("batches are independent of the executor and extendable") {
  const auto spec = EnsembleSpec::gue(16);
  ParallelFor reversed = [](std::size_t n, const std::function<void(std::size_t)>& f) {
    for (std::size_t i = n; i-- > 0;) f(i);
  };
  const auto a = collect_spectra(spec, 6, 77);
  const auto b = collect_spectra(spec, 6, 77, reversed);
  const auto tail = collect_spectra(spec, 3, 77, serial_for, {.first_stream = 3});
  for (std::size_t t = 0; t < 6; ++t) CHECK(a.eigenvalues[t] == b.eigenvalues[t]);
  for (std::size_t t = 0; t < 3; ++t) CHECK(tail.eigenvalues[t] == a.eigenvalues[t + 3]);
}

TEST_CASE("wilson interval") {
  const auto [lo, hi] = wilson_interval(0, 10000);
  CHECK(lo == 0.0);
  CHECK(hi == doctest::Approx(3.8415 / (10000 + 3.8415)).epsilon(1e-3));
  const auto [l2, h2] = wilson_interval(50, 100);
  CHECK(l2 < 0.5);
  CHECK(h2 > 0.5);
  CHECK((0.5 - l2) == doctest::Approx(h2 - 0.5));
  CHECK_THROWS_AS(wilson_interval(0, 0), InsufficientStatistics);
}

TEST_CASE("tail frequencies") {
  const std::vector<double> norms{1.0, 2.0, 3.0, 4.0};
  const auto t = tail_from_norms(norms, 2.0 / std::sqrt(6.0));
  CHECK(t.exceedances == 3);  // >= threshold counts
  CHECK(t.estimate == doctest::Approx(0.75));
  CHECK(t.wilson_lo <= t.estimate);
  CHECK(t.wilson_hi >= t.estimate);
}

TEST_CASE("pair correlation of independent levels is flat") {
  std::vector<Eigen::VectorXd> spectra;
  for (int t = 0; t < 400; ++t) {
    RandomStream s(5, t);
    Eigen::VectorXd ev(400);
    for (auto& x : ev) x = 2.0 * s.uniform() - 1.0;
    std::sort(ev.data(), ev.data() + ev.size());
    spectra.push_back(ev);
  }
  const auto r2 = pair_correlation(make_batch(std::move(spectra)), -0.5, 0.5, 3.0, 15);
  CHECK(r2.mean_spacing == doctest::Approx(1.0 / 200.0).epsilon(0.02));
  for (std::size_t i = 0; i < r2.bins(); ++i) {
    CHECK(r2.r2[i] >= 0.0);
    if (r2.bin_center(i) < 0.2) continue;
    CAPTURE(r2.bin_center(i));
    CHECK(std::abs(r2.r2[i] - 1.0) <= 3.0 * r2.std_err[i]);
  }
}

TEST_CASE("pair correlation needs enough levels") {
  CHECK_THROWS_AS(pair_correlation(make_batch({vec({0.0, 0.1, 0.2})}), -1.0, 1.0, 3.0, 10),
                  InsufficientStatistics);
}

TEST_CASE("support edge") {
  std::vector<Eigen::VectorXd> spectra;
  for (int t = 0; t < 20; ++t) {
    RandomStream s(8, t);
    Eigen::VectorXd ev(5000);
    for (auto& x : ev) x = semicircle_draw(s);
    std::sort(ev.data(), ev.data() + ev.size());
    spectra.push_back(ev);
  }
  const auto batch = make_batch(std::move(spectra));
  CHECK(std::abs(support_edge(batch) - 2.0) < 0.05);
  CHECK(support_edge(make_batch({vec({1.0, 1.0, 1.0})})) == doctest::Approx(1.0));
}

TEST_CASE("semi-ellipse fit") {
  SUBCASE("exact semicircle") {
    const auto dos = dos_from_function([](double e) { return semicircle(e); }, 200, -2.5, 2.5);
    const auto fit = fit_semiellipse(dos);
    CHECK(fit.edge == doctest::Approx(2.0).epsilon(0.01));
    CHECK(fit.amplitude == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(0.02));
  }
  SUBCASE("noisy semicircle") {
    std::vector<Eigen::VectorXd> spectra;
    for (int t = 0; t < 50; ++t) {
      RandomStream s(12, t);
      Eigen::VectorXd ev(2000);
      for (auto& x : ev) x = semicircle_draw(s);
      std::sort(ev.data(), ev.data() + ev.size());
      spectra.push_back(ev);
    }
    const auto fit = fit_semiellipse(estimate_dos(make_batch(std::move(spectra)), 80, -2.5, 2.5));
    CHECK(std::abs(fit.edge - 2.0) < 0.05);
  }
}

TEST_CASE("power law fit") {
  std::vector<std::pair<double, double>> inv, root;
  for (double n : {64.0, 128.0, 256.0, 512.0, 1024.0}) {
    inv.emplace_back(n, 5.0 / n);
    root.emplace_back(n, 2.0 / std::sqrt(n));
  }
  CHECK(fit_power_law(inv).exponent == doctest::Approx(-1.0));
  CHECK(fit_power_law(inv).intercept == doctest::Approx(std::log(5.0)));
  CHECK(fit_power_law(root).exponent == doctest::Approx(-0.5));
  CHECK(fit_power_law(root).r_squared == doctest::Approx(1.0));
}

TEST_CASE("dos distance") {
  const auto f = [](double e) { return semicircle(e); };
  const auto dos = dos_from_function(f, 40, -1.0, 1.0);
  const auto same = dos_distance(dos, f, -1.0, 1.0);
  CHECK(same.sup == doctest::Approx(0.0));
  CHECK(same.l1 == doctest::Approx(0.0));
  const auto shifted = dos_distance(dos, [&](double e) { return f(e) + 0.1; }, -0.5, 0.5);
  CHECK(shifted.sup == doctest::Approx(0.1));
  CHECK(shifted.l1 == doctest::Approx(0.1));
}

TEST_CASE("smoothed dos of a point mass is the kernel") {
  const auto batch = make_batch({vec({0.0})});
  const auto g = smoothed_dos(batch, {0.0, 1.0}, Kernel::Gaussian, 0.5);
  CHECK(g.density[0] == doctest::Approx(1.0 / (0.5 * std::sqrt(2.0 * std::numbers::pi))));
  const auto l = smoothed_dos(batch, {0.0}, Kernel::Lorentzian, 0.1);
  CHECK(l.density[0] == doctest::Approx(1.0 / (std::numbers::pi * 0.1)));
  CHECK_THROWS_AS(smoothed_dos(batch, {0.0}, Kernel::Gaussian, 0.0), InvalidSpec);
}
