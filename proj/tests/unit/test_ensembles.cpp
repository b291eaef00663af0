#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "rmt/ensembles.hpp"
#include "rmt/error.hpp"
#include "rmt/random_stream.hpp"

using namespace rmt;

namespace {

bool bitwise_hermitian(const Eigen::MatrixXcd& h) {
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      if (h(i, j) != std::conj(h(j, i))) return false;
    }
  }
  return true;
}

bool bitwise_flip(const Eigen::MatrixXcd& h) {
  const Eigen::Index d = h.rows();
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      if (h(a, b) != h(d - 1 - b, d - 1 - a)) return false;
    }
  }
  return true;
}

std::vector<EnsembleSpec> small_specs() {
  return {EnsembleSpec::gue(1),         EnsembleSpec::gue(5),        EnsembleSpec::flip2d(1),
          EnsembleSpec::flip2d(4),      EnsembleSpec::hier_toy(1),   EnsembleSpec::hier_toy(2),
          EnsembleSpec::hier_iso(1),    EnsembleSpec::hier_iso(4),   EnsembleSpec::folded3d(8, 0),
          EnsembleSpec::folded3d(8, 2), EnsembleSpec::folded3d(9, 1)};
}

}  // namespace

TEST_CASE("random stream is reproducible and index-separated") {
  RandomStream a(42, 3), b(42, 3), c(42, 4);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs = differs || x != c.next_u64();
  }
  CHECK(differs);
  RandomStream u(1, 0);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    REQUIRE(v > 0.0);
    REQUIRE(v < 1.0);
  }
}

TEST_CASE("gaussian and complex gaussian moments") {
  RandomStream s(7, 0);
  const int n = 200000;
  double m = 0, m2 = 0, c2 = 0;
  for (int i = 0; i < n; ++i) {
    const double g = s.gaussian();
    m += g;
    m2 += g * g;
    c2 += std::norm(s.complex_gaussian(2.0));
  }
  CHECK(std::abs(m / n) < 5.0 / std::sqrt(n));
  CHECK(std::abs(m2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(c2 / n - 2.0) < 5.0 * 2.0 / std::sqrt(n));
}

TEST_CASE("ensemble spec validation") {
  CHECK_THROWS_AS(validate(EnsembleSpec::gue(0)), InvalidSpec);
  CHECK_THROWS_AS(validate(EnsembleSpec::flip2d(0)), InvalidSpec);
  CHECK_THROWS_AS(validate(EnsembleSpec::hier_toy(0)), InvalidSpec);
  CHECK_THROWS_AS(validate(EnsembleSpec::hier_iso(0)), InvalidSpec);
  CHECK_THROWS_AS(validate(EnsembleSpec::folded3d(8, 3)), InvalidSpec);  // 2^3 > 8/2
  CHECK_NOTHROW(validate(EnsembleSpec::folded3d(8, 2)));

  EnsembleSpec bad = EnsembleSpec::hier_toy(2);
  bad.dim = 15;
  CHECK_THROWS_AS(validate(bad), InvalidSpec);
  bad = EnsembleSpec::hier_iso(3);
  bad.dim = 12;
  CHECK_THROWS_AS(validate(bad), InvalidSpec);
  bad = EnsembleSpec::flip2d(3);
  bad.dim = 7;
  CHECK_THROWS_AS(validate(bad), InvalidSpec);

  RandomStream s(1, 0);
  CHECK_THROWS_AS(sample_gue(0, s), InvalidSpec);
}

TEST_CASE("ensemble names round-trip") {
  for (auto k : {EnsembleKind::GUE, EnsembleKind::Flip2D, EnsembleKind::HierToy, EnsembleKind::HierIso,
                 EnsembleKind::Folded3D}) {
    CHECK(parse_ensemble_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_ensemble_kind("goe"), InvalidSpec);
}

TEST_CASE("every sampler is bitwise Hermitian and reproducible") {
  for (const auto& spec : small_specs()) {
    CAPTURE(to_string(spec.kind));
    CAPTURE(spec.dim);
    for (std::uint64_t seed : {1u, 2u, 99u}) {
      RandomStream s1(seed, 0), s2(seed, 0);
      const auto h1 = sample(spec, s1);
      const auto h2 = sample(spec, s2);
      CHECK(h1.dim() == static_cast<Eigen::Index>(spec.dim));
      CHECK(bitwise_hermitian(h1.entries));
      CHECK(h1.entries == h2.entries);
      if (has_flip_symmetry(spec)) CHECK(bitwise_flip(h1.entries));
      if (has_shared_diagonal(spec)) {
        for (Eigen::Index i = 1; i < h1.dim(); ++i) CHECK(h1.entries(i, i) == h1.entries(0, 0));
      }
    }
  }
}

TEST_CASE("gue dim 1 is a unit-variance real gaussian") {
  const int n = 20000;
  double m2 = 0;
  for (int t = 0; t < n; ++t) {
    RandomStream s(5, t);
    const auto h = sample_gue(1, s);
    CHECK(h.entries(0, 0).imag() == 0.0);
    m2 += std::norm(h.entries(0, 0));
  }
  CHECK(std::abs(m2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("gue off-diagonal variance is 1/D") {
  const std::size_t d = 512;
  const EnsembleSampler sampler(EnsembleSpec::gue(d));
  // 10^4 samples of |H_ij|^2 from 1 matrix worth of distinct entries per draw.
  const int draws = 20;
  double sum = 0, sum2 = 0;
  std::size_t n = 0;
  for (int t = 0; t < draws; ++t) {
    RandomStream s(11, t);
    const auto h = sampler(s);
    for (std::size_t j = 1; j < 501; ++j) {
      const double v = std::norm(h.entries(0, static_cast<Eigen::Index>(j)));
      sum += v;
      sum2 += v * v;
      ++n;
    }
  }
  const double mean = sum / static_cast<double>(n);
  const double se = std::sqrt((sum2 / static_cast<double>(n) - mean * mean) / static_cast<double>(n));
  CHECK(std::abs(mean - 1.0 / d) < 5.0 * se);
}

TEST_CASE("distinct streams are uncorrelated") {
  const auto spec = EnsembleSpec::gue(4);
  const int n = 1000;
  double sxy = 0, sx2 = 0, sy2 = 0;
  for (int t = 0; t < n; ++t) {
    RandomStream a(3, 2 * t), b(3, 2 * t + 1);
    const double x = sample(spec, a).entries(0, 1).real();
    const double y = sample(spec, b).entries(0, 1).real();
    sxy += x * y;
    sx2 += x * x;
    sy2 += y * y;
  }
  const double corr = sxy / std::sqrt(sx2 * sy2);
  CHECK(std::abs(corr) < 5.0 / std::sqrt(n));
}

TEST_CASE("orbit counts") {
  SUBCASE("gue dim 3") {
    const auto map = orbit_map(EnsembleSpec::gue(3));
    int real = 0, cplx = 0;
    for (const auto& o : map.orbits) {
      real += o.tag == OrbitTag::IndependentReal;
      cplx += o.tag == OrbitTag::IndependentComplex;
    }
    CHECK(real == 3);
    CHECK(cplx == 3);
    for (std::size_t d : {1u, 2u, 7u}) CHECK(independent_parameter_count(EnsembleSpec::gue(d)) == d + d * (d - 1) / 2);
  }
  SUBCASE("flip2d") {
    for (std::size_t n : {1u, 2u, 3u, 4u, 64u}) {
      CAPTURE(n);
      const auto map = orbit_map(EnsembleSpec::flip2d(n));
      std::size_t real = 0, cplx = 0;
      for (const auto& o : map.orbits) {
        real += o.tag == OrbitTag::IndependentReal || o.tag == OrbitTag::SharedDiagonalLevel;
        cplx += o.tag == OrbitTag::IndependentComplex;
      }
      CHECK(real == 1);
      CHECK(cplx == n * n);
    }
    // N = 2: the two antidiagonal entries (0,3) and (1,2) are fixed by the flip.
    const auto map = orbit_map(EnsembleSpec::flip2d(2));
    std::size_t singletons = 0;
    for (const auto& o : map.orbits) {
      if (o.tag == OrbitTag::IndependentComplex && o.positions.size() == 1) {
        const auto p = o.positions.front();
        CHECK(p.row + p.col == 3);
        ++singletons;
      }
    }
    CHECK(singletons == 2);
  }
  SUBCASE("hier toy level 1 has two zero blocks") {
    const auto map = orbit_map(EnsembleSpec::hier_toy(1));
    std::set<std::pair<int, int>> zeros;
    int zero_orbits = 0;
    for (const auto& o : map.orbits) {
      if (o.tag != OrbitTag::Zero) continue;
      ++zero_orbits;
      for (const auto& p : o.positions) zeros.insert({static_cast<int>(p.row), static_cast<int>(p.col)});
    }
    CHECK(zero_orbits == 2);
    CHECK(zeros == std::set<std::pair<int, int>>{{0, 1}, {2, 3}});
  }
  SUBCASE("hier toy level 2 zero fraction") {
    // Blocks (1,2) and (3,4) of the 4x4 block grid at each scale: at the top
    // level 2 blocks of 4x4 entries, then 2 single entries in each of the
    // 4 diagonal blocks. 32 + 8 = 40 of the 120 strict upper entries.
    std::size_t zeros = 0;
    for (std::size_t r = 0; r < 16; ++r) {
      for (std::size_t c = r + 1; c < 16; ++c) zeros += hier_toy_is_zero(r, c, 16);
    }
    CHECK(zeros == 40);
  }
  SUBCASE("hier iso regression fixture") {
    CHECK(independent_parameter_count(EnsembleSpec::hier_iso(1)) == 2);
    // Cross-checked by an independent union-find enumeration of the tiling.
    CHECK(independent_parameter_count(EnsembleSpec::hier_iso(2)) == 5);
    CHECK(independent_parameter_count(EnsembleSpec::hier_iso(3)) == 13);
    CHECK(independent_parameter_count(EnsembleSpec::hier_iso(4)) == 42);
  }
  SUBCASE("folded3d") {
    // k = 0: every off-diagonal entry independent, one shared diagonal.
    CHECK(independent_parameter_count(EnsembleSpec::folded3d(8, 0)) == 1 + 28);
    CHECK(independent_parameter_count(EnsembleSpec::folded3d(8, 1)) == 1 + 16);
    // N = 4, k = 1, band 1: positions {1,3} and {2}.
    CHECK(fold_representative(1, 3, 1) == fold_representative(3, 3, 1));
    CHECK(fold_representative(2, 3, 1) != fold_representative(1, 3, 1));
    // Count shrinks roughly as N^2 / 2^k.
    const double n = 64;
    for (std::size_t k : {1u, 2u, 3u}) {
      const double ratio = static_cast<double>(independent_parameter_count(EnsembleSpec::folded3d(64, k))) /
                           (n * n / 2.0 / std::pow(2.0, static_cast<double>(k)));
      CHECK(ratio > 0.8);
      CHECK(ratio < 1.6);
    }
  }
}

TEST_CASE("hier iso shell rule") {
  CHECK(hier_iso_shell(1, 3) == 2);
  CHECK(hier_iso_shell(4, 3) == 0);
  CHECK(hier_iso_shell(2, 3) == 1);
  CHECK(hier_iso_shell(3, 3) == 1);
  CHECK(hier_iso_shell(7, 3) == 0);
}

TEST_CASE("orbit map partitions the upper triangle and matches the sampler") {
  for (const auto& spec : small_specs()) {
    CAPTURE(to_string(spec.kind));
    CAPTURE(spec.dim);
    const auto map = orbit_map(spec);
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> owner;
    for (std::size_t id = 0; id < map.orbits.size(); ++id) {
      for (const auto& p : map.orbits[id].positions) {
        REQUIRE(p.row <= p.col);
        if (p.row == p.col) continue;  // diagonals may carry several level variables
        CHECK(owner.count({p.row, p.col}) == 0);
        owner[{p.row, p.col}] = static_cast<int>(id);
      }
    }
    CHECK(owner.size() == spec.dim * (spec.dim - 1) / 2);

    RandomStream s(17, 0);
    const auto h = sample(spec, s);
    for (const auto& o : map.orbits) {
      if (o.positions.front().row == o.positions.front().col) continue;
      const auto ref = h.entries(o.positions.front().row, o.positions.front().col);
      for (const auto& p : o.positions) {
        if (o.tag == OrbitTag::Zero) {
          CHECK(h.entries(p.row, p.col) == std::complex<double>(0.0, 0.0));
        } else {
          CHECK(h.entries(p.row, p.col) == ref);
        }
      }
    }
  }
}

TEST_CASE("hier toy diagonal is a sum of level variables") {
  // Entries in the same level-1 group share V0 and V1; their difference is
  // the sum of the finer level variables only.
  const auto spec = EnsembleSpec::hier_toy(1);
  const int n = 20000;
  double same = 0, d01 = 0;
  for (int t = 0; t < n; ++t) {
    RandomStream s(23, t);
    const auto h = sample(spec, s);
    same += h.entries(0, 0).real() * h.entries(3, 3).real();
    d01 += std::norm(h.entries(0, 0).real());
  }
  const double var = entry_variance(spec);
  // Cov(H00, H33) = var(V0); Var(H00) = 2 var for two levels.
  CHECK(std::abs(same / n - var) < 6.0 * var * std::sqrt(2.0 / n) * 2.0);
  CHECK(std::abs(d01 / n - 2.0 * var) < 6.0 * 2.0 * var * std::sqrt(2.0 / n));
}

TEST_CASE("hier toy level 1 nonzero entries") {
  RandomStream s(8, 0);
  const auto h = sample_hier_toy(1, s);
  CHECK(h.entries(0, 1) == std::complex<double>(0, 0));
  CHECK(h.entries(2, 3) == std::complex<double>(0, 0));
  for (auto [r, c] : {std::pair{0, 2}, {0, 3}, {1, 2}, {1, 3}}) CHECK(std::abs(h.entries(r, c)) > 0.0);
}
