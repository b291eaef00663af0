#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace rmt {

/// Deterministic substream of a master seed.
///
/// Each (master_seed, stream_index) pair owns an mt19937_64 engine seeded
/// through std::seed_seq, so distinct indices give decorrelated sequences
/// and the same pair always reproduces the same bytes. Uniforms and
/// Gaussians are derived by hand (53-bit mantissa, Box-Muller) so the
/// output does not depend on the standard library's distribution classes.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t stream_index);

  [[nodiscard]] std::uint64_t master_seed() const { return master_seed_; }
  [[nodiscard]] std::uint64_t stream_index() const { return stream_index_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform();

  /// Standard normal variate (mean 0, variance 1).
  double gaussian();

  /// Complex Gaussian with E|z|^2 = variance (real and imaginary parts
  /// independent, each with variance / 2).
  std::complex<double> complex_gaussian(double variance);

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace rmt
