#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rmt/random_stream.hpp"

namespace rmt {

enum class EnsembleKind : std::uint8_t { GUE = 0, Flip2D = 1, HierToy = 2, HierIso = 3, Folded3D = 4 };

/// Entry variance of every independent variable: 1 (UnitEntries) or 1/dim (InverseDim).
enum class Normalization : std::uint8_t { UnitEntries, InverseDim };

/// Declarative description of one random-matrix ensemble.
///
/// dim is always the matrix dimension D. The remaining fields are only
/// meaningful for the kinds that use them:
///   Flip2D   D = 2 * half_dim
///   HierToy  D = 4^levels
///   HierIso  D = 2^levels
///   Folded3D 2^folds <= D / 2
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::GUE;
  std::size_t dim = 1;
  std::size_t half_dim = 0;
  std::size_t levels = 0;
  std::size_t folds = 0;
  Normalization normalization = Normalization::InverseDim;

  static EnsembleSpec gue(std::size_t dim, Normalization n = Normalization::InverseDim);
  static EnsembleSpec flip2d(std::size_t half_dim, Normalization n = Normalization::InverseDim);
  static EnsembleSpec hier_toy(std::size_t levels, Normalization n = Normalization::InverseDim);
  static EnsembleSpec hier_iso(std::size_t levels, Normalization n = Normalization::InverseDim);
  static EnsembleSpec folded3d(std::size_t dim, std::size_t folds,
                               Normalization n = Normalization::InverseDim);

  friend bool operator==(const EnsembleSpec&, const EnsembleSpec&) = default;
};

/// Throws InvalidSpec when the dimension bookkeeping is inconsistent.
void validate(const EnsembleSpec& spec);

/// Variance of one independent (off-diagonal or diagonal-level) variable.
double entry_variance(const EnsembleSpec& spec);

/// True when every sample satisfies H[a][b] = H[D-1-b][D-1-a].
bool has_flip_symmetry(const EnsembleSpec& spec);

/// True when the diagonal is a single shared real variable V0 times identity.
bool has_shared_diagonal(const EnsembleSpec& spec);

std::string_view to_string(EnsembleKind kind);
EnsembleKind parse_ensemble_kind(std::string_view name);  // throws InvalidSpec

enum class OrbitTag : std::uint8_t { IndependentComplex, IndependentReal, Zero, SharedDiagonalLevel };

struct MatrixPosition {
  std::uint32_t row;
  std::uint32_t col;
  friend bool operator==(const MatrixPosition&, const MatrixPosition&) = default;
};

/// A set of upper-triangle positions (row <= col) driven by one random variable.
///
/// Off-diagonal positions are partitioned by the orbits. Diagonal positions
/// are covered: a hierarchical diagonal entry is the sum of one
/// SharedDiagonalLevel variable per level, so it appears in several orbits.
struct Orbit {
  OrbitTag tag = OrbitTag::IndependentComplex;
  int level = 0;
  int group = 0;
  std::vector<MatrixPosition> positions;
};

struct OrbitMap {
  std::size_t dim = 0;
  std::vector<Orbit> orbits;
};

/// Materializes the identifications of the ensemble. Diagonal orbits come
/// first (by level, then group), then off-diagonal orbits in row-major order
/// of their first position. Samplers draw variables in exactly this order.
OrbitMap orbit_map(const EnsembleSpec& spec);

std::size_t independent_parameter_count(const OrbitMap& map);
std::size_t independent_parameter_count(const EnsembleSpec& spec);

/// Shell index of a diagonal band b >= 1 for a 2^levels hierarchical matrix:
/// clamp(levels - 1 - floor(log2 b), 0, levels - 1).
int hier_iso_shell(std::size_t band, std::size_t levels);

/// Representative (1-based) of position m on a band of length n after
/// `folds` iterated dyadic reflections.
std::size_t fold_representative(std::size_t m, std::size_t n, std::size_t folds);

/// True when (row, col) lies in one of the zero blocks of the recursive
/// toy-model pattern of dimension dim = 4^levels.
bool hier_toy_is_zero(std::size_t row, std::size_t col, std::size_t dim);

struct HermitianMatrix {
  EnsembleSpec spec;
  std::uint64_t seed = 0;
  std::uint64_t stream_index = 0;
  Eigen::MatrixXcd entries;

  [[nodiscard]] Eigen::Index dim() const { return entries.rows(); }
};

/// Samples an ensemble with a precomputed orbit map; reuse one instance
/// across trials so the map is built once.
class EnsembleSampler {
 public:
  explicit EnsembleSampler(const EnsembleSpec& spec);

  [[nodiscard]] const EnsembleSpec& spec() const { return spec_; }
  [[nodiscard]] const OrbitMap& orbits() const { return map_; }

  HermitianMatrix operator()(RandomStream& stream) const;

 private:
  EnsembleSpec spec_;
  OrbitMap map_;
  double variance_;
};

HermitianMatrix sample(const EnsembleSpec& spec, RandomStream& stream);

HermitianMatrix sample_gue(std::size_t dim, RandomStream& stream);
HermitianMatrix sample_flip2d(std::size_t half_dim, RandomStream& stream);
HermitianMatrix sample_hier_toy(std::size_t levels, RandomStream& stream);
HermitianMatrix sample_hier_iso(std::size_t levels, RandomStream& stream);
HermitianMatrix sample_folded3d(std::size_t dim, std::size_t folds, RandomStream& stream);

}  // namespace rmt
