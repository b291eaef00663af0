#include "rmt/ensembles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>

#include "rmt/error.hpp"

namespace rmt {

namespace {

bool is_power_of(std::size_t value, std::size_t base, std::size_t exponent) {
  std::size_t p = 1;
  for (std::size_t i = 0; i < exponent; ++i) {
    if (p > value / base) return false;
    p *= base;
  }
  return p == value;
}

std::size_t checked_pow(std::size_t base, std::size_t exponent) {
  std::size_t p = 1;
  for (std::size_t i = 0; i < exponent; ++i) {
    if (p > (std::size_t{1} << 31) / base) throw InvalidSpec("ensemble dimension overflows");
    p *= base;
  }
  return p;
}

// Groups off-diagonal upper-triangle positions by an integer key, keeping the
// row-major order of first appearance.
template <typename KeyFn>
void append_keyed_orbits(std::size_t dim, KeyFn key_of, OrbitMap& map) {
  std::unordered_map<std::int64_t, std::size_t> index;
  index.reserve(dim * dim / 2);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = r + 1; c < dim; ++c) {
      const auto [key, tag] = key_of(r, c);
      const MatrixPosition pos{static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c)};
      auto [it, inserted] = index.try_emplace(key, map.orbits.size());
      if (inserted) map.orbits.push_back(Orbit{tag, 0, 0, {}});
      map.orbits[it->second].positions.push_back(pos);
    }
  }
}

void append_shared_diagonal(std::size_t dim, OrbitMap& map) {
  Orbit diag{OrbitTag::SharedDiagonalLevel, 0, 0, {}};
  diag.positions.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    diag.positions.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i)});
  }
  map.orbits.push_back(std::move(diag));
}

using KeyTag = std::pair<std::int64_t, OrbitTag>;

OrbitMap gue_orbits(std::size_t dim) {
  OrbitMap map{dim, {}};
  map.orbits.reserve(dim * (dim + 1) / 2);
  for (std::size_t i = 0; i < dim; ++i) {
    map.orbits.push_back(Orbit{OrbitTag::IndependentReal, 0, 0,
                               {{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i)}}});
  }
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = r + 1; c < dim; ++c) {
      map.orbits.push_back(Orbit{OrbitTag::IndependentComplex, 0, 0,
                                 {{static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c)}}});
    }
  }
  return map;
}

// Key of the flip-image-closed pair containing (r, c): the smaller of the
// two row-major indices.
std::int64_t flip_pair_key(std::size_t r, std::size_t c, std::size_t dim) {
  const std::size_t fr = dim - 1 - c;
  const std::size_t fc = dim - 1 - r;
  return static_cast<std::int64_t>(std::min(r * dim + c, fr * dim + fc));
}

OrbitMap flip2d_orbits(std::size_t dim) {
  OrbitMap map{dim, {}};
  append_shared_diagonal(dim, map);
  append_keyed_orbits(
      dim, [dim](std::size_t r, std::size_t c) {
        return KeyTag{flip_pair_key(r, c, dim), OrbitTag::IndependentComplex};
      },
      map);
  return map;
}

OrbitMap hier_toy_orbits(std::size_t levels, std::size_t dim) {
  OrbitMap map{dim, {}};
  for (std::size_t k = 0; k <= levels; ++k) {
    const std::size_t groups = checked_pow(4, k);
    const std::size_t width = dim / groups;
    for (std::size_t g = 0; g < groups; ++g) {
      Orbit orbit{OrbitTag::SharedDiagonalLevel, static_cast<int>(k), static_cast<int>(g), {}};
      for (std::size_t i = g * width; i < (g + 1) * width; ++i) {
        orbit.positions.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i)});
      }
      map.orbits.push_back(std::move(orbit));
    }
  }
  // Each nonzero off-diagonal entry is its own orbit; zeros are grouped by
  // the block they belong to so the Zero orbits stay few and readable.
  append_keyed_orbits(
      dim, [dim](std::size_t r, std::size_t c) {
        if (!hier_toy_is_zero(r, c, dim)) {
          return KeyTag{static_cast<std::int64_t>(r * dim + c), OrbitTag::IndependentComplex};
        }
        // Smallest enclosing zero block: find the level where the split happened.
        std::size_t size = dim;
        while (r / (size / 4) == c / (size / 4)) size /= 4;
        const std::size_t bs = size / 4;
        const auto block_key = static_cast<std::int64_t>((r / bs) * dim + (c / bs));
        return KeyTag{-1 - (block_key * 64 + static_cast<std::int64_t>(std::countr_zero(bs))),
                      OrbitTag::Zero};
      },
      map);
  return map;
}

// Union-find over tile keys so a tile and its flip image share one variable.
OrbitMap hier_iso_orbits(std::size_t levels, std::size_t dim) {
  OrbitMap map{dim, {}};
  append_shared_diagonal(dim, map);

  auto tile_key = [dim, levels](std::size_t r, std::size_t c) -> std::int64_t {
    const std::size_t band = c - r;
    const auto D = static_cast<std::int64_t>(dim);
    if (band < dim / 2) {
      const int k = hier_iso_shell(band, levels);
      const std::size_t t = std::size_t{1} << k;
      return ((static_cast<std::int64_t>(band) * D + static_cast<std::int64_t>(r / t)) * D +
              static_cast<std::int64_t>(c / t)) * 2;
    }
    const std::size_t s = r + c;
    const std::size_t anti = s > dim - 1 ? s - (dim - 1) : (dim - 1) - s;
    const int k = anti == 0 ? 0 : hier_iso_shell(anti, levels);
    const std::size_t t = std::size_t{1} << k;
    return ((static_cast<std::int64_t>(s) * D + static_cast<std::int64_t>(r / t)) * D +
            static_cast<std::int64_t>(c / t)) * 2 + 1;
  };

  append_keyed_orbits(
      dim, [&](std::size_t r, std::size_t c) {
        const std::int64_t own = tile_key(r, c);
        const std::int64_t image = tile_key(dim - 1 - c, dim - 1 - r);
        return KeyTag{std::min(own, image), OrbitTag::IndependentComplex};
      },
      map);
  return map;
}

OrbitMap folded3d_orbits(std::size_t dim, std::size_t folds) {
  OrbitMap map{dim, {}};
  append_shared_diagonal(dim, map);
  append_keyed_orbits(
      dim, [dim, folds](std::size_t r, std::size_t c) {
        const std::size_t band = c - r;
        const std::size_t rep = fold_representative(r + 1, dim - band, folds);
        return KeyTag{static_cast<std::int64_t>(band * dim + rep), OrbitTag::IndependentComplex};
      },
      map);
  return map;
}

}  // namespace

EnsembleSpec EnsembleSpec::gue(std::size_t dim, Normalization n) {
  return {EnsembleKind::GUE, dim, 0, 0, 0, n};
}

EnsembleSpec EnsembleSpec::flip2d(std::size_t half_dim, Normalization n) {
  return {EnsembleKind::Flip2D, 2 * half_dim, half_dim, 0, 0, n};
}

EnsembleSpec EnsembleSpec::hier_toy(std::size_t levels, Normalization n) {
  const std::size_t dim = levels < 16 ? checked_pow(4, levels) : 0;
  return {EnsembleKind::HierToy, dim, 0, levels, 0, n};
}

EnsembleSpec EnsembleSpec::hier_iso(std::size_t levels, Normalization n) {
  const std::size_t dim = levels < 31 ? checked_pow(2, levels) : 0;
  return {EnsembleKind::HierIso, dim, 0, levels, 0, n};
}

EnsembleSpec EnsembleSpec::folded3d(std::size_t dim, std::size_t folds, Normalization n) {
  return {EnsembleKind::Folded3D, dim, 0, 0, folds, n};
}

void validate(const EnsembleSpec& spec) {
  if (spec.dim == 0) throw InvalidSpec("ensemble dimension must be positive");
  if (spec.dim > 65536) throw InvalidSpec("ensemble dimension too large for dense sampling");
  switch (spec.kind) {
    case EnsembleKind::GUE:
      return;
    case EnsembleKind::Flip2D:
      if (spec.half_dim == 0 || spec.dim != 2 * spec.half_dim) {
        throw InvalidSpec("flip2d requires half_dim >= 1 and dim = 2 * half_dim");
      }
      return;
    case EnsembleKind::HierToy:
      if (spec.levels == 0 || !is_power_of(spec.dim, 4, spec.levels)) {
        throw InvalidSpec("hier-toy requires levels >= 1 and dim = 4^levels");
      }
      return;
    case EnsembleKind::HierIso:
      if (spec.levels == 0 || !is_power_of(spec.dim, 2, spec.levels)) {
        throw InvalidSpec("hier-iso requires levels >= 1 and dim = 2^levels");
      }
      return;
    case EnsembleKind::Folded3D:
      if (spec.folds >= 31 || (std::size_t{1} << spec.folds) > spec.dim / 2) {
        throw InvalidSpec("folded3d requires 2^folds <= dim / 2");
      }
      return;
  }
  throw InvalidSpec("unknown ensemble kind");
}

double entry_variance(const EnsembleSpec& spec) {
  return spec.normalization == Normalization::InverseDim ? 1.0 / static_cast<double>(spec.dim)
                                                         : 1.0;
}

bool has_flip_symmetry(const EnsembleSpec& spec) {
  switch (spec.kind) {
    case EnsembleKind::Flip2D:
    case EnsembleKind::HierIso:
      return true;
    case EnsembleKind::Folded3D:
      return spec.folds >= 1;
    default:
      return false;
  }
}

bool has_shared_diagonal(const EnsembleSpec& spec) {
  return spec.kind == EnsembleKind::Flip2D || spec.kind == EnsembleKind::HierIso ||
         spec.kind == EnsembleKind::Folded3D;
}

std::string_view to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::GUE: return "gue";
    case EnsembleKind::Flip2D: return "flip2d";
    case EnsembleKind::HierToy: return "hier-toy";
    case EnsembleKind::HierIso: return "hier-iso";
    case EnsembleKind::Folded3D: return "folded3d";
  }
  return "unknown";
}

EnsembleKind parse_ensemble_kind(std::string_view name) {
  for (auto kind : {EnsembleKind::GUE, EnsembleKind::Flip2D, EnsembleKind::HierToy,
                    EnsembleKind::HierIso, EnsembleKind::Folded3D}) {
    if (name == to_string(kind)) return kind;
  }
  throw InvalidSpec("unknown ensemble '" + std::string(name) + "'");
}

int hier_iso_shell(std::size_t band, std::size_t levels) {
  if (band == 0) throw InvalidSpec("shell index is undefined on the diagonal");
  const int floor_log2 = static_cast<int>(std::bit_width(band)) - 1;
  const int k = static_cast<int>(levels) - 1 - floor_log2;
  return std::clamp(k, 0, static_cast<int>(levels) - 1);
}

std::size_t fold_representative(std::size_t m, std::size_t n, std::size_t folds) {
  for (std::size_t f = 0; f < folds && n > 1; ++f) {
    const std::size_t half = (n + 1) / 2;
    if (m > half) m = n + 1 - m;
    n = half;
  }
  return m;
}

bool hier_toy_is_zero(std::size_t row, std::size_t col, std::size_t dim) {
  std::size_t size = dim;
  while (size >= 4) {
    const std::size_t bs = size / 4;
    const std::size_t br = (row % size) / bs;
    const std::size_t bc = (col % size) / bs;
    if (br == bc) {
      size = bs;
      continue;
    }
    const std::size_t lo = std::min(br, bc);
    const std::size_t hi = std::max(br, bc);
    return (lo == 0 && hi == 1) || (lo == 2 && hi == 3);
  }
  return false;
}

OrbitMap orbit_map(const EnsembleSpec& spec) {
  validate(spec);
  switch (spec.kind) {
    case EnsembleKind::GUE: return gue_orbits(spec.dim);
    case EnsembleKind::Flip2D: return flip2d_orbits(spec.dim);
    case EnsembleKind::HierToy: return hier_toy_orbits(spec.levels, spec.dim);
    case EnsembleKind::HierIso: return hier_iso_orbits(spec.levels, spec.dim);
    case EnsembleKind::Folded3D: return folded3d_orbits(spec.dim, spec.folds);
  }
  throw InvalidSpec("unknown ensemble kind");
}

std::size_t independent_parameter_count(const OrbitMap& map) {
  return static_cast<std::size_t>(std::count_if(map.orbits.begin(), map.orbits.end(),
                                                [](const Orbit& o) { return o.tag != OrbitTag::Zero; }));
}

std::size_t independent_parameter_count(const EnsembleSpec& spec) {
  return independent_parameter_count(orbit_map(spec));
}

EnsembleSampler::EnsembleSampler(const EnsembleSpec& spec)
    : spec_(spec), map_(orbit_map(spec)), variance_(entry_variance(spec)) {}

HermitianMatrix EnsembleSampler::operator()(RandomStream& stream) const {
  const auto n = static_cast<Eigen::Index>(spec_.dim);
  HermitianMatrix h{spec_, stream.master_seed(), stream.stream_index(),
                    Eigen::MatrixXcd::Zero(n, n)};
  const double sigma = std::sqrt(variance_);
  for (const Orbit& orbit : map_.orbits) {
    switch (orbit.tag) {
      case OrbitTag::Zero:
        break;
      case OrbitTag::IndependentReal:
      case OrbitTag::SharedDiagonalLevel: {
        const double v = sigma * stream.gaussian();
        for (const auto& p : orbit.positions) h.entries(p.row, p.col) += v;
        break;
      }
      case OrbitTag::IndependentComplex: {
        const std::complex<double> v = stream.complex_gaussian(variance_);
        for (const auto& p : orbit.positions) {
          h.entries(p.row, p.col) = v;
          h.entries(p.col, p.row) = std::conj(v);
        }
        break;
      }
    }
  }
  return h;
}

HermitianMatrix sample(const EnsembleSpec& spec, RandomStream& stream) {
  return EnsembleSampler(spec)(stream);
}

HermitianMatrix sample_gue(std::size_t dim, RandomStream& stream) {
  return sample(EnsembleSpec::gue(dim), stream);
}

HermitianMatrix sample_flip2d(std::size_t half_dim, RandomStream& stream) {
  return sample(EnsembleSpec::flip2d(half_dim), stream);
}

HermitianMatrix sample_hier_toy(std::size_t levels, RandomStream& stream) {
  return sample(EnsembleSpec::hier_toy(levels), stream);
}

HermitianMatrix sample_hier_iso(std::size_t levels, RandomStream& stream) {
  return sample(EnsembleSpec::hier_iso(levels), stream);
}

HermitianMatrix sample_folded3d(std::size_t dim, std::size_t folds, RandomStream& stream) {
  return sample(EnsembleSpec::folded3d(dim, folds), stream);
}

}  // namespace rmt
