#pragma once

#include <filesystem>
#include <iosfwd>

#include "rmt/ensembles.hpp"

namespace rmt {

/// Binary dump of a sampled matrix.
///
/// Layout (little-endian): "RMTM", u32 version, u32 dim, u8 kind, then
/// dim*dim row-major (re, im) pairs of f64.
inline constexpr std::uint32_t kMatrixFormatVersion = 1;

void write_matrix(std::ostream& out, const HermitianMatrix& h);
void write_matrix(const std::filesystem::path& path, const HermitianMatrix& h);

struct MatrixDump {
  std::uint32_t version = 0;
  EnsembleKind kind = EnsembleKind::GUE;
  Eigen::MatrixXcd entries;
};

/// Throws ContractViolation on a bad magic, version or truncated payload.
MatrixDump read_matrix(std::istream& in);
MatrixDump read_matrix(const std::filesystem::path& path);

}  // namespace rmt
