#include "rmt/matrix_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "rmt/error.hpp"

namespace rmt {

namespace {

constexpr std::array<char, 4> kMagic{'R', 'M', 'T', 'M'};

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<unsigned char, sizeof(T)> bytes{};
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
    throw ContractViolation("truncated matrix dump");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void write_matrix(std::ostream& out, const HermitianMatrix& h) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kMatrixFormatVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(h.dim()));
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(h.spec.kind));
  for (Eigen::Index r = 0; r < h.dim(); ++r) {
    for (Eigen::Index c = 0; c < h.dim(); ++c) {
      put_le<double>(out, h.entries(r, c).real());
      put_le<double>(out, h.entries(r, c).imag());
    }
  }
  if (!out) throw Error("failed to write matrix dump");
}

void write_matrix(const std::filesystem::path& path, const HermitianMatrix& h) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_matrix(out, h);
}

MatrixDump read_matrix(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw ContractViolation("not an RMTM matrix dump");
  }
  MatrixDump dump;
  dump.version = get_le<std::uint32_t>(in);
  if (dump.version != kMatrixFormatVersion) {
    throw ContractViolation("unsupported matrix dump version " + std::to_string(dump.version));
  }
  const auto dim = static_cast<Eigen::Index>(get_le<std::uint32_t>(in));
  const auto kind = get_le<std::uint8_t>(in);
  if (kind > static_cast<std::uint8_t>(EnsembleKind::Folded3D)) {
    throw ContractViolation("unknown ensemble kind in matrix dump");
  }
  dump.kind = static_cast<EnsembleKind>(kind);
  dump.entries.resize(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      const double re = get_le<double>(in);
      const double im = get_le<double>(in);
      dump.entries(r, c) = {re, im};
    }
  }
  return dump;
}

MatrixDump read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_matrix(in);
}

}  // namespace rmt
