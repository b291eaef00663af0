#include <doctest.h>

#include <sstream>

#include "rmt/error.hpp"
#include "rmt/matrix_io.hpp"

using namespace rmt;

TEST_CASE("matrix dump round-trips bit for bit") {
  RandomStream s(4, 2);
  const auto h = sample_flip2d(3, s);
  std::stringstream buf;
  write_matrix(buf, h);
  const std::string bytes = buf.str();
  CHECK(bytes.size() == 4 + 4 + 4 + 1 + 36 * 16);
  CHECK(bytes.substr(0, 4) == "RMTM");
  CHECK(static_cast<unsigned char>(bytes[8]) == 6);  // dim, little-endian
  CHECK(static_cast<unsigned char>(bytes[12]) == static_cast<unsigned>(EnsembleKind::Flip2D));

  const auto dump = read_matrix(buf);
  CHECK(dump.version == kMatrixFormatVersion);
  CHECK(dump.kind == EnsembleKind::Flip2D);
  CHECK(dump.entries == h.entries);
}

TEST_CASE("matrix dump rejects bad input") {
  RandomStream s(4, 2);
  const auto h = sample_gue(2, s);
  std::stringstream buf;
  write_matrix(buf, h);
  const std::string good = buf.str();

  std::string bad_magic = good;
  bad_magic[0] = 'X';
  std::istringstream in1(bad_magic);
  CHECK_THROWS_AS(read_matrix(in1), ContractViolation);

  std::string bad_version = good;
  bad_version[4] = 9;
  std::istringstream in2(bad_version);
  CHECK_THROWS_AS(read_matrix(in2), ContractViolation);

  std::istringstream in3(good.substr(0, good.size() - 3));
  CHECK_THROWS_AS(read_matrix(in3), ContractViolation);
}
