#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rmt/executor.hpp"
#include "rmt/harness/report.hpp"

namespace rmt::harness {

inline constexpr std::uint64_t kAcceptanceSeed = 20261015;
inline constexpr int kAcceptanceCriteria = 11;

struct AcceptanceResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  double time_limit = 0.0;  // 0 means no limit
  std::string detail;
  ExperimentReport report;  // last report the criterion produced
};

struct AcceptanceOptions {
  std::uint64_t seed = kAcceptanceSeed;
  ParallelFor parallel = serial_for;
  std::ostream* out = nullptr;  // one line per criterion when set
};

/// Runs one pinned criterion (1..11).
AcceptanceResult run_criterion(int id, const AcceptanceOptions& options);

/// Runs all criteria in order.
std::vector<AcceptanceResult> run_acceptance(const AcceptanceOptions& options);

std::string format_line(const AcceptanceResult& result);

}  // namespace rmt::harness
