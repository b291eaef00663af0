#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace rmt::harness {

inline constexpr int kReportSchema = 1;
inline constexpr const char* kVersion = "0.1.0";

/// One row of binned output.
struct SeriesRow {
  double bin_center = 0.0;
  double value = 0.0;
  double std_err = 0.0;
  double reference_value = 0.0;
};

struct CriterionResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

enum class ReportStatus { Ok, NumericalFailure };

struct ExperimentReport {
  std::string experiment;
  nlohmann::ordered_json config;  // echo of the effective configuration
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<CriterionResult> criteria;
  std::vector<SeriesRow> series;
  std::string series_label = "value";
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
  ReportStatus status = ReportStatus::Ok;
  std::string error;
  double wall_time = 0.0;

  void metric(std::string name, double value) { metrics.emplace_back(std::move(name), value); }
  bool check(std::string name, bool passed, std::string detail = {});
  [[nodiscard]] bool all_passed() const;
  [[nodiscard]] double metric_value(const std::string& name) const;  // throws std::out_of_range
};

nlohmann::ordered_json to_json(const ExperimentReport& report);

/// CSV with exactly the columns bin_center,value,std_err,reference_value.
void emit_csv(const ExperimentReport& report, std::ostream& out);
void emit_csv(const ExperimentReport& report, const std::filesystem::path& path);

/// Static SVG: series values as bars (with error whiskers) and the
/// reference values as a line.
void emit_svg(const ExperimentReport& report, std::ostream& out);
void emit_svg(const ExperimentReport& report, const std::filesystem::path& path);

void emit_json(const ExperimentReport& report, const std::filesystem::path& path);

}  // namespace rmt::harness
