#include "rmt/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace rmt::harness {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

template <typename Emit>
void write_file(const std::filesystem::path& path, Emit emit) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  emit(out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

// JSON cannot carry inf/nan; they are written as null.
nlohmann::ordered_json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

bool ExperimentReport::check(std::string name, bool passed, std::string detail) {
  criteria.push_back({std::move(name), passed, std::move(detail)});
  return passed;
}

bool ExperimentReport::all_passed() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.passed; });
}

double ExperimentReport::metric_value(const std::string& name) const {
  for (const auto& [k, v] : metrics) {
    if (k == name) return v;
  }
  throw std::out_of_range("no metric named " + name);
}

nlohmann::ordered_json to_json(const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["schema"] = kReportSchema;
  j["version"] = kVersion;
  j["experiment"] = report.experiment;
  j["status"] = report.status == ReportStatus::Ok ? "ok" : "numerical-failure";
  if (!report.error.empty()) j["error"] = report.error;
  j["config"] = report.config;
  auto metrics = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.metrics) metrics[k] = number(v);
  j["metrics"] = metrics;
  auto criteria = nlohmann::ordered_json::array();
  for (const auto& c : report.criteria) {
    criteria.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  j["criteria"] = criteria;
  j["passed"] = report.all_passed() && report.status == ReportStatus::Ok;
  j["details"] = report.details;
  j["series_rows"] = report.series.size();
  j["wall_time"] = report.wall_time;
  return j;
}

void emit_csv(const ExperimentReport& report, std::ostream& out) {
  out << "bin_center,value,std_err,reference_value\n";
  for (const auto& r : report.series) {
    out << fmt(r.bin_center) << ',' << fmt(r.value) << ',' << fmt(r.std_err) << ','
        << fmt(r.reference_value) << '\n';
  }
}

void emit_csv(const ExperimentReport& report, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { emit_csv(report, out); });
}

void emit_svg(const ExperimentReport& report, std::ostream& out) {
  constexpr double width = 640.0;
  constexpr double height = 400.0;
  constexpr double margin = 48.0;
  const auto& rows = report.series;

  double x_lo = 0.0;
  double x_hi = 1.0;
  double y_hi = 1.0;
  if (!rows.empty()) {
    x_lo = std::numeric_limits<double>::infinity();
    x_hi = -x_lo;
    y_hi = 0.0;
    for (const auto& r : rows) {
      x_lo = std::min(x_lo, r.bin_center);
      x_hi = std::max(x_hi, r.bin_center);
      if (std::isfinite(r.value + r.std_err)) y_hi = std::max(y_hi, r.value + r.std_err);
      if (std::isfinite(r.reference_value)) y_hi = std::max(y_hi, r.reference_value);
    }
    if (!(x_hi > x_lo)) {
      x_lo -= 0.5;
      x_hi += 0.5;
    }
    if (!(y_hi > 0.0)) y_hi = 1.0;
    y_hi *= 1.1;
  }
  const double step = rows.size() > 1 ? (x_hi - x_lo) / static_cast<double>(rows.size() - 1) : 1.0;
  const double pad = 0.5 * step;
  auto sx = [&](double x) { return margin + (x - x_lo + pad) / (x_hi - x_lo + 2 * pad) * (width - 2 * margin); };
  auto sy = [&](double y) { return height - margin - std::max(0.0, y) / y_hi * (height - 2 * margin); };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<title>" << xml_escape(report.experiment) << "</title>\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
      << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
      << height - margin << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << margin << "\" y=\"" << height - margin / 3 << "\" font-size=\"12\">" << fmt(x_lo)
      << "</text>\n";
  out << "<text x=\"" << width - margin << "\" y=\"" << height - margin / 3
      << "\" font-size=\"12\" text-anchor=\"end\">" << fmt(x_hi) << "</text>\n";
  out << "<text x=\"4\" y=\"" << margin << "\" font-size=\"12\">" << fmt(y_hi) << "</text>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">"
      << xml_escape(report.experiment + ": " + report.series_label) << "</text>\n";

  const double bar = std::max(1.0, (sx(x_lo + step) - sx(x_lo)) * 0.9);
  out << "<g fill=\"steelblue\" fill-opacity=\"0.6\">\n";
  for (const auto& r : rows) {
    if (!std::isfinite(r.value)) continue;
    const double top = sy(r.value);
    out << "<rect x=\"" << fmt(sx(r.bin_center) - bar / 2) << "\" y=\"" << fmt(top) << "\" width=\""
        << fmt(bar) << "\" height=\"" << fmt(height - margin - top) << "\"/>\n";
  }
  out << "</g>\n<g stroke=\"black\" stroke-width=\"1\">\n";
  for (const auto& r : rows) {
    if (!(r.std_err > 0.0) || !std::isfinite(r.value + r.std_err)) continue;
    out << "<line x1=\"" << fmt(sx(r.bin_center)) << "\" y1=\"" << fmt(sy(r.value - r.std_err))
        << "\" x2=\"" << fmt(sx(r.bin_center)) << "\" y2=\"" << fmt(sy(r.value + r.std_err)) << "\"/>\n";
  }
  out << "</g>\n";
  if (!rows.empty()) {
    out << "<polyline fill=\"none\" stroke=\"crimson\" stroke-width=\"2\" points=\"";
    for (const auto& r : rows) {
      if (std::isfinite(r.reference_value)) out << fmt(sx(r.bin_center)) << ',' << fmt(sy(r.reference_value)) << ' ';
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

void emit_svg(const ExperimentReport& report, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { emit_svg(report, out); });
}

void emit_json(const ExperimentReport& report, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { out << to_json(report).dump(2) << '\n'; });
}

}  // namespace rmt::harness
