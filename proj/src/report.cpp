#include "dimlab/report.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dimlab/error.hpp"

#ifndef DIMLAB_VERSION
#define DIMLAB_VERSION "0.0.0"
#endif

namespace dimlab {
namespace {

bool compare(double value, const std::string& op, double threshold) {
  if (op == ">=") return value >= threshold;
  if (op == ">") return value > threshold;
  if (op == "<=") return value <= threshold;
  if (op == "<") return value < threshold;
  throw Error(ErrorCode::InvalidArgument, "unknown comparator '" + op + "'");
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_number(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return csv_field(v);
        } else {
          return std::to_string(v);
        }
      },
      c);
}

nlohmann::json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return format_number(v);
        }
        return v;
      },
      c);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

bool Report::passed() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

void Report::add_check(std::string name, double value, const std::string& comparator,
                       double threshold) {
  checks.push_back(Check{std::move(name), value, threshold, comparator,
                         compare(value, comparator, threshold)});
}

ReportFormat report_format_from_string(const std::string& s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  throw Error(ErrorCode::Validation, "format: expected csv or json, got '" + s + "'");
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string render_csv(const Report& report) {
  std::ostringstream os;
  for (std::size_t i = 0; i < report.columns.size(); ++i) {
    os << (i ? "," : "") << csv_field(report.columns[i]);
  }
  os << '\n';
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << render_cell(row[i]);
    os << '\n';
  }
  return os.str();
}

nlohmann::json render_json(const Report& report) {
  nlohmann::json j;
  j["scenario"] = report.scenario;
  j["seed"] = report.seed;
  j["config"] = report.config;
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(config_hash(report.config)));
  j["config_hash"] = hash;
  j["version"] = library_version();
  j["columns"] = report.columns;
  auto& rows = j["rows"] = nlohmann::json::array();
  for (const auto& row : report.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& c : row) r.push_back(cell_json(c));
    rows.push_back(std::move(r));
  }
  auto& checks = j["checks"] = nlohmann::json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"value", std::isfinite(c.value) ? nlohmann::json(c.value)
                                                       : nlohmann::json(format_number(c.value))},
                      {"threshold", c.threshold},
                      {"comparator", c.comparator},
                      {"pass", c.pass}});
  }
  j["summary"] = report.summary;
  j["passed"] = report.passed();
  j["timing"] = {{"wall_clock_seconds", report.wall_clock_seconds},
                 {"timestamp", report.timestamp.empty() ? utc_timestamp() : report.timestamp}};
  return j;
}

std::string render(const Report& report, ReportFormat format) {
  if (format == ReportFormat::Csv) return render_csv(report);
  return render_json(report).dump(2) + "\n";
}

void emit_report(const Report& report, ReportFormat format, const std::string& path) {
  const std::string text = render(report, format);
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write report to '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

std::uint64_t config_hash(const nlohmann::json& config) {
  const std::string s = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

const char* library_version() { return DIMLAB_VERSION; }

}  // namespace dimlab
