#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace dimlab {

using Cell = std::variant<std::int64_t, double, std::string, bool>;

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string comparator;  // ">=", ">", "<=", "<"
  bool pass = false;
};

struct Report {
  std::string scenario;
  std::uint64_t seed = 0;
  nlohmann::json config;  // echo of the validated scenario config
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<Check> checks;
  nlohmann::json summary = nlohmann::json::object();
  double wall_clock_seconds = 0.0;
  std::string timestamp;

  bool passed() const;
  void add_check(std::string name, double value, const std::string& comparator,
                 double threshold);
};

enum class ReportFormat { Csv, Json };

ReportFormat report_format_from_string(const std::string& s);

// Shortest round-trip decimal form, shared by the csv and json writers.
std::string format_number(double v);

std::string render_csv(const Report& report);
// Timing fields live under "timing"; everything else is deterministic.
nlohmann::json render_json(const Report& report);
std::string render(const Report& report, ReportFormat format);

void emit_report(const Report& report, ReportFormat format, const std::string& path);

// FNV-1a 64 of the canonical (sorted-key) dump.
std::uint64_t config_hash(const nlohmann::json& config);

const char* library_version();

}  // namespace dimlab
