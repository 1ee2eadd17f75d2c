#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "dimlab/error.hpp"
#include "dimlab/report.hpp"

using namespace dimlab;

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Report sample_report() {
  Report r;
  r.scenario = "demo";
  r.seed = 3;
  r.config = {{"scenario", "demo"}, {"seed", 3}};
  r.columns = {"name", "value", "flag"};
  r.rows = {{std::string("a,b"), 0.1, true}, {std::string("plain"), std::int64_t{7}, false}};
  r.add_check("err", 0.01, "<=", 0.1);
  r.add_check("slope", 0.2, ">", 0.5);
  r.wall_clock_seconds = 1.5;
  r.timestamp = "2026-01-01T00:00:00Z";
  return r;
}

}  // namespace

TEST_CASE("checks and pass flag") {
  Report r = sample_report();
  CHECK(r.checks[0].pass);
  CHECK_FALSE(r.checks[1].pass);
  CHECK_FALSE(r.passed());
  CHECK_THROWS_AS(r.add_check("x", 1, "==", 1), Error);
  Report nan;
  nan.add_check("x", std::numeric_limits<double>::quiet_NaN(), ">=", 0.0);
  CHECK_FALSE(nan.checks[0].pass);
}

TEST_CASE("numbers round trip") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.0, -2.5}) {
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("csv") {
  const std::string csv = render_csv(sample_report());
  CHECK(csv == "name,value,flag\n\"a,b\",0.1,true\nplain,7,false\n");
}

TEST_CASE("json layout keeps timing apart") {
  const auto j = render_json(sample_report());
  CHECK(j["scenario"] == "demo");
  CHECK(j["passed"] == false);
  CHECK(j["checks"].size() == 2);
  CHECK(j["timing"]["wall_clock_seconds"] == 1.5);
  CHECK(j["rows"][1][1] == 7);
  CHECK(j["config_hash"].get<std::string>().size() == 16);
}

TEST_CASE("config hash is fnv1a of the sorted dump") {
  CHECK(fnv1a("abc") == 0xe71fa2190541574bULL);
  const nlohmann::json c = {{"seed", 1}, {"scenario", "x"}};
  CHECK(config_hash(c) == fnv1a(c.dump()));
  CHECK(report_format_from_string("csv") == ReportFormat::Csv);
  CHECK_THROWS_AS(report_format_from_string("xml"), Error);
}

TEST_CASE("empty table gives a header-only csv") {
  Report r;
  r.columns = {"x", "y"};
  CHECK(render_csv(r) == "x,y\n");
  CHECK(render_json(r)["rows"].empty());
}

TEST_CASE("csv and json carry the same numbers") {
  Report r;
  r.columns = {"v"};
  for (double v : {0.1, 1.0 / 3.0, 2.5e-17, 6.02e23}) r.rows.push_back({v});
  const std::string csv = render_csv(r);
  const auto j = render_json(r);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  for (std::size_t i = 0; std::getline(in, line); ++i) {
    CHECK(std::stod(line) == j["rows"][i][0].get<double>());
  }
}
