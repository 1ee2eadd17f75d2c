#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dimlab/error.hpp"
#include "dimlab/parallel.hpp"
#include "dimlab/scenarios.hpp"

using namespace dimlab;
using nlohmann::json;

namespace {

ErrorCode code_of(const json& cfg) {
  try {
    parse_scenario(cfg);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;  // sentinel: no error
}

std::string message_of(const json& cfg) {
  try {
    parse_scenario(cfg);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

json deterministic(json j) {
  j.erase("timing");
  return j;
}

}  // namespace

TEST_CASE("every scenario has defaults") {
  for (const auto& name : scenario_names()) {
    const auto n = scenario_from_string(name);
    REQUIRE(n);
    CHECK(to_string(*n) == name);
    CHECK(default_params(*n).is_object());
    CHECK_FALSE(default_thresholds(*n).empty());
  }
  CHECK_FALSE(scenario_from_string("nope"));
}

TEST_CASE("config validation names the path") {
  CHECK(code_of({{"scenario", "moran"}}) == ErrorCode::Validation);  // missing seed
  CHECK(message_of({{"scenario", "moran"}}).find("seed") != std::string::npos);
  CHECK(message_of({{"scenario", "probe"}, {"seed", 1}, {"params", {{"trails", 3}}}})
            .find("params.trails") != std::string::npos);
  CHECK(message_of({{"scenario", "probe"}, {"seed", 1}, {"params", {{"trials", "many"}}}})
            .find("params.trials") != std::string::npos);
  CHECK(message_of({{"scenario", "probe"}, {"seed", 1}, {"params", {{"trials", 0}}}})
            .find("params.trials") != std::string::npos);
  CHECK(message_of({{"scenario", "moran"}, {"seed", 1}, {"extra", 1}}).find("extra") !=
        std::string::npos);
  CHECK(code_of({{"scenario", "unknown"}, {"seed", 1}}) == ErrorCode::Validation);
}

TEST_CASE("thresholds may tighten but not silently loosen") {
  const json tight = {{"scenario", "moran"}, {"seed", 1}, {"thresholds", {{"max_abs_error", 1e-12}}}};
  CHECK(parse_scenario(tight).thresholds["max_abs_error"] == 1e-12);
  const json loose = {{"scenario", "moran"}, {"seed", 1}, {"thresholds", {{"max_abs_error", 0.5}}}};
  CHECK(message_of(loose).find("thresholds.max_abs_error") != std::string::npos);
  json forced = loose;
  forced["override"] = true;
  CHECK(parse_scenario(forced).thresholds["max_abs_error"] == 0.5);
}

TEST_CASE("seed override and name hint") {
  const auto s = parse_scenario({{"params", json::object()}}, "moran", 99);
  CHECK(s.name == ScenarioName::Moran);
  CHECK(s.seed == 99);
}

TEST_CASE("moran report matches the golden file") {
  const auto rep = run(parse_scenario({{"scenario", "moran"}, {"seed", 1}}));
  CHECK(rep.passed());
  std::ifstream in(std::string(DIMLAB_GOLDEN_DIR) + "/moran.json");
  REQUIRE(in);
  const json golden = json::parse(in);
  CHECK(deterministic(render_json(rep)) == golden);
}

TEST_CASE("reports do not depend on the thread count") {
  const json cfg = {{"scenario", "probe"}, {"seed", 4}, {"params", {{"trials", 12}, {"depth", 6}}}};
  json one, many;
  {
    ScopedThreadCount t(1);
    one = deterministic(render_json(run(parse_scenario(cfg))));
  }
  {
    ScopedThreadCount t(4);
    many = deterministic(render_json(run(parse_scenario(cfg))));
  }
  CHECK(one.dump() == many.dump());
}

TEST_CASE("shipped scenario configs parse") {
  for (const auto& name : scenario_names()) {
    std::ifstream in(std::string(DIMLAB_DATA_DIR) + "/scenarios/" + name + ".json");
    REQUIRE(in);
    const auto s = parse_scenario(json::parse(in));
    CHECK(to_string(s.name) == name);
  }
}
