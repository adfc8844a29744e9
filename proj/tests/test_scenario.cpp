#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "impulse/scenario.hpp"

#include <fstream>
#include <sstream>

using namespace impulse;

namespace {

const std::string kSource = IMPULSE_SOURCE_DIR;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string replaced(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

std::string parse_error(const std::string& text) {
  try {
    parse_scenario_text(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    return e.what();
  }
  FAIL("expected a parse error");
  return {};
}

bool has(const std::string& haystack, const std::string& needle) { return haystack.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("bundled mDOT scenario") {
  const auto s = parse_scenario(kSource + "/scenarios/mdot.json");
  CHECK(s.name == "mdot");
  CHECK(s.orbit.a_m == 25e6);
  CHECK(s.orbit.e == 0.7);
  CHECK(s.orbit.i_deg == 40.0);
  CHECK(s.orbit.raan_deg == 358.0);
  const auto grid = s.grid();
  CHECK(grid.size() == 3934);
  CHECK(grid.back() == 117990.0);
  Vector6 w;
  w << 50, 5000, 100, 100, 0, 400;
  CHECK(s.target() == w);
  const auto sched = s.schedule();
  REQUIRE(sched.size() == 2);
  CHECK(sched[0].cost.is_polyhedral());
  CHECK(sched[0].times.size() + sched[1].times.size() == 3934);
  // perigee passes sit at odd multiples of half the anomalistic period
  CHECK(sched[0].times.size() == 720);
}

TEST_CASE("serialization round trip") {
  for (const std::string file : {"/scenarios/mdot.json", "/tests/data/mdot_phase_variant.json"}) {
    const auto s = parse_scenario(kSource + file);
    CHECK(parse_scenario_text(serialize_scenario(s)) == s);
  }
  auto s = parse_scenario(kSource + "/scenarios/mdot.json");
  s.w_m.reset();
  Vector6 a, b;
  a << 0, 100, 10, 0, 0, 5;
  b << 0, -4900, 110, 100, 0, 405;
  s.roe_initial_m = a;
  s.roe_final_m = b;
  s.planner.eps_cost = 0.02;
  s.planner.q_weight = MatrixXd::Identity(6, 6);
  s.modes[0].windows = {WindowSpec::Kind::Intervals, 0.0, 0.0, 0.0, {{0.0, 3600.0}, {50000.0, 60000.0}}, 0};
  const auto back = parse_scenario_text(serialize_scenario(s));
  CHECK(back == s);
  CHECK(back.target() == s.target());
  s.times = {0.0, 30.0, 600.0, 117990.0};
  s.step = 0.0;
  CHECK(parse_scenario_text(serialize_scenario(s)) == s);
}

TEST_CASE("scenario errors carry field paths") {
  const std::string base = slurp(kSource + "/scenarios/mdot.json");
  CHECK(has(parse_error(replaced(base, "\"w_m\"", "\"roe_initial_m\": [0,0,0,0,0,0], \"roe_final_m\": [0,0,0,0,0,0], \"w_m\"")),
            "ambiguous target"));
  CHECK(has(parse_error(replaced(base, "\"e\": 0.7,", "")), "/orbit/e"));
  CHECK(has(parse_error(replaced(base, "\"e\": 0.7", "\"e\": \"high\"")), "/orbit/e"));
  CHECK(has(parse_error(replaced(base, "\"type\": \"two_norm\"", "\"type\": \"three_norm\"")), "/modes/1/cost/type"));
  CHECK(has(parse_error(replaced(base, "\"step_sec\": 30.0", "\"step_sec\": 31.0")), "/time/step_sec"));
  CHECK(has(parse_error(replaced(base, "\"kind\": \"perigee\"", "\"kind\": \"apogee\"")), "/modes/0/windows/kind"));
  CHECK(has(parse_error(replaced(base, "\"schema_version\": 1", "\"schema_version\": 2")), "/schema_version"));
  CHECK(has(parse_error(replaced(base, "[50.0, 5000.0", "[5000.0")), "/target/w_m"));
  CHECK(has(parse_error("{"), "invalid JSON"));
  CHECK_THROWS_AS(parse_scenario(kSource + "/no/such/file.json"), Error);
}

TEST_CASE("uncovered grid time is named") {
  const std::string base = slurp(kSource + "/scenarios/mdot.json");
  std::string text = replaced(base, "{\"kind\": \"perigee\", \"half_width_sec\": 3600.0}",
                              "{\"kind\": \"intervals\", \"intervals_sec\": [[0, 100]]}");
  text = replaced(text, "{\"kind\": \"complement_of\", \"mode\": 1}", "{\"kind\": \"intervals\", \"intervals_sec\": [[200, 117990]]}");
  const auto msg = parse_error(text);
  CHECK(has(msg, "/modes"));
  CHECK(has(msg, "120 s is not covered"));
}
