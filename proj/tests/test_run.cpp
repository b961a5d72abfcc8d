#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "spectramax/error.hpp"
#include "spectramax/run.hpp"
#include "support.hpp"

using namespace spectramax;

TEST_CASE("schedule parsing") {
  CHECK(parse_schedule("0.08:0.01:half") == std::vector<double>{0.08, 0.04, 0.02, 0.01});
  const auto r = parse_schedule("1:0.1:0.1");
  REQUIRE(r.size() == 2);
  CHECK(r[1] == doctest::Approx(0.1));
  CHECK(parse_schedule("0.5,0.25") == std::vector<double>{0.5, 0.25});
  CHECK_THROWS_AS(parse_schedule("0.01:0.08:half"), ConfigError);
  CHECK_THROWS_AS(parse_schedule("0.08:0.01:2"), ConfigError);
  CHECK_THROWS_AS(parse_schedule("0.08:-1:half"), ConfigError);
  CHECK_THROWS_AS(parse_schedule("a,b"), ConfigError);
  CHECK_THROWS_AS(parse_schedule("1:2"), ConfigError);
}

TEST_CASE("genus ranges and lists") {
  CHECK(parse_genus_range("0:6") == std::pair{0, 6});
  CHECK(parse_genus_range("3") == std::pair{3, 3});
  CHECK_THROWS_AS(parse_genus_range("4:2"), ConfigError);
  CHECK_THROWS_AS(parse_genus_range("-1:2"), ConfigError);
  CHECK(parse_list("10,20.5") == std::vector<double>{10.0, 20.5});
  CHECK_THROWS_AS(parse_list("10,x"), ConfigError);
}

TEST_CASE("mesh specs") {
  CHECK(resolve_mesh("icosphere:1").num_vertices() == 42);
  CHECK(resolve_mesh("flattorus:1,0,0,1:8").num_vertices() == 64);
  CHECK(resolve_mesh("revtorus:2,0.7:16,8").num_vertices() == 128);
  CHECK(genus(resolve_mesh("doubletorus:1")) == 2);
  CHECK(resolve_mesh("fixture:icosahedron").num_vertices() == 12);
  CHECK(resolve_mesh("fixture:torus16.off").num_vertices() == 512);
  CHECK(resolve_mesh("sphere162.off").num_vertices() == 162);
  CHECK_THROWS_AS(resolve_mesh("fixture:nope"), ConfigError);
  CHECK_THROWS_AS(resolve_mesh("flattorus:1,0,0:8"), ConfigError);
  CHECK_THROWS_AS(resolve_mesh("icosphere:x"), ConfigError);
  CHECK_THROWS_AS(resolve_mesh(""), ConfigError);
  CHECK_THROWS_AS(resolve_mesh("fixture:nonmanifold.obj"), TopologyError);
}

TEST_CASE("config validation") {
  RunConfig c;
  c.command = "frobnicate";
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.command = "optimize";
  CHECK_THROWS_AS(validate(c), ConfigError);  // no mesh
  c.mesh = "icosphere:2";
  CHECK_NOTHROW(validate(c));
  c.schedule = {0.04, 0.08};
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.schedule = {0.08, 0.04};
  c.tol = 0.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.tol.reset();
  c.threads = -1;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.threads = 1;
  c.trials = 0;
  CHECK_THROWS_AS(validate(c), ConfigError);

  RunConfig b;
  b.command = "certify";
  CHECK_THROWS_AS(validate(b), ConfigError);
  b.result = "prior.json";
  CHECK_NOTHROW(validate(b));
  b.command = "bounds";
  b.genus = "5:1";
  CHECK_THROWS_AS(validate(b), ConfigError);
}

TEST_CASE("config JSON round trip and unknown keys") {
  RunConfig c;
  c.command = "mtflow";
  c.mesh = "flattorus:1,0,0,1:16";
  c.schedule = {0.1, 0.05};
  c.tol = 1e-7;
  c.seed = 99;
  c.trials = 3;
  c.radius = 0.02;
  c.shift = {0.1, 0.0, 0.0};
  const RunConfig d = config_from_json(to_json(c));
  CHECK(to_json(d) == to_json(c));

  CHECK_THROWS_AS(config_from_json(Json{{"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json{{"seed", "x"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json::array()), ConfigError);
  CHECK(config_from_json(Json{{"schedule", "0.08:0.02:half"}}).schedule == std::vector<double>{0.08, 0.04, 0.02});

  const auto path = std::filesystem::temp_directory_path() / "spectramax_test_config.json";
  std::ofstream(path) << "{\"command\": \"bounds\", \"genus\": 2}";
  const RunConfig e = load_config(path.string());
  CHECK(e.command == "bounds");
  CHECK(e.genus == "2");
  std::ofstream(path) << "{not json";
  CHECK_THROWS_AS(load_config(path.string()), ConfigError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("result files: round trip and schema checks") {
  RunConfig c;
  c.command = "bounds";
  c.genus = "0:3";
  const RunOutcome o = run(c);
  CHECK(o.exit_code == 0);
  REQUIRE(o.result["rows"].size() == 4);
  CHECK(o.result["rows"][0]["known_exact"]["symbolic"] == "8*pi");
  CHECK(o.result["rows"][3]["known_exact"].is_null());
  CHECK(!o.result["config"].contains("out"));

  const Json back = parse_result(dump_result(o.result));
  CHECK(back == o.result);
  CHECK(!strip_volatile(back).contains("wallclock"));
  CHECK(!strip_volatile(back).contains("created"));

  Json v2 = o.result;
  v2["schema_version"] = 2;
  CHECK_THROWS_AS(validate_result(v2), SchemaError);
  Json missing = o.result;
  missing.erase("rows");
  CHECK_THROWS_AS(validate_result(missing), SchemaError);
  Json wrong = o.result;
  wrong["exit_code"] = "zero";
  CHECK_THROWS_AS(validate_result(wrong), SchemaError);
  CHECK_THROWS_AS(parse_result("{"), SchemaError);
  CHECK_THROWS_AS(read_result("/nonexistent/result.json"), SchemaError);
}

TEST_CASE("small end-to-end runs") {
  RunConfig d;
  d.command = "degenerate";
  const RunOutcome od = run(d);
  CHECK(od.exit_code == 0);
  CHECK(od.result["monotone"] == true);
  CHECK(od.result["rows"].size() == 4);

  RunConfig b;
  b.command = "balance";
  b.mesh = "icosphere:2";
  b.shift = {0.4, 0.1, -0.2};
  const RunOutcome ob = run(b);
  CHECK(ob.result["initial_residual"].get<double>() > 0.1);
  CHECK(ob.result["residual"].get<double>() <= 1e-8);

  RunConfig m;
  m.command = "mtflow";
  m.mesh = "flattorus:1,0,0,1:16";
  const RunOutcome om = run(m);
  CHECK(om.exit_code == 0);
  CHECK(om.result["pass"] == true);

  RunConfig e;
  e.command = "optimize";
  e.mesh = "fixture:icosahedron";
  CHECK_THROWS_AS(run(e), EpsilonTooSmall);
}
