#include <doctest.h>

#include "core/config.hpp"
#include "core/errors.hpp"

using namespace monodg;

TEST_CASE("flat key = value parsing with comments and blank lines") {
  const auto map = parse_config_text(
      "# cable run\n"
      "mesh.dim = 1\n"
      "\n"
      "mesh.extent_x = 20.0   # mm\n"
      "basis.order=2\n");
  CHECK(map.values.at("mesh.dim") == "1");
  CHECK(map.values.at("mesh.extent_x") == "20.0");
  CHECK(map.values.at("basis.order") == "2");
  CHECK(map.lines.at("basis.order") == 5);
}

TEST_CASE("unknown keys are rejected with the offending name and line") {
  try {
    parse_config_text("mesh.dim = 1\ntua_refine = 0.5\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("tua_refine") != std::string::npos);
    CHECK(e.line == 2);
  }
}

TEST_CASE("malformed values carry the key path") {
  try {
    RunConfig::from_map(parse_config_text("mesh.dim = banana\n"));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("mesh.dim") != std::string::npos);
  }
  CHECK_THROWS_AS(RunConfig::from_map(parse_config_text("mesh.extent_x = -2\n")),
                  ConfigError);
  CHECK_THROWS_AS(RunConfig::from_map(parse_config_text("basis.order = 9\n")),
                  ConfigError);
  CHECK_THROWS_AS(
      RunConfig::from_map(parse_config_text("solver = banana\n")), ConfigError);
  CHECK_THROWS_AS(
      RunConfig::from_map(parse_config_text("model.name = banana\n")), ConfigError);
  CHECK_THROWS_AS(
      RunConfig::from_map(parse_config_text("model.bogus_param = 1\n")), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_map(parse_config_text(
                      "amr.tau_refine = 0.5\namr.tau_coarsen = 0.6\n")),
                  ConfigError);
}

TEST_CASE("defaults: gamma by order, tau_coarsen as a third of tau_refine") {
  RunConfig c = RunConfig::from_map(parse_config_text(""));
  CHECK(c.order == 1);
  CHECK(c.effective_gamma() == 4.0);
  CHECK(c.effective_tau_coarsen() == doctest::Approx(0.25));
  c = RunConfig::from_map(parse_config_text("basis.order = 2\n"));
  CHECK(c.effective_gamma() == 8.0);
  c = RunConfig::from_map(parse_config_text("sipg.gamma = 11.5\n"));
  CHECK(c.effective_gamma() == 11.5);
}

TEST_CASE("model parameter overrides flow through") {
  const RunConfig c = RunConfig::from_map(parse_config_text(
      "model.name = mitchell-schaeffer\nmodel.tau_close = 60\n"));
  CHECK(c.model_params.at("tau_close") == 60.0);
}

TEST_CASE("canonical hash ignores declaration order, tracks values") {
  const auto a = parse_config_text("mesh.dim = 2\nbasis.order = 1\nmesh.counts_y = 7\n");
  const auto b = parse_config_text("mesh.counts_y = 7\nmesh.dim = 2\nbasis.order = 1\n");
  const auto c = parse_config_text("mesh.dim = 2\nbasis.order = 1\nmesh.counts_y = 8\n");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
}

TEST_CASE("presets validate") {
  for (const char* name : {"cable", "strip", "spiral"}) {
    const ConfigMap map = preset_config(name);
    CHECK_NOTHROW(RunConfig::from_map(map));
  }
  CHECK_THROWS_AS(preset_config("banana"), ConfigError);
}
