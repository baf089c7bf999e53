#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include <spikeplan/core.hpp>
#include <spikeplan/io.hpp>

#include "fixtures.hpp"

using namespace spikeplan;

TEST_CASE("validate_config accepts the reference parameter sets", "[core]") {
  SimConfig config;
  config.N = 21;
  config.rho = 3;
  config.dt_max_b = 58.0;
  config.lambda_target = 0.8;
  config.lambda_b = 0.9;
  REQUIRE(validate_config(config) == config);
  REQUIRE(validate_config(fixtures::ambiguity_02b_config()) == fixtures::ambiguity_02b_config());
}

TEST_CASE("validate_config names the first violated field", "[core]") {
  SimConfig config;

  SECTION("rate at the open lower bound") {
    config.lambda_b = 0.0;
    REQUIRE_THROWS_MATCHES(validate_config(config), ConfigError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("lambda_b") &&
                               Catch::Matchers::ContainsSubstring("rate out of (0,1]")));
  }
  SECTION("inverted STDTA window") {
    config.dt_min_b = 60.0;
    config.dt_max_b = 55.0;
    REQUIRE_THROWS_MATCHES(validate_config(config), ConfigError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("empty STDTA window")));
  }
  SECTION("rate above one") {
    config.lambda_target = 1.5;
    REQUIRE_THROWS_AS(validate_config(config), ConfigError);
  }
  SECTION("subpopulation smaller than a context") {
    config.N = 2;
    config.rho = 3;
    REQUIRE_THROWS_MATCHES(validate_config(config), ConfigError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("N")));
  }
  SECTION("non-positive timing constants") {
    config.kappa = 0.0;
    REQUIRE_THROWS_AS(validate_config(config), ConfigError);
  }
  SECTION("inhibition faster than synaptic transmission") {
    config.d_inh = 1.5;  // 2*d_inh = 3.0 > d_syn
    REQUIRE_THROWS_MATCHES(validate_config(config), ConfigError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("d_syn")));
  }
  SECTION("zero threshold") {
    config.theta_init = 0.0;
    REQUIRE_THROWS_AS(validate_config(config), ConfigError);
  }
}

TEST_CASE("environment ingestion enforces the corpus invariants", "[core]") {
  SECTION("sequences must have length >= 2") {
    REQUIRE_THROWS_AS(build_environment_set({{"env1", {{"A"}}}}), Error);
  }
  SECTION("sequences share one start symbol") {
    REQUIRE_THROWS_AS(build_environment_set({{"env1", {{"A", "B"}, {"B", "C"}}}}), Error);
    REQUIRE_THROWS_AS(
        build_environment_set({{"env1", {{"A", "B"}}}, {"env2", {{"B", "C"}}}}), Error);
  }
  SECTION("no immediate self-transitions") {
    REQUIRE_THROWS_AS(build_environment_set({{"env1", {{"A", "A", "B"}}}}), Error);
  }
  SECTION("environment ids are unique") {
    REQUIRE_THROWS_AS(
        build_environment_set({{"env1", {{"A", "B"}}}, {"env1", {{"A", "C"}}}}), Error);
  }
  SECTION("empty sets rejected") {
    REQUIRE_THROWS_AS(build_environment_set({}), Error);
    REQUIRE_THROWS_AS(build_environment_set({{"env1", {}}}), Error);
  }
}

TEST_CASE("symbol indices are dense and assigned in ingestion order", "[core]") {
  const EnvironmentSet envs = fixtures::exp2_env();
  REQUIRE(envs.symbols.names == std::vector<std::string>{"A", "B", "C", "D", "E", "F"});
  REQUIRE(envs.symbols.index_of("F") == 5);
  REQUIRE(envs.symbols.index_of("Z") == -1);
  REQUIRE_THROWS_AS(envs.symbols.require("Z"), Error);

  // Re-ingesting the same corpus yields identical assignments.
  REQUIRE(fixtures::exp2_env() == envs);
}

TEST_CASE("config serialization round-trips field by field", "[core]") {
  SimConfig config = fixtures::ambiguity_02b_config();
  config.adta_mode = AdtaMode::literal;
  config.seed = 12345;
  config.dt_min_b = -1.0;
  REQUIRE(config_from_json(config_to_json(config)) == config);

  // Through an actual file as well.
  const auto path = std::filesystem::temp_directory_path() / "spikeplan-roundtrip.config.json";
  save_config(config, path);
  REQUIRE(load_config(path) == config);
}

TEST_CASE("environment serialization round-trips", "[core]") {
  const EnvironmentSet envs = fixtures::exp1_env();
  const EnvironmentSet reloaded =
      build_environment_set(raw_environments_from_json(environments_to_json(envs)));
  REQUIRE(reloaded == envs);
}
