#pragma once

// Shared corpora and parameter sets for the reference experiments.

#include <spikeplan/core.hpp>

namespace fixtures {

// Single environment, two routes to J; the shorter one is unique.
inline spikeplan::EnvironmentSet path_planning_env() {
  return spikeplan::build_environment_set({
      {"env1", {{"A", "B", "C", "F", "H", "J"}, {"A", "B", "C", "D", "E", "G", "I", "J"}}},
  });
}

// Two nearly identical environments; E and F are the unique places and F
// is one hop closer to the start.
inline spikeplan::EnvironmentSet exp1_env() {
  return spikeplan::build_environment_set({
      {"env1", {{"A", "B", "C", "D"}, {"A", "B", "C", "E"}}},
      {"env2", {{"A", "B", "C", "D"}, {"A", "B", "F"}}},
  });
}

// A third environment shares F, leaving E as the only unique place.
inline spikeplan::EnvironmentSet exp2_env() {
  return spikeplan::build_environment_set({
      {"env1", {{"A", "B", "C", "D"}, {"A", "B", "C", "E"}}},
      {"env2", {{"A", "B", "C", "D"}, {"A", "B", "F"}}},
      {"env3", {{"A", "B", "C"}, {"A", "B", "F"}}},
  });
}

inline spikeplan::SimConfig path_planning_config() {
  spikeplan::SimConfig config;
  config.dt_max_b = 58.0;
  return spikeplan::validate_config(config);
}

inline spikeplan::SimConfig ambiguity_01_config() {
  spikeplan::SimConfig config;
  config.dt_max_b = 55.0;
  return spikeplan::validate_config(config);
}

inline spikeplan::SimConfig ambiguity_02a_config() { return ambiguity_01_config(); }

inline spikeplan::SimConfig ambiguity_02b_config() {
  spikeplan::SimConfig config;
  config.dt_max_b = 60.0;
  return spikeplan::validate_config(config);
}

// Parameters for the randomized planner suite. Deep graphs accumulate a
// latency spread across replays that the default 20 ms cancellation window
// cannot bridge, so the suite widens it; everything else is the
// path-planning parameter set.
inline spikeplan::SimConfig suite_config() {
  spikeplan::SimConfig config;
  config.dt_max_b = 58.0;
  config.w_inh = 60.0;
  return spikeplan::validate_config(config);
}

}  // namespace fixtures
