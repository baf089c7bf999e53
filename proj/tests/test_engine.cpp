#include <catch2/catch_amalgamated.hpp>

#include <spikeplan/adaptation.hpp>
#include <spikeplan/engine.hpp>
#include <spikeplan/wiring.hpp>

#include "fixtures.hpp"

using namespace spikeplan;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kTimeTol = 1e-9;

int cancellations_of(const ReplayTrace& trace, int population) {
  int count = 0;
  for (const Event& event : trace.events) {
    if (event.kind == EventKind::Cancellation && event.population == population) ++count;
  }
  return count;
}

int events_of(const ReplayTrace& trace, int population) {
  int count = 0;
  for (const Event& event : trace.events) {
    if (event.population == population) ++count;
  }
  return count;
}

std::vector<double> global_inhibition_times(const ReplayTrace& trace) {
  std::vector<double> times;
  for (const Event& event : trace.events) {
    if (event.kind == EventKind::GlobalInhibition) times.push_back(event.time);
  }
  return times;
}

}  // namespace

TEST_CASE("somatic latency is linear in the threshold", "[engine]") {
  const SimConfig config = fixtures::path_planning_config();
  REQUIRE_THAT(somatic_latency(6.5, config), WithinAbs(57.85, kTimeTol));
  REQUIRE_THAT(somatic_latency(5.2, config), WithinAbs(46.28, kTimeTol));
  REQUIRE_THAT(somatic_latency(1e-9, config), WithinAbs(0.0, 1e-7));
  REQUIRE(somatic_latency(5.1, config) < somatic_latency(5.2, config));
  REQUIRE_THROWS_AS(somatic_latency(0.0, config), SimulationError);
}

TEST_CASE("path-planning replay with a reduced target threshold", "[engine]") {
  const SimConfig config = fixtures::path_planning_config();
  const EnvironmentSet envs = fixtures::path_planning_env();
  const Network net = build_network(envs, config);
  auto sym = [&](const char* name) { return envs.symbols.require(name); };

  ThetaState thetas = initial_thetas(net.num_populations(), config);
  thetas.theta[sym("J")] = 5.2;
  const ReplayTrace trace = run_replay(net, thetas, config);

  REQUIRE_THAT(trace.first_spike(sym("A")), WithinAbs(0.0, kTimeTol));
  REQUIRE_THAT(trace.first_spike(sym("B")), WithinAbs(59.85, kTimeTol));
  REQUIRE_THAT(trace.first_spike(sym("C")), WithinAbs(119.70, kTimeTol));
  REQUIRE_THAT(trace.first_spike(sym("F")), WithinAbs(179.55, kTimeTol));
  REQUIRE_THAT(trace.first_spike(sym("D")), WithinAbs(179.55, kTimeTol));
  REQUIRE_THAT(trace.first_spike(sym("H")), WithinAbs(239.40, kTimeTol));
  REQUIRE_THAT(trace.first_spike(sym("E")), WithinAbs(239.40, kTimeTol));
  REQUIRE_THAT(trace.first_spike(sym("J")), WithinAbs(287.68, kTimeTol));

  // G's pending spike at 299.25 is swept by the global inhibition that
  // J's earlier spike triggers at 288.68.
  REQUIRE(!trace.has_spike(sym("G")));
  REQUIRE(trace.populations[sym("G")].cancelled);
  REQUIRE(cancellations_of(trace, sym("G")) == config.rho);
  for (const Event& event : trace.events) {
    if (event.kind != EventKind::Cancellation) continue;
    REQUIRE(event.population == sym("G"));
    REQUIRE_THAT(event.time, WithinAbs(288.68, kTimeTol));
    REQUIRE_THAT(event.scheduled, WithinAbs(299.25, kTimeTol));
  }

  // A suppressed branch stays completely silent.
  REQUIRE(events_of(trace, sym("I")) == 0);
}

TEST_CASE("parallel branches with equal thresholds never cancel each other", "[engine]") {
  const SimConfig config = fixtures::path_planning_config();
  const EnvironmentSet envs =
      build_environment_set({{"env1", {{"A", "B", "C"}, {"A", "D", "E"}}}});
  const Network net = build_network(envs, config);

  const ReplayTrace trace = run_replay(net, initial_thetas(net.num_populations(), config), config);
  for (const Event& event : trace.events) REQUIRE(event.kind != EventKind::Cancellation);
  REQUIRE_THAT(trace.first_spike(envs.symbols.require("B")), WithinAbs(59.85, kTimeTol));
  REQUIRE_THAT(trace.first_spike(envs.symbols.require("D")), WithinAbs(59.85, kTimeTol));
  REQUIRE_THAT(trace.first_spike(envs.symbols.require("C")), WithinAbs(119.70, kTimeTol));
  REQUIRE_THAT(trace.first_spike(envs.symbols.require("E")), WithinAbs(119.70, kTimeTol));
}

TEST_CASE("a lower threshold spikes strictly earlier at equal plateau times", "[engine]") {
  const SimConfig config = fixtures::path_planning_config();
  const EnvironmentSet envs =
      build_environment_set({{"env1", {{"A", "B", "C"}, {"A", "D", "E"}}}});
  const Network net = build_network(envs, config);

  ThetaState thetas = initial_thetas(net.num_populations(), config);
  thetas.theta[envs.symbols.require("B")] = 5.2;
  const ReplayTrace trace = run_replay(net, thetas, config);
  REQUIRE_THAT(trace.first_spike(envs.symbols.require("B")), WithinAbs(48.28, kTimeTol));
  // The slower sibling lands inside the cancellation window and dies
  // before firing; its scheduled time shows the baseline latency.
  REQUIRE(trace.populations[envs.symbols.require("D")].cancelled);
  for (const Event& event : trace.events) {
    if (event.kind != EventKind::Cancellation) continue;
    REQUIRE(event.population == envs.symbols.require("D"));
    REQUIRE_THAT(event.scheduled, WithinAbs(59.85, kTimeTol));
    REQUIRE(trace.first_spike(envs.symbols.require("B")) < event.scheduled);
  }
}

TEST_CASE("single hop chain", "[engine]") {
  const SimConfig config = fixtures::path_planning_config();
  const EnvironmentSet envs = build_environment_set({{"env1", {{"A", "B"}}}});
  const Network net = build_network(envs, config);
  const ReplayTrace trace = run_replay(net, initial_thetas(net.num_populations(), config), config);
  REQUIRE_THAT(trace.first_spike(0), WithinAbs(0.0, kTimeTol));
  REQUIRE_THAT(trace.first_spike(1), WithinAbs(59.85, kTimeTol));
  REQUIRE(trace.total_spikes == 2 * config.rho);
}

TEST_CASE("traces are deterministic and sorted", "[engine]") {
  const SimConfig config = fixtures::ambiguity_02b_config();
  const EnvironmentSet envs = fixtures::exp2_env();
  const Network net = build_network(envs, config);
  ThetaState thetas = initial_thetas(net.num_populations(), config);
  thetas.theta[envs.symbols.require("F")] = 5.2;  // F now suppresses C

  const ReplayTrace a = run_replay(net, thetas, config);
  const ReplayTrace b = run_replay(net, thetas, config);
  REQUIRE(a.events == b.events);
  REQUIRE(a.populations == b.populations);
  REQUIRE(a.populations[envs.symbols.require("C")].cancelled);

  for (std::size_t i = 0; i + 1 < a.events.size(); ++i) {
    const Event& x = a.events[i];
    const Event& y = a.events[i + 1];
    const bool ordered =
        x.time < y.time ||
        (x.time == y.time &&
         (static_cast<int>(x.kind) < static_cast<int>(y.kind) ||
          (x.kind == y.kind && (x.population < y.population ||
                                (x.population == y.population && x.neuron <= y.neuron)))));
    REQUIRE(ordered);
    REQUIRE(x.time >= 0.0);
  }

  // A cancelled pending spike never also appears as a somatic spike.
  for (const Event& cancel : a.events) {
    if (cancel.kind != EventKind::Cancellation) continue;
    for (const Event& other : a.events) {
      if (other.kind == EventKind::SomaticSpike && other.population == cancel.population &&
          other.neuron == cancel.neuron)
        REQUIRE(other.time < cancel.time);
    }
  }
}

TEST_CASE("global inhibition fires at most once per refractory period", "[engine]") {
  const SimConfig config = fixtures::path_planning_config();
  const EnvironmentSet envs = fixtures::path_planning_env();
  const Network net = build_network(envs, config);
  const ReplayTrace trace = run_replay(net, initial_thetas(net.num_populations(), config), config);

  const std::vector<double> times = global_inhibition_times(trace);
  REQUIRE(times.size() >= 2);
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    REQUIRE(times[i + 1] - times[i] >= config.t_ref_inh);
}

TEST_CASE("unadapted replays obey the active-count law", "[engine]") {
  const SimConfig config = fixtures::ambiguity_01_config();
  for (const EnvironmentSet& envs : {fixtures::exp1_env(), fixtures::exp2_env()}) {
    const Network net = build_network(envs, config);
    const ReplayTrace trace =
        run_replay(net, initial_thetas(net.num_populations(), config), config);
    for (int s = 0; s < envs.num_symbols(); ++s) {
      REQUIRE(trace.has_spike(s));
      REQUIRE(trace.n_act(s) == expected_active(ambiguity(envs, s), config));
    }
  }
}

TEST_CASE("a wave never cancels its own successors", "[engine]") {
  // d_syn > 2*d_inh puts successor plateaus after the wave's own global
  // inhibition; the cancellation predicate then exempts them.
  const SimConfig config = fixtures::path_planning_config();
  const EnvironmentSet envs = fixtures::path_planning_env();
  const Network net = build_network(envs, config);
  ThetaState thetas = initial_thetas(net.num_populations(), config);
  thetas.theta[envs.symbols.require("J")] = 5.2;
  const ReplayTrace trace = run_replay(net, thetas, config);
  for (const char* name : {"A", "B", "C", "F", "H", "J"})
    REQUIRE(trace.has_spike(envs.symbols.require(name)));
}

TEST_CASE("mismatched theta vectors and thresholds are rejected", "[engine]") {
  const SimConfig config = fixtures::path_planning_config();
  const EnvironmentSet envs = build_environment_set({{"env1", {{"A", "B"}}}});
  const Network net = build_network(envs, config);

  ThetaState wrong_size;
  wrong_size.theta = {6.5};
  REQUIRE_THROWS_AS(run_replay(net, wrong_size, config), SimulationError);

  ThetaState negative = initial_thetas(net.num_populations(), config);
  negative.theta[0] = -1.0;
  REQUIRE_THROWS_AS(run_replay(net, negative, config), SimulationError);
}

TEST_CASE("runaway activity trips the spike budget guard", "[engine]") {
  // Hand-built two-context loop: A's context feeds B's, which feeds back
  // into A's. build_network cannot produce this (prefixes are acyclic),
  // but the engine must still refuse to spin forever on such input.
  SimConfig config;
  config.N = 3;
  config.rho = 3;
  config = validate_config(config);

  Network net;
  net.symbol_names = {"A", "B"};
  net.start_symbol = 0;
  net.neurons_per_population = 3;
  net.context_size = 3;
  net.contexts.push_back({0, 0, 0, {0}, {0, 1, 2}, {1}});
  net.contexts.push_back({1, 1, 0, {0, 1}, {0, 1, 2}, {0}});
  net.contexts_of_symbol = {{0}, {1}};
  net.symbol_successors = {{1}, {0}};
  net.neuron_targets.assign(2, std::vector<std::vector<std::pair<int, int>>>(3));
  for (int n = 0; n < 3; ++n) {
    for (int m = 0; m < 3; ++m) {
      net.neuron_targets[0][n].emplace_back(1, m);
      net.neuron_targets[1][n].emplace_back(0, m);
    }
  }

  REQUIRE_THROWS_AS(run_replay(net, initial_thetas(2, config), config), SimulationError);
}
