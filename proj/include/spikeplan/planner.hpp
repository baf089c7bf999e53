#pragma once

#include <utility>
#include <vector>

#include "spikeplan/adaptation.hpp"
#include "spikeplan/core.hpp"
#include "spikeplan/engine.hpp"
#include "spikeplan/oracle.hpp"
#include "spikeplan/wiring.hpp"

namespace spikeplan {

enum class PlanMode { path_planning, disambiguation };

// Outcome of a planning run: converged path, number of replays until the
// activity pattern first stabilized, and the full per-replay record
// (thresholds, traces, adaptation reports) for export and inspection.
struct PlanResult {
  PlanMode mode = PlanMode::path_planning;
  std::vector<int> path;
  int target = -1;  // requested target (plan) or chosen target (disambiguate)
  int replays_used = 0;
  bool converged = false;
  double initial_theta = 0.0;
  std::vector<ThetaState> theta_history;  // thresholds each replay ran with
  std::vector<ReplayTrace> traces;
  std::vector<std::pair<int, AdaptationReport>> reports;  // (replay applied after, report)
};

// Two replays count as converged when their activity patterns agree:
// the same neurons spiked and the same subpopulations were cancelled.
// Spike times may still drift while thresholds keep shrinking.
inline bool has_converged(const ReplayTrace& prev, const ReplayTrace& cur) {
  if (prev.populations.size() != cur.populations.size()) return false;
  for (std::size_t pop = 0; pop < prev.populations.size(); ++pop) {
    const PopulationActivity& a = prev.populations[pop];
    const PopulationActivity& b = cur.populations[pop];
    if (a.spiked != b.spiked || a.cancelled != b.cancelled) return false;
  }
  return true;
}

// Reads the final path out of a converged trace: the non-cancelled spiking
// subpopulations ordered by first spike time, verified to form a connected
// chain of the symbol graph.
inline std::vector<int> extract_path(const ReplayTrace& trace, const SymbolGraph& graph) {
  std::vector<std::pair<double, int>> order;
  for (std::size_t pop = 0; pop < trace.populations.size(); ++pop) {
    const PopulationActivity& activity = trace.populations[pop];
    if (activity.first_spike < 0.0 || activity.cancelled) continue;
    order.emplace_back(activity.first_spike, static_cast<int>(pop));
  }
  std::sort(order.begin(), order.end());
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    if (order[i].first == order[i + 1].first) {
      throw PlanError("ambiguous final activity: populations '" +
                      graph.names[static_cast<std::size_t>(order[i].second)] + "' and '" +
                      graph.names[static_cast<std::size_t>(order[i + 1].second)] +
                      "' share a first spike; the network did not converge to a single path");
    }
  }
  std::vector<int> path;
  path.reserve(order.size());
  for (const auto& [time, pop] : order) path.push_back(pop);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!graph.has_edge(path[i], path[i + 1])) {
      throw PlanError("final activity is not a connected chain: no edge '" +
                      graph.names[static_cast<std::size_t>(path[i])] + "' -> '" +
                      graph.names[static_cast<std::size_t>(path[i + 1])] + "'");
    }
  }
  return path;
}

namespace detail {

inline void check_symbol(const Network& network, int symbol, const char* what) {
  if (symbol < 0 || symbol >= network.num_populations())
    throw PlanError(std::string(what) + " symbol index out of range");
}

// Shared replay loop: runs replays, applies STDTA between them, and stops
// at the first repeated activity pattern. replays_used reports the first
// replay of the stable pattern, so the confirming repeat is not counted.
inline void replay_until_stable(const Network& network, const SimConfig& config,
                                ThetaState& thetas, PlanResult& result, int first_replay) {
  for (int replay = first_replay; replay <= config.max_replays; ++replay) {
    thetas.replay = replay;
    result.theta_history.push_back(thetas);
    result.traces.push_back(run_replay(network, thetas, config));
    const std::size_t count = result.traces.size();
    if (count >= 2 && has_converged(result.traces[count - 2], result.traces[count - 1])) {
      result.converged = true;
      result.replays_used = replay - 1;
      return;
    }
    auto [next, report] = apply_stdta(thetas, result.traces.back(), network, config);
    thetas = std::move(next);
    if (!report.rows.empty()) result.reports.emplace_back(replay, std::move(report));
  }
  result.converged = false;
  result.replays_used = config.max_replays;
}

inline std::vector<int> final_path(const PlanResult& result, const SymbolGraph& graph) {
  if (result.converged) return extract_path(result.traces.back(), graph);
  try {
    return extract_path(result.traces.back(), graph);
  } catch (const PlanError&) {
    return {};  // best effort only; the result is already flagged as unconverged
  }
}

}  // namespace detail

// Path planning with a known target: reduce the target's threshold once,
// then replay with STDTA until the activity stabilizes on a single chain.
inline PlanResult plan_path(const Network& network, int start, int target,
                            const SimConfig& config) {
  detail::check_symbol(network, start, "start");
  detail::check_symbol(network, target, "target");
  if (network.start_symbol != start)
    throw PlanError("network was built with start '" + network.name(network.start_symbol) +
                    "', cannot replay from '" + network.name(start) + "'");

  PlanResult result;
  result.mode = PlanMode::path_planning;
  result.target = target;
  result.initial_theta = config.theta_init;

  ThetaState thetas = initial_thetas(network.num_populations(), config);

  auto record_target_rule = [&] {
    AdaptationReport report;
    AdaptationReport::Row row;
    row.population = target;
    row.theta_before = thetas.theta[static_cast<std::size_t>(target)];
    row.rule = AdaptationRule::target;
    row.factor = config.lambda_target;
    thetas = apply_target_rule(thetas, target, config);
    row.theta_after = thetas.theta[static_cast<std::size_t>(target)];
    report.rows.push_back(row);
    result.reports.emplace_back(0, std::move(report));
  };

  if (start == target) {
    record_target_rule();
    thetas.replay = 1;
    result.theta_history.push_back(thetas);
    result.traces.push_back(run_replay(network, thetas, config));
    result.converged = true;
    result.replays_used = 1;
    result.path = {start};
    return result;
  }

  const SymbolGraph graph = symbol_graph_from_network(network);
  if (bfs_shortest_path(graph, start, target).empty())
    throw PlanError("target '" + network.name(target) + "' is not reachable from '" +
                    network.name(start) + "'");

  record_target_rule();
  detail::replay_until_stable(network, config, thetas, result, 1);
  result.path = detail::final_path(result, graph);
  return result;
}

// Place disambiguation: one measurement replay with unadapted thresholds
// to observe active-neuron counts, a single ADTA update marking the less
// ambiguous subpopulations, then the same replay/STDTA loop as path
// planning. The chosen target is wherever the converged activity ends.
inline PlanResult disambiguate(const Network& network, int start, const SimConfig& config) {
  detail::check_symbol(network, start, "start");
  if (network.start_symbol != start)
    throw PlanError("network was built with start '" + network.name(network.start_symbol) +
                    "', cannot replay from '" + network.name(start) + "'");

  PlanResult result;
  result.mode = PlanMode::disambiguation;
  result.initial_theta = config.theta_init;

  ThetaState thetas = initial_thetas(network.num_populations(), config);
  thetas.replay = 1;
  result.theta_history.push_back(thetas);
  result.traces.push_back(run_replay(network, thetas, config));

  auto [after_adta, adta_report] = apply_adta(thetas, result.traces.back(), config);
  if (!adta_report.rows.empty()) result.reports.emplace_back(1, std::move(adta_report));
  auto [after_stdta, stdta_report] =
      apply_stdta(after_adta, result.traces.back(), network, config);
  if (!stdta_report.rows.empty()) result.reports.emplace_back(1, std::move(stdta_report));
  thetas = std::move(after_stdta);

  detail::replay_until_stable(network, config, thetas, result, 2);

  const SymbolGraph graph = symbol_graph_from_network(network);
  result.path = detail::final_path(result, graph);
  result.target = result.path.empty() ? -1 : result.path.back();
  return result;
}

}  // namespace spikeplan
