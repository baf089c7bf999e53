#pragma once

#include <algorithm>
#include <deque>
#include <string>
#include <vector>

#include "spikeplan/adaptation.hpp"
#include "spikeplan/core.hpp"
#include "spikeplan/wiring.hpp"

namespace spikeplan {

// Classical view of a corpus: one node per symbol, a directed edge (u,v)
// iff some sequence contains u immediately followed by v.
struct SymbolGraph {
  std::vector<std::string> names;
  std::vector<std::vector<int>> adjacency;  // sorted, deduplicated

  int num_nodes() const { return static_cast<int>(names.size()); }

  bool has_edge(int u, int v) const {
    const auto& adj = adjacency[static_cast<std::size_t>(u)];
    return std::binary_search(adj.begin(), adj.end(), v);
  }

  int num_edges() const {
    int total = 0;
    for (const auto& adj : adjacency) total += static_cast<int>(adj.size());
    return total;
  }
};

inline SymbolGraph symbol_graph(const EnvironmentSet& envs) {
  SymbolGraph graph;
  graph.names = envs.symbols.names;
  graph.adjacency.assign(static_cast<std::size_t>(envs.num_symbols()), {});
  for (const Environment& env : envs.environments) {
    for (const auto& seq : env.sequences) {
      for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        auto& adj = graph.adjacency[static_cast<std::size_t>(seq[i])];
        if (std::find(adj.begin(), adj.end(), seq[i + 1]) == adj.end())
          adj.push_back(seq[i + 1]);
      }
    }
  }
  for (auto& adj : graph.adjacency) std::sort(adj.begin(), adj.end());
  return graph;
}

// Projection of a trained network's context edges onto symbols. Equals
// symbol_graph() of the corpus the network was built from.
inline SymbolGraph symbol_graph_from_network(const Network& network) {
  SymbolGraph graph;
  graph.names = network.symbol_names;
  graph.adjacency = network.symbol_successors;
  return graph;
}

namespace detail {

// BFS distances from `start`; -1 for unreachable nodes.
inline std::vector<int> bfs_distances(const SymbolGraph& graph, int start) {
  std::vector<int> dist(static_cast<std::size_t>(graph.num_nodes()), -1);
  std::deque<int> frontier{start};
  dist[static_cast<std::size_t>(start)] = 0;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop_front();
    for (int v : graph.adjacency[static_cast<std::size_t>(u)]) {
      if (dist[static_cast<std::size_t>(v)] < 0) {
        dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
        frontier.push_back(v);
      }
    }
  }
  return dist;
}

}  // namespace detail

// Minimum-hop path with deterministic tiebreaks (parents discovered in
// ascending symbol order win). Empty result signals an unreachable target.
inline std::vector<int> bfs_shortest_path(const SymbolGraph& graph, int start, int target) {
  if (start < 0 || start >= graph.num_nodes() || target < 0 || target >= graph.num_nodes())
    throw Error("bfs_shortest_path: unknown node");
  if (start == target) return {start};
  std::vector<int> parent(static_cast<std::size_t>(graph.num_nodes()), -1);
  std::vector<bool> seen(static_cast<std::size_t>(graph.num_nodes()), false);
  std::deque<int> frontier{start};
  seen[static_cast<std::size_t>(start)] = true;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop_front();
    for (int v : graph.adjacency[static_cast<std::size_t>(u)]) {
      if (seen[static_cast<std::size_t>(v)]) continue;
      seen[static_cast<std::size_t>(v)] = true;
      parent[static_cast<std::size_t>(v)] = u;
      if (v == target) {
        std::vector<int> path{target};
        for (int node = target; node != start; node = parent[static_cast<std::size_t>(node)])
          path.push_back(parent[static_cast<std::size_t>(node)]);
        std::reverse(path.begin(), path.end());
        return path;
      }
      frontier.push_back(v);
    }
  }
  return {};
}

enum class TargetMode { nearest_reduced, global_min };

// Classical reference for the disambiguation task.
//  - nearest_reduced: among reachable symbols whose ambiguity is strictly
//    below the maximum over reachable symbols, the closest one (ties:
//    lowest ambiguity, then symbol index).
//  - global_min: the reachable symbol of globally minimal ambiguity at
//    minimum distance among those (ties: symbol index).
// If all reachable symbols are equally ambiguous, returns the start.
inline int ambiguity_target(const EnvironmentSet& envs, int start, TargetMode mode) {
  const SymbolGraph graph = symbol_graph(envs);
  if (start < 0 || start >= graph.num_nodes()) throw Error("ambiguity_target: unknown start");
  const std::vector<int> dist = detail::bfs_distances(graph, start);

  int max_alpha = 0;
  int min_alpha = 0;
  bool any = false;
  std::vector<int> alphas(static_cast<std::size_t>(graph.num_nodes()), 0);
  for (int s = 0; s < graph.num_nodes(); ++s) {
    if (dist[static_cast<std::size_t>(s)] < 0) continue;
    alphas[static_cast<std::size_t>(s)] = ambiguity(envs, s);
    if (!any) {
      max_alpha = min_alpha = alphas[static_cast<std::size_t>(s)];
      any = true;
    } else {
      max_alpha = std::max(max_alpha, alphas[static_cast<std::size_t>(s)]);
      min_alpha = std::min(min_alpha, alphas[static_cast<std::size_t>(s)]);
    }
  }
  if (!any || max_alpha == min_alpha) return start;

  int best = -1;
  for (int s = 0; s < graph.num_nodes(); ++s) {
    const int d = dist[static_cast<std::size_t>(s)];
    if (d < 0) continue;
    const int alpha = alphas[static_cast<std::size_t>(s)];
    if (mode == TargetMode::nearest_reduced) {
      if (alpha >= max_alpha) continue;
    } else {
      if (alpha != min_alpha) continue;
    }
    if (best < 0) {
      best = s;
      continue;
    }
    const int bd = dist[static_cast<std::size_t>(best)];
    const int ba = alphas[static_cast<std::size_t>(best)];
    if (d != bd) {
      if (d < bd) best = s;
    } else if (mode == TargetMode::nearest_reduced && alpha != ba) {
      if (alpha < ba) best = s;
    }  // equal distance (and ambiguity): keep the lower symbol index
  }
  return best < 0 ? start : best;
}

struct GenParams {
  int depth = 4;     // hop length of the unique shortest path
  int branches = 2;  // total number of start-to-target sequences
  int symbols = 12;  // symbol budget
};

namespace detail {

inline std::string symbol_name_for(int index) {
  std::string name;
  int n = index;
  do {
    name.insert(name.begin(), static_cast<char>('A' + n % 26));
    n = n / 26 - 1;
  } while (n >= 0);
  return name;
}

// Number of minimum-hop start-to-target paths, and the minimum itself.
inline std::pair<int, long long> min_path_count(const SymbolGraph& graph, int start, int target) {
  const std::vector<int> dist = bfs_distances(graph, start);
  if (dist[static_cast<std::size_t>(target)] < 0) return {-1, 0};
  std::vector<int> order(static_cast<std::size_t>(graph.num_nodes()));
  for (int i = 0; i < graph.num_nodes(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return dist[static_cast<std::size_t>(a)] < dist[static_cast<std::size_t>(b)];
  });
  std::vector<long long> count(static_cast<std::size_t>(graph.num_nodes()), 0);
  count[static_cast<std::size_t>(start)] = 1;
  for (int u : order) {
    if (dist[static_cast<std::size_t>(u)] < 0 || count[static_cast<std::size_t>(u)] == 0) continue;
    for (int v : graph.adjacency[static_cast<std::size_t>(u)]) {
      if (dist[static_cast<std::size_t>(v)] == dist[static_cast<std::size_t>(u)] + 1)
        count[static_cast<std::size_t>(v)] += count[static_cast<std::size_t>(u)];
    }
  }
  return {dist[static_cast<std::size_t>(target)], count[static_cast<std::size_t>(target)]};
}

}  // namespace detail

// Seeded generator of single-environment layered DAGs with one shortest
// path: a main chain of `depth` hops plus `branches - 1` strictly longer
// detours that leave the chain at a random point and rejoin only at the
// target. Instances are verified with the BFS oracle and resampled when
// the verification fails; deterministic for a fixed seed.
inline EnvironmentSet gen_random_env(std::uint64_t seed, const GenParams& params) {
  if (params.depth < 1 || params.branches < 1)
    throw Error("gen_random_env: depth and branches must be positive");
  if (params.symbols < params.depth + 1)
    throw Error("gen_random_env: symbol budget below the main chain length");

  detail::Splitmix64 rng(detail::mix(seed, 0x67656e));
  for (int attempt = 0; attempt < 256; ++attempt) {
    std::vector<std::vector<int>> sequences;
    std::vector<int> main_chain(static_cast<std::size_t>(params.depth + 1));
    for (int i = 0; i <= params.depth; ++i) main_chain[static_cast<std::size_t>(i)] = i;
    sequences.push_back(main_chain);
    const int target = params.depth;

    int next_symbol = params.depth + 1;
    bool feasible = true;
    for (int b = 1; b < params.branches; ++b) {
      int divergence = 0;
      if (params.depth >= 2) {
        // Mostly leave the chain after a shared prefix of two or more
        // symbols; occasionally branch straight from the start.
        divergence = rng.below(100) < 15
                         ? 0
                         : 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(params.depth - 1)));
      }
      const int min_extra = params.depth - divergence;  // strictly longer than the chain
      const int budget = params.symbols - next_symbol;
      if (budget < min_extra) {
        feasible = false;
        break;
      }
      const int max_extra = std::min(budget, min_extra + 2);
      const int extra =
          min_extra + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_extra - min_extra + 1)));
      std::vector<int> seq(main_chain.begin(), main_chain.begin() + divergence + 1);
      for (int i = 0; i < extra; ++i) seq.push_back(next_symbol++);
      seq.push_back(target);
      sequences.push_back(std::move(seq));
    }
    if (!feasible) continue;

    RawEnvironment raw;
    raw.id = "gen";
    for (const auto& seq : sequences) {
      std::vector<std::string> names;
      names.reserve(seq.size());
      for (int s : seq) names.push_back(detail::symbol_name_for(s));
      raw.sequences.push_back(std::move(names));
    }
    EnvironmentSet envs = build_environment_set({raw});

    const SymbolGraph graph = symbol_graph(envs);
    const auto [hops, count] = detail::min_path_count(graph, 0, target);
    if (hops == params.depth && count == 1) return envs;
  }
  throw Error("gen_random_env: exhausted resampling attempts for the given parameters");
}

}  // namespace spikeplan
