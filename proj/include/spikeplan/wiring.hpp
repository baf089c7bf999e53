#pragma once

#include <map>
#include <numeric>
#include <tuple>
#include <utility>
#include <vector>

#include "spikeplan/core.hpp"

namespace spikeplan {

// One learned occurrence of a symbol: the environment it was seen in plus
// the full sequence prefix up to and including the occurrence. Two
// occurrences share a context iff environment and prefix are identical;
// occurrences in different environments never share one.
struct Context {
  int id = -1;
  int symbol = -1;
  int environment = -1;
  std::vector<int> prefix;      // symbol indices, ends with `symbol`
  std::vector<int> neurons;     // sorted, exactly rho entries once allocated
  std::vector<int> successors;  // context ids, deduplicated, creation order
};

struct ContextTable {
  int num_symbols = 0;
  std::vector<Context> contexts;
  std::vector<std::vector<int>> contexts_of_symbol;

  int context_count(int symbol) const {
    return static_cast<int>(contexts_of_symbol[static_cast<std::size_t>(symbol)].size());
  }
};

// Enumerates the contexts of every (environment, sequence, position)
// occurrence. Shared prefixes within one environment share a context, so a
// branch point activates all of its successor contexts during replay.
inline ContextTable derive_contexts(const EnvironmentSet& envs, const SimConfig& config) {
  ContextTable table;
  table.num_symbols = envs.num_symbols();
  table.contexts_of_symbol.assign(static_cast<std::size_t>(table.num_symbols), {});

  std::map<std::pair<int, std::vector<int>>, int> by_key;  // (environment, prefix) -> id
  for (std::size_t e = 0; e < envs.environments.size(); ++e) {
    for (const std::vector<int>& seq : envs.environments[e].sequences) {
      int previous = -1;
      std::vector<int> prefix;
      for (int symbol : seq) {
        prefix.push_back(symbol);
        auto key = std::make_pair(static_cast<int>(e), prefix);
        auto it = by_key.find(key);
        int id;
        if (it == by_key.end()) {
          id = static_cast<int>(table.contexts.size());
          by_key.emplace(std::move(key), id);
          Context ctx;
          ctx.id = id;
          ctx.symbol = symbol;
          ctx.environment = static_cast<int>(e);
          ctx.prefix = prefix;
          table.contexts.push_back(std::move(ctx));
          table.contexts_of_symbol[static_cast<std::size_t>(symbol)].push_back(id);
        } else {
          id = it->second;
        }
        if (previous >= 0) {
          auto& succ = table.contexts[static_cast<std::size_t>(previous)].successors;
          if (std::find(succ.begin(), succ.end(), id) == succ.end()) succ.push_back(id);
        }
        previous = id;
      }
    }
  }

  for (int s = 0; s < table.num_symbols; ++s) {
    if (table.context_count(s) * config.rho > config.N) {
      throw CapacityError("subpopulation '" + envs.symbols.name(s) + "' needs " +
                          std::to_string(table.context_count(s) * config.rho) +
                          " neurons for " + std::to_string(table.context_count(s)) +
                          " contexts but N = " + std::to_string(config.N));
    }
  }
  return table;
}

// Trained network: one subpopulation of N neuron slots per symbol, each
// context owning rho of them, and full rho x rho connectivity between
// consecutive contexts. Immutable after construction.
struct Network {
  std::vector<std::string> symbol_names;
  int start_symbol = 0;
  int neurons_per_population = 0;  // N
  int context_size = 0;            // rho

  std::vector<Context> contexts;
  std::vector<std::vector<int>> contexts_of_symbol;
  std::vector<std::vector<int>> symbol_successors;  // sorted, deduplicated

  // [population][neuron] -> (post population, post neuron) synapse targets.
  std::vector<std::vector<std::vector<std::pair<int, int>>>> neuron_targets;

  int num_populations() const { return static_cast<int>(symbol_names.size()); }

  const std::string& name(int symbol) const {
    return symbol_names[static_cast<std::size_t>(symbol)];
  }

  bool has_edge(int pre, int post) const {
    const auto& succ = symbol_successors[static_cast<std::size_t>(pre)];
    return std::find(succ.begin(), succ.end(), post) != succ.end();
  }

  // Materialized synapse list, sorted; used by tests and diagnostics.
  std::vector<std::tuple<int, int, int, int>> all_synapses() const {
    std::vector<std::tuple<int, int, int, int>> out;
    for (int pop = 0; pop < num_populations(); ++pop) {
      for (int n = 0; n < neurons_per_population; ++n) {
        for (auto [post_pop, post_n] :
             neuron_targets[static_cast<std::size_t>(pop)][static_cast<std::size_t>(n)]) {
          out.emplace_back(pop, n, post_pop, post_n);
        }
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  // Synapse count between the given neuron subsets of two populations.
  // Both subsets must be sorted.
  int synapse_count(int pre_symbol, const std::vector<int>& pre_neurons, int post_symbol,
                    const std::vector<int>& post_neurons) const {
    int total = 0;
    for (int cid : contexts_of_symbol[static_cast<std::size_t>(pre_symbol)]) {
      const Context& pre = contexts[static_cast<std::size_t>(cid)];
      const int pre_active = detail::count_common(pre.neurons, pre_neurons);
      if (pre_active == 0) continue;
      for (int sid : pre.successors) {
        const Context& post = contexts[static_cast<std::size_t>(sid)];
        if (post.symbol != post_symbol) continue;
        total += pre_active * detail::count_common(post.neurons, post_neurons);
      }
    }
    return total;
  }
};

// Deterministic surrogate for the training phase. Neuron indices per
// context come from a seeded shuffle of each subpopulation's slots,
// consumed sequentially in order of first context appearance; consecutive
// contexts are connected with the full rho x rho bipartite product.
inline Network build_network(const EnvironmentSet& envs, const SimConfig& config) {
  ContextTable table = derive_contexts(envs, config);

  Network net;
  net.symbol_names = envs.symbols.names;
  net.start_symbol = envs.start_symbol();
  net.neurons_per_population = config.N;
  net.context_size = config.rho;
  net.contexts = std::move(table.contexts);
  net.contexts_of_symbol = std::move(table.contexts_of_symbol);

  for (int s = 0; s < net.num_populations(); ++s) {
    std::vector<int> slots(static_cast<std::size_t>(config.N));
    std::iota(slots.begin(), slots.end(), 0);
    detail::Splitmix64 rng(detail::mix(config.seed, static_cast<std::uint64_t>(s)));
    for (int i = config.N - 1; i > 0; --i) {
      int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i + 1)));
      std::swap(slots[static_cast<std::size_t>(i)], slots[static_cast<std::size_t>(j)]);
    }
    int cursor = 0;
    for (int cid : net.contexts_of_symbol[static_cast<std::size_t>(s)]) {
      Context& ctx = net.contexts[static_cast<std::size_t>(cid)];
      ctx.neurons.assign(slots.begin() + cursor, slots.begin() + cursor + config.rho);
      std::sort(ctx.neurons.begin(), ctx.neurons.end());
      cursor += config.rho;
    }
  }

  net.symbol_successors.assign(static_cast<std::size_t>(net.num_populations()), {});
  net.neuron_targets.assign(
      static_cast<std::size_t>(net.num_populations()),
      std::vector<std::vector<std::pair<int, int>>>(static_cast<std::size_t>(config.N)));
  for (const Context& pre : net.contexts) {
    for (int sid : pre.successors) {
      const Context& post = net.contexts[static_cast<std::size_t>(sid)];
      auto& succ = net.symbol_successors[static_cast<std::size_t>(pre.symbol)];
      if (std::find(succ.begin(), succ.end(), post.symbol) == succ.end())
        succ.push_back(post.symbol);
      for (int pre_n : pre.neurons) {
        auto& targets =
            net.neuron_targets[static_cast<std::size_t>(pre.symbol)][static_cast<std::size_t>(pre_n)];
        for (int post_n : post.neurons) targets.emplace_back(post.symbol, post_n);
      }
    }
  }
  for (auto& succ : net.symbol_successors) std::sort(succ.begin(), succ.end());
  return net;
}

}  // namespace spikeplan
