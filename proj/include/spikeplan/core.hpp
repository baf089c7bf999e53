#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace spikeplan {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameter set (validate_config, adta_factor range check).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A subpopulation cannot hold the contexts required by the corpus.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Runaway or inconsistent simulation state.
class SimulationError : public Error {
 public:
  using Error::Error;
};

// Planning failures: unreachable target, ambiguous final activity.
class PlanError : public Error {
 public:
  using Error::Error;
};

// File parsing / manifest problems.
class IoError : public Error {
 public:
  using Error::Error;
};

namespace detail {

// Deterministic 64-bit mixer used for every pseudo-random draw in the
// library. Standard-library distributions are implementation-defined,
// which would break bit-reproducibility of network construction.
struct Splitmix64 {
  std::uint64_t state;

  explicit Splitmix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t x = (state += 0x9e3779b97f4a7c15ULL);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  // Bounded draw; modulo bias is irrelevant here, determinism is not.
  std::uint64_t below(std::uint64_t bound) { return bound == 0 ? 0 : next() % bound; }
};

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  Splitmix64 rng(a ^ (0x9e3779b97f4a7c15ULL * (b + 1)));
  return rng.next();
}

// Number of elements two sorted int vectors have in common.
inline int count_common(const std::vector<int>& a, const std::vector<int>& b) {
  int count = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++count;
      ++ia;
      ++ib;
    }
  }
  return count;
}

}  // namespace detail

// Interned symbol labels. Indices are dense and assigned in order of first
// appearance during ingestion, so re-ingesting the same corpus always
// yields identical assignments.
struct SymbolTable {
  std::vector<std::string> names;

  bool operator==(const SymbolTable&) const = default;

  int size() const { return static_cast<int>(names.size()); }

  int index_of(const std::string& name) const {
    for (int i = 0; i < size(); ++i) {
      if (names[i] == name) return i;
    }
    return -1;
  }

  int require(const std::string& name) const {
    int idx = index_of(name);
    if (idx < 0) throw Error("unknown symbol '" + name + "'");
    return idx;
  }

  int intern(const std::string& name) {
    int idx = index_of(name);
    if (idx >= 0) return idx;
    names.push_back(name);
    return size() - 1;
  }

  const std::string& name(int symbol) const {
    if (symbol < 0 || symbol >= size()) throw Error("symbol index out of range");
    return names[static_cast<std::size_t>(symbol)];
  }
};

struct Environment {
  std::string id;
  std::vector<std::vector<int>> sequences;  // symbol indices

  bool operator==(const Environment&) const = default;
};

// A named set of environments, each a list of symbol sequences. This is
// both the training corpus and the universe over which place ambiguity
// is counted.
struct EnvironmentSet {
  SymbolTable symbols;
  std::vector<Environment> environments;

  bool operator==(const EnvironmentSet&) const = default;

  int num_symbols() const { return symbols.size(); }

  int start_symbol() const {
    if (environments.empty() || environments.front().sequences.empty())
      throw Error("environment set is empty");
    return environments.front().sequences.front().front();
  }
};

// Pre-ingestion form: sequences of symbol labels as read from a file or
// written by a generator.
struct RawEnvironment {
  std::string id;
  std::vector<std::vector<std::string>> sequences;
};

// Interns symbols and validates the corpus invariants:
//  - at least one environment, each with at least one sequence,
//  - environment ids unique,
//  - every sequence has length >= 2,
//  - all sequences share one start symbol,
//  - no sequence contains an immediate self-transition.
inline EnvironmentSet build_environment_set(const std::vector<RawEnvironment>& raw) {
  if (raw.empty()) throw Error("environment set must contain at least one environment");
  EnvironmentSet envs;
  for (const RawEnvironment& re : raw) {
    for (const Environment& seen : envs.environments) {
      if (seen.id == re.id) throw Error("duplicate environment id '" + re.id + "'");
    }
    if (re.sequences.empty())
      throw Error("environment '" + re.id + "' has no sequences");
    Environment env;
    env.id = re.id;
    for (const auto& seq : re.sequences) {
      if (seq.size() < 2)
        throw Error("environment '" + re.id + "': every sequence needs length >= 2");
      std::vector<int> indices;
      indices.reserve(seq.size());
      for (const std::string& name : seq) indices.push_back(envs.symbols.intern(name));
      for (std::size_t i = 1; i < indices.size(); ++i) {
        if (indices[i] == indices[i - 1])
          throw Error("environment '" + re.id + "': immediate self-transition at '" +
                      seq[i] + "'");
      }
      env.sequences.push_back(std::move(indices));
    }
    envs.environments.push_back(std::move(env));
  }
  const int start = envs.environments.front().sequences.front().front();
  for (const Environment& env : envs.environments) {
    for (const auto& seq : env.sequences) {
      if (seq.front() != start)
        throw Error("environment '" + env.id + "': all sequences must share the start symbol '" +
                    envs.symbols.name(start) + "'");
    }
  }
  return envs;
}

enum class AdtaMode { literal, complement };

inline std::string to_string(AdtaMode mode) {
  return mode == AdtaMode::literal ? "literal" : "complement";
}

inline AdtaMode adta_mode_from_string(const std::string& text) {
  if (text == "literal") return AdtaMode::literal;
  if (text == "complement") return AdtaMode::complement;
  throw ConfigError("adta_mode: expected 'literal' or 'complement', got '" + text + "'");
}

// Simulation parameters. Defaults reproduce the reference experiments:
// 21 neurons per subpopulation with contexts of 3, initial threshold 6.5,
// and the timing constants of the event engine.
struct SimConfig {
  int N = 21;    // neurons per subpopulation
  int rho = 3;   // active neurons per context

  double theta_init = 6.5;  // initial firing threshold (threshold units)

  double lambda_target = 0.8;  // one-shot target threshold rate
  double lambda_b = 0.9;       // back-tracing (STDTA) rate per replay
  double lambda_a = 0.2;       // ambiguity (ADTA) rate

  double gamma_plus = -8.0;   // ADTA exponent when active fraction >= target fraction
  double gamma_minus = 20.0;  // ADTA exponent otherwise

  double dt_min_b = 0.0;   // STDTA window lower bound (ms)
  double dt_max_b = 58.0;  // STDTA window upper bound (ms)

  double kappa = 8.9;  // somatic latency per threshold unit (ms/unit)

  double d_syn = 2.0;       // synaptic + dendritic event delay (ms)
  double d_inh = 0.5;       // per-hop inhibition delay (ms)
  double w_inh = 20.0;      // cancellation window after a global inhibition (ms)
  double t_ref_inh = 10.0;  // refractory period of the global inhibitory unit (ms)
  double w_coinc = 1.0;     // dendritic coincidence window (ms)

  AdtaMode adta_mode = AdtaMode::complement;

  int max_replays = 20;
  std::uint64_t seed = 5;

  bool operator==(const SimConfig&) const = default;
};

// Returns the config unchanged if all invariants hold; otherwise throws a
// ConfigError naming the first violated field.
inline SimConfig validate_config(const SimConfig& c) {
  auto rate_ok = [](double v) { return v > 0.0 && v <= 1.0; };
  if (!rate_ok(c.lambda_target)) throw ConfigError("lambda_target: rate out of (0,1]");
  if (!rate_ok(c.lambda_b)) throw ConfigError("lambda_b: rate out of (0,1]");
  if (!rate_ok(c.lambda_a)) throw ConfigError("lambda_a: rate out of (0,1]");
  if (c.rho < 1) throw ConfigError("rho: need N >= rho >= 1");
  if (c.N < c.rho) throw ConfigError("N: need N >= rho >= 1");
  if (!(c.dt_min_b < c.dt_max_b)) throw ConfigError("dt_min_b/dt_max_b: empty STDTA window");
  if (!(c.theta_init > 0.0)) throw ConfigError("theta_init: must be positive");
  if (!(c.kappa > 0.0)) throw ConfigError("kappa: must be positive");
  if (!(c.d_syn > 0.0)) throw ConfigError("d_syn: must be positive");
  if (!(c.d_inh > 0.0)) throw ConfigError("d_inh: must be positive");
  if (!(c.w_inh > 0.0)) throw ConfigError("w_inh: must be positive");
  if (!(c.t_ref_inh > 0.0)) throw ConfigError("t_ref_inh: must be positive");
  if (!(c.w_coinc > 0.0)) throw ConfigError("w_coinc: must be positive");
  if (!(c.d_syn > 2.0 * c.d_inh))
    throw ConfigError("d_syn: must exceed 2*d_inh, otherwise a wave could cancel its own successors");
  if (c.max_replays < 1) throw ConfigError("max_replays: must be >= 1");
  return c;
}

// Per-subpopulation firing thresholds. All update rules are multiplicative
// with factors in (0,1], so entries never increase across replays.
struct ThetaState {
  std::vector<double> theta;
  int replay = 0;

  bool operator==(const ThetaState&) const = default;
};

inline ThetaState initial_thetas(int num_populations, const SimConfig& config) {
  ThetaState state;
  state.theta.assign(static_cast<std::size_t>(num_populations), config.theta_init);
  state.replay = 0;
  return state;
}

}  // namespace spikeplan
