#pragma once

#include <optional>
#include <queue>
#include <vector>

#include "spikeplan/core.hpp"
#include "spikeplan/wiring.hpp"

namespace spikeplan {

// Trace event kinds. The declaration order doubles as the tiebreak
// priority at equal timestamps: a global inhibition sorts after the
// somatic spikes of the same instant, so exactly simultaneous peers are
// never cancelled by each other.
enum class EventKind {
  ExternalStimulus = 0,
  DendriticPlateau = 1,
  SomaticSpike = 2,
  LocalInhibition = 3,
  GlobalInhibition = 4,
  Cancellation = 5,
};

inline const char* event_name(EventKind kind) {
  switch (kind) {
    case EventKind::ExternalStimulus: return "ext";
    case EventKind::DendriticPlateau: return "dap";
    case EventKind::SomaticSpike: return "spike";
    case EventKind::LocalInhibition: return "inh_local";
    case EventKind::GlobalInhibition: return "inh_global";
    case EventKind::Cancellation: return "cancel";
  }
  return "?";
}

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::ExternalStimulus;
  int population = -1;  // -1 for the global inhibitory unit
  int neuron = -1;      // -1 for population-level events
  // Cancellation only: when the cancelled spike would have fired. The
  // event's own time is the triggering global inhibition.
  double scheduled = 0.0;

  bool operator==(const Event&) const = default;
};

struct PopulationActivity {
  double first_spike = -1.0;  // < 0 when the population never fired
  std::vector<int> spiked;    // distinct neuron indices, sorted
  bool cancelled = false;     // any pending spike was cancelled
  int spike_events = 0;       // somatic spike count including re-fires

  bool operator==(const PopulationActivity&) const = default;
};

// Ordered event log of one replay plus per-subpopulation summaries.
struct ReplayTrace {
  std::vector<Event> events;
  std::vector<PopulationActivity> populations;
  int total_spikes = 0;

  bool has_spike(int population) const {
    return populations[static_cast<std::size_t>(population)].first_spike >= 0.0;
  }
  double first_spike(int population) const {
    return populations[static_cast<std::size_t>(population)].first_spike;
  }
  int n_act(int population) const {
    return static_cast<int>(populations[static_cast<std::size_t>(population)].spiked.size());
  }
};

// Somatic latency of a dendritic plateau under threshold `theta`:
// kappa * theta, strictly increasing in theta. Lower thresholds fire
// earlier, which is what every adaptation rule exploits.
inline double somatic_latency(double theta, const SimConfig& config) {
  if (!(theta > 0.0)) throw SimulationError("somatic_latency: theta must be positive");
  return config.kappa * theta;
}

namespace detail {

enum class Phase : int {
  Delivery = 0,   // presynaptic spike arrives at a dendrite
  SpikeDue = 1,   // scheduled somatic spike fires
  LocalInh = 2,   // local inhibitory unit relays the wave
  GlobalInh = 3,  // global inhibitory unit fires and sweeps
};

struct QueueItem {
  double time;
  int phase;
  int population;
  int neuron;
  std::uint64_t sequence;

  bool operator>(const QueueItem& other) const {
    if (time != other.time) return time > other.time;
    if (phase != other.phase) return phase > other.phase;
    if (population != other.population) return population > other.population;
    if (neuron != other.neuron) return neuron > other.neuron;
    return sequence > other.sequence;
  }
};

struct NeuronState {
  std::vector<double> arrivals;  // presynaptic arrival times inside the window
  bool pending = false;
  bool cancelled = false;
  double plateau = -1.0;
  double scheduled = -1.0;
  int spikes = 0;
};

}  // namespace detail

// Runs one replay: external stimulus to the start subpopulation at t=0,
// dendritic coincidence detection, threshold-dependent somatic latency,
// and local/global inhibition with cancellation of slower pending peers.
// Deterministic: identical inputs produce identical traces.
inline ReplayTrace run_replay(const Network& network, const ThetaState& thetas,
                              const SimConfig& config) {
  const int populations = network.num_populations();
  if (static_cast<int>(thetas.theta.size()) != populations)
    throw SimulationError("run_replay: theta vector does not match the network");
  for (double theta : thetas.theta) {
    if (!(theta > 0.0)) throw SimulationError("run_replay: thresholds must be positive");
  }
  if (config.N != network.neurons_per_population || config.rho != network.context_size)
    throw SimulationError("run_replay: config N/rho do not match the network");

  const int spike_budget = network.neurons_per_population * populations;

  ReplayTrace trace;
  trace.populations.assign(static_cast<std::size_t>(populations), {});

  std::vector<std::vector<detail::NeuronState>> state(
      static_cast<std::size_t>(populations),
      std::vector<detail::NeuronState>(static_cast<std::size_t>(network.neurons_per_population)));

  std::priority_queue<detail::QueueItem, std::vector<detail::QueueItem>, std::greater<>> queue;
  std::uint64_t sequence = 0;
  auto push = [&](double time, detail::Phase phase, int population, int neuron) {
    queue.push({time, static_cast<int>(phase), population, neuron, sequence++});
  };

  std::vector<double> last_local(static_cast<std::size_t>(populations), -1.0);
  double last_global = 0.0;
  bool any_global = false;

  // The external stimulus drives every context neuron of the start
  // subpopulation to a somatic spike at t=0, bypassing the latency model.
  for (int cid : network.contexts_of_symbol[static_cast<std::size_t>(network.start_symbol)]) {
    for (int n : network.contexts[static_cast<std::size_t>(cid)].neurons) {
      trace.events.push_back({0.0, EventKind::ExternalStimulus, network.start_symbol, n, 0.0});
      push(0.0, detail::Phase::SpikeDue, network.start_symbol, n);
    }
  }

  while (!queue.empty()) {
    const detail::QueueItem item = queue.top();
    queue.pop();
    const double now = item.time;

    switch (static_cast<detail::Phase>(item.phase)) {
      case detail::Phase::Delivery: {
        detail::NeuronState& ns =
            state[static_cast<std::size_t>(item.population)][static_cast<std::size_t>(item.neuron)];
        if (ns.cancelled || ns.pending) break;
        ns.arrivals.push_back(now);
        while (!ns.arrivals.empty() && ns.arrivals.front() < now - config.w_coinc)
          ns.arrivals.erase(ns.arrivals.begin());
        if (static_cast<int>(ns.arrivals.size()) >= network.context_size) {
          ns.arrivals.clear();
          ns.pending = true;
          ns.plateau = now;
          ns.scheduled =
              now + somatic_latency(thetas.theta[static_cast<std::size_t>(item.population)], config);
          trace.events.push_back({now, EventKind::DendriticPlateau, item.population, item.neuron, 0.0});
          push(ns.scheduled, detail::Phase::SpikeDue, item.population, item.neuron);
        }
        break;
      }

      case detail::Phase::SpikeDue: {
        detail::NeuronState& ns =
            state[static_cast<std::size_t>(item.population)][static_cast<std::size_t>(item.neuron)];
        if (ns.cancelled) break;  // cancelled pending spikes never fire
        ns.pending = false;
        ns.spikes += 1;
        trace.total_spikes += 1;
        if (trace.total_spikes > spike_budget) {
          throw SimulationError(
              "run_replay: somatic spike count exceeded N x populations (" +
              std::to_string(spike_budget) + "); the parameter set produces runaway activity");
        }
        trace.events.push_back({now, EventKind::SomaticSpike, item.population, item.neuron, 0.0});
        PopulationActivity& activity = trace.populations[static_cast<std::size_t>(item.population)];
        activity.spike_events += 1;
        if (activity.first_spike < 0.0) activity.first_spike = now;
        auto pos = std::lower_bound(activity.spiked.begin(), activity.spiked.end(), item.neuron);
        if (pos == activity.spiked.end() || *pos != item.neuron) activity.spiked.insert(pos, item.neuron);

        for (auto [post_pop, post_n] :
             network.neuron_targets[static_cast<std::size_t>(item.population)]
                                   [static_cast<std::size_t>(item.neuron)]) {
          push(now + config.d_syn, detail::Phase::Delivery, post_pop, post_n);
        }
        // One local inhibitory relay per simultaneous spike wave.
        if (last_local[static_cast<std::size_t>(item.population)] != now) {
          last_local[static_cast<std::size_t>(item.population)] = now;
          push(now + config.d_inh, detail::Phase::LocalInh, item.population, -1);
        }
        break;
      }

      case detail::Phase::LocalInh: {
        trace.events.push_back({now, EventKind::LocalInhibition, item.population, -1, 0.0});
        const double global_time = now + config.d_inh;
        // The global unit pools all local relays; its refractory period
        // keeps it to one spike per concurrent wave.
        if (!any_global || global_time - last_global >= config.t_ref_inh) {
          any_global = true;
          last_global = global_time;
          push(global_time, detail::Phase::GlobalInh, -1, -1);
        }
        break;
      }

      case detail::Phase::GlobalInh: {
        trace.events.push_back({now, EventKind::GlobalInhibition, -1, -1, 0.0});
        // Cancel every pending spike of an earlier wave that would fire
        // inside the window. Plateaus at or after `now` are exempt, which
        // protects a wave's own downstream successors.
        for (int pop = 0; pop < populations; ++pop) {
          for (int n = 0; n < network.neurons_per_population; ++n) {
            detail::NeuronState& ns = state[static_cast<std::size_t>(pop)][static_cast<std::size_t>(n)];
            if (!ns.pending || ns.cancelled) continue;
            if (ns.plateau < now && ns.scheduled > now && ns.scheduled <= now + config.w_inh) {
              ns.pending = false;
              ns.cancelled = true;
              trace.events.push_back({now, EventKind::Cancellation, pop, n, ns.scheduled});
              trace.populations[static_cast<std::size_t>(pop)].cancelled = true;
            }
          }
        }
        break;
      }
    }
  }

  std::stable_sort(trace.events.begin(), trace.events.end(), [](const Event& a, const Event& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    if (a.population != b.population) return a.population < b.population;
    return a.neuron < b.neuron;
  });
  return trace;
}

}  // namespace spikeplan
