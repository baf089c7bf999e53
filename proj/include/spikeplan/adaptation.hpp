#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "spikeplan/core.hpp"
#include "spikeplan/engine.hpp"
#include "spikeplan/wiring.hpp"

namespace spikeplan {

enum class AdaptationRule { none, target, stdta, adta };

inline const char* rule_name(AdaptationRule rule) {
  switch (rule) {
    case AdaptationRule::none: return "none";
    case AdaptationRule::target: return "target";
    case AdaptationRule::stdta: return "stdta";
    case AdaptationRule::adta: return "adta";
  }
  return "?";
}

// One threshold update: which rule fired, the factor it used, and the
// evidence it was based on (spike-time gaps for STDTA, active counts for
// ADTA). new theta <= old theta always; factors lie in (0,1].
struct AdaptationReport {
  struct Row {
    int population = -1;
    double theta_before = 0.0;
    double theta_after = 0.0;
    AdaptationRule rule = AdaptationRule::none;
    std::vector<double> dt_values;  // gaps to each qualifying successor
    int n_act = 0;
    double factor = 1.0;
  };
  std::vector<Row> rows;
};

// One-shot target rule: scale the target subpopulation's threshold by
// lambda_target before the first replay of a path-planning run. The
// planner applies this exactly once.
inline ThetaState apply_target_rule(const ThetaState& thetas, int target,
                                    const SimConfig& config) {
  if (target < 0 || target >= static_cast<int>(thetas.theta.size()))
    throw Error("apply_target_rule: unknown target symbol index " + std::to_string(target));
  ThetaState next = thetas;
  next.theta[static_cast<std::size_t>(target)] *= config.lambda_target;
  return next;
}

// STDTA eligibility of the ordered pair (m, n): both subpopulations fired,
// the first-spike gap lies strictly inside the STDTA window, and the
// neurons of m active in this replay keep more than rho synapses onto the
// neurons of n active in this replay.
inline bool stdta_eligible(const ReplayTrace& trace, const Network& network, int m, int n,
                           const SimConfig& config) {
  if (!trace.has_spike(m) || !trace.has_spike(n)) return false;
  const double gap = trace.first_spike(n) - trace.first_spike(m);
  if (!(gap > config.dt_min_b && gap < config.dt_max_b)) return false;
  const int connections =
      network.synapse_count(m, trace.populations[static_cast<std::size_t>(m)].spiked, n,
                            trace.populations[static_cast<std::size_t>(n)].spiked);
  return connections > config.rho;
}

// Back-tracing update: every subpopulation with at least one eligible
// successor is scaled by lambda_b, at most once per replay no matter how
// many successors qualify.
inline std::pair<ThetaState, AdaptationReport> apply_stdta(const ThetaState& thetas,
                                                           const ReplayTrace& trace,
                                                           const Network& network,
                                                           const SimConfig& config) {
  ThetaState next = thetas;
  AdaptationReport report;
  for (int m = 0; m < network.num_populations(); ++m) {
    if (!trace.has_spike(m)) continue;
    std::vector<double> gaps;
    for (int n : network.symbol_successors[static_cast<std::size_t>(m)]) {
      if (stdta_eligible(trace, network, m, n, config))
        gaps.push_back(trace.first_spike(n) - trace.first_spike(m));
    }
    if (gaps.empty()) continue;
    AdaptationReport::Row row;
    row.population = m;
    row.theta_before = next.theta[static_cast<std::size_t>(m)];
    row.rule = AdaptationRule::stdta;
    row.dt_values = std::move(gaps);
    row.n_act = trace.n_act(m);
    row.factor = config.lambda_b;
    next.theta[static_cast<std::size_t>(m)] *= config.lambda_b;
    row.theta_after = next.theta[static_cast<std::size_t>(m)];
    report.rows.push_back(std::move(row));
  }
  return {std::move(next), std::move(report)};
}

// ADTA factor for a subpopulation with n_act of n_total neurons active.
//
// In `literal` mode this is exp(gamma * (F_a - F_rho)) * lambda_a, which is
// strictly decreasing in n_act above rho: the most ambiguous subpopulation
// would receive the strongest reduction. `complement` mode uses
// 1 - lambda_a * exp(gamma * (F_a - F_rho)), which is strictly increasing
// there, so the least ambiguous subpopulation ends up with the smallest
// factor and therefore the earliest spikes. The complement form is the
// default; the literal form stays available as a reference behavior.
inline double adta_factor(int n_act, int n_total, const SimConfig& config) {
  if (n_act <= 0 || n_act > n_total)
    throw Error("adta_factor: need 0 < n_act <= n_total");
  const double active_fraction = static_cast<double>(n_act) / n_total;
  const double target_fraction = static_cast<double>(config.rho) / n_total;
  const double gamma =
      active_fraction >= target_fraction ? config.gamma_plus : config.gamma_minus;
  const double exponential = std::exp(gamma * (active_fraction - target_fraction));
  const double factor = config.adta_mode == AdtaMode::literal
                            ? exponential * config.lambda_a
                            : 1.0 - config.lambda_a * exponential;
  if (!(factor > 0.0 && factor <= 1.0))
    throw ConfigError("adta_factor: factor " + std::to_string(factor) +
                      " outside (0,1]; adjust lambda_a/gamma");
  return factor;
}

// Ambiguity update, applied once after the measurement replay of a
// disambiguation run: every spiking subpopulation strictly below the
// maximum active fraction is scaled by its ADTA factor. Subpopulations at
// the maximum stay untouched, so the shared trunk of the environments does
// not collapse. If all active fractions are equal there is nothing to
// single out and no update happens.
inline std::pair<ThetaState, AdaptationReport> apply_adta(const ThetaState& thetas,
                                                          const ReplayTrace& trace,
                                                          const SimConfig& config) {
  ThetaState next = thetas;
  AdaptationReport report;
  int max_active = 0;
  for (const PopulationActivity& activity : trace.populations)
    max_active = std::max(max_active, static_cast<int>(activity.spiked.size()));
  if (max_active == 0) return {std::move(next), std::move(report)};

  for (std::size_t pop = 0; pop < trace.populations.size(); ++pop) {
    const int n_act = static_cast<int>(trace.populations[pop].spiked.size());
    if (n_act == 0 || n_act >= max_active) continue;
    AdaptationReport::Row row;
    row.population = static_cast<int>(pop);
    row.theta_before = next.theta[pop];
    row.rule = AdaptationRule::adta;
    row.n_act = n_act;
    row.factor = adta_factor(n_act, config.N, config);
    next.theta[pop] *= row.factor;
    row.theta_after = next.theta[pop];
    report.rows.push_back(std::move(row));
  }
  return {std::move(next), std::move(report)};
}

// Ambiguity of a symbol: the number of environments whose sequences
// contain it.
inline int ambiguity(const EnvironmentSet& envs, int symbol) {
  if (symbol < 0 || symbol >= envs.num_symbols())
    throw Error("ambiguity: unknown symbol index " + std::to_string(symbol));
  int count = 0;
  for (const Environment& env : envs.environments) {
    bool found = false;
    for (const auto& seq : env.sequences) {
      if (std::find(seq.begin(), seq.end(), symbol) != seq.end()) {
        found = true;
        break;
      }
    }
    if (found) ++count;
  }
  return count;
}

// Expected distinct active neurons of a subpopulation with ambiguity
// `alpha` during an unadapted measurement replay.
inline int expected_active(int alpha, const SimConfig& config) {
  if (alpha < 1) throw Error("expected_active: alpha must be >= 1");
  return alpha * config.rho;
}

}  // namespace spikeplan
