#pragma once

#include <chrono>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "spikeplan/io.hpp"
#include "spikeplan/oracle.hpp"
#include "spikeplan/planner.hpp"

namespace spikeplan {

namespace detail {

struct PreparedRun {
  EnvironmentSet envs;
  SimConfig config;
  Network network;
  int start = -1;
  int target = -1;  // -1 in disambiguation mode
};

inline PreparedRun prepare_run(const RunManifest& manifest) {
  PreparedRun run;
  run.envs = load_environments(manifest.environment_paths);
  run.config = load_config(manifest.config_path);
  if (manifest.has_seed_override) run.config.seed = manifest.seed_override;
  run.network = build_network(run.envs, run.config);
  run.start = run.envs.symbols.require(manifest.start);
  if (manifest.mode == PlanMode::path_planning)
    run.target = run.envs.symbols.require(manifest.target);
  return run;
}

inline std::string path_names(const std::vector<int>& path, const SymbolTable& symbols) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += " -> ";
    out += symbols.name(path[i]);
  }
  return out;
}

inline void write_artifacts(const RunManifest& manifest, const PreparedRun& run,
                            const PlanResult& result) {
  if (manifest.out_dir.empty()) return;
  std::filesystem::create_directories(manifest.out_dir);

  json summary;
  summary["mode"] = manifest.mode == PlanMode::path_planning ? "plan" : "disambiguate";
  summary["start"] = run.envs.symbols.name(run.start);
  if (result.target >= 0) summary["target"] = run.envs.symbols.name(result.target);
  json path = json::array();
  for (int symbol : result.path) path.push_back(run.envs.symbols.name(symbol));
  summary["path"] = std::move(path);
  summary["replays_used"] = result.replays_used;
  summary["converged"] = result.converged;
  if (manifest.mode == PlanMode::disambiguation) {
    json alpha;
    for (int s = 0; s < run.envs.num_symbols(); ++s)
      alpha[run.envs.symbols.name(s)] = ambiguity(run.envs, s);
    summary["alpha"] = std::move(alpha);
  }
  write_file(manifest.out_dir / "summary.json", summary.dump(2) + "\n");
  write_file(manifest.out_dir / "raster.csv", raster_csv(result.traces, run.envs.symbols.names));
  write_file(manifest.out_dir / "theta.csv", theta_csv(result, run.envs.symbols.names));
}

}  // namespace detail

// `plan`: run path planning, print the outcome, write summary/raster/theta
// artifacts. Exit 0 only on convergence.
inline int run_plan(const RunManifest& manifest, std::ostream& out, std::ostream& err) {
  try {
    detail::PreparedRun run = detail::prepare_run(manifest);
    const PlanResult result = plan_path(run.network, run.start, run.target, run.config);
    detail::write_artifacts(manifest, run, result);
    out << "path: " << detail::path_names(result.path, run.envs.symbols) << "\n";
    out << "replays_used: " << result.replays_used << "\n";
    out << "converged: " << (result.converged ? "true" : "false") << "\n";
    if (!result.converged) {
      err << "plan did not converge within " << run.config.max_replays << " replays\n";
      return 1;
    }
    return 0;
  } catch (const Error& e) {
    err << "plan failed: " << e.what() << "\n";
    return 1;
  }
}

// `disambiguate`: run place disambiguation; also prints the chosen target
// and the per-symbol ambiguity table.
inline int run_disambiguate(const RunManifest& manifest, std::ostream& out, std::ostream& err) {
  try {
    detail::PreparedRun run = detail::prepare_run(manifest);
    const PlanResult result = disambiguate(run.network, run.start, run.config);
    detail::write_artifacts(manifest, run, result);
    out << "target: "
        << (result.target >= 0 ? run.envs.symbols.name(result.target) : std::string("-")) << "\n";
    out << "path: " << detail::path_names(result.path, run.envs.symbols) << "\n";
    out << "replays_used: " << result.replays_used << "\n";
    out << "converged: " << (result.converged ? "true" : "false") << "\n";
    out << "ambiguity:";
    for (int s = 0; s < run.envs.num_symbols(); ++s)
      out << " " << run.envs.symbols.name(s) << "=" << ambiguity(run.envs, s);
    out << "\n";
    if (!result.converged) {
      err << "disambiguation did not converge within " << run.config.max_replays << " replays\n";
      return 1;
    }
    return 0;
  } catch (const Error& e) {
    err << "disambiguate failed: " << e.what() << "\n";
    return 1;
  }
}

// `verify`: run the planner and the classical oracle on the same manifest
// and compare their answers. Exit 0 only on a match.
inline int run_verify(const RunManifest& manifest, std::ostream& out, std::ostream& err) {
  try {
    detail::PreparedRun run = detail::prepare_run(manifest);
    if (manifest.mode == PlanMode::path_planning) {
      const PlanResult result = plan_path(run.network, run.start, run.target, run.config);
      if (!result.converged) {
        err << "verify: planner did not converge within " << run.config.max_replays
            << " replays\n";
        return 1;
      }
      const std::vector<int> reference =
          bfs_shortest_path(symbol_graph(run.envs), run.start, run.target);
      out << "planner: " << detail::path_names(result.path, run.envs.symbols) << "\n";
      out << "oracle:  " << detail::path_names(reference, run.envs.symbols) << "\n";
      if (result.path != reference) {
        err << "verify: planner path differs from the BFS oracle\n";
        return 1;
      }
      out << "match\n";
      return 0;
    }
    const PlanResult result = disambiguate(run.network, run.start, run.config);
    if (!result.converged) {
      err << "verify: planner did not converge within " << run.config.max_replays << " replays\n";
      return 1;
    }
    const int reference = ambiguity_target(run.envs, run.start, manifest.oracle_mode);
    out << "planner: "
        << (result.target >= 0 ? run.envs.symbols.name(result.target) : std::string("-")) << "\n";
    out << "oracle:  " << run.envs.symbols.name(reference) << "\n";
    if (result.target != reference) {
      err << "verify: chosen target differs from the ambiguity oracle\n";
      return 1;
    }
    out << "match\n";
    return 0;
  } catch (const Error& e) {
    err << "verify failed: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace spikeplan
