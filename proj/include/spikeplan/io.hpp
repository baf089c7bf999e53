#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spikeplan/core.hpp"
#include "spikeplan/engine.hpp"
#include "spikeplan/oracle.hpp"
#include "spikeplan/planner.hpp"

namespace spikeplan {

using json = nlohmann::ordered_json;

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
}

inline std::string format_time(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return buffer;
}

inline std::string format_theta(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.9g", value);
  return buffer;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Environment files
//
// {"environments":[{"id":"env1","sequences":[["A","B","C","D"], ...]}, ...]}
// ---------------------------------------------------------------------------

inline std::vector<RawEnvironment> raw_environments_from_json(const json& j) {
  if (!j.is_object() || !j.contains("environments"))
    throw IoError("environment file: expected an object with an 'environments' array");
  for (const auto& [key, value] : j.items()) {
    if (key != "environments") throw IoError("environment file: unknown key '" + key + "'");
  }
  std::vector<RawEnvironment> raw;
  for (const json& je : j.at("environments")) {
    RawEnvironment env;
    for (const auto& [key, value] : je.items()) {
      if (key == "id") {
        env.id = value.get<std::string>();
      } else if (key == "sequences") {
        for (const json& js : value) env.sequences.push_back(js.get<std::vector<std::string>>());
      } else {
        throw IoError("environment file: unknown key '" + key + "'");
      }
    }
    if (env.id.empty()) throw IoError("environment file: environment without an 'id'");
    raw.push_back(std::move(env));
  }
  return raw;
}

inline json environments_to_json(const EnvironmentSet& envs) {
  json j;
  j["environments"] = json::array();
  for (const Environment& env : envs.environments) {
    json je;
    je["id"] = env.id;
    je["sequences"] = json::array();
    for (const auto& seq : env.sequences) {
      json js = json::array();
      for (int symbol : seq) js.push_back(envs.symbols.name(symbol));
      je["sequences"].push_back(std::move(js));
    }
    j["environments"].push_back(std::move(je));
  }
  return j;
}

// Loads one or more environment files and merges their environment lists
// in order; symbols are interned across the whole merged set.
inline EnvironmentSet load_environments(const std::vector<std::filesystem::path>& paths) {
  if (paths.empty()) throw IoError("no environment files given");
  std::vector<RawEnvironment> merged;
  for (const auto& path : paths) {
    json j;
    try {
      j = json::parse(detail::read_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw IoError("'" + path.string() + "': " + e.what());
    }
    for (RawEnvironment& env : raw_environments_from_json(j)) merged.push_back(std::move(env));
  }
  return build_environment_set(merged);
}

inline void save_environments(const EnvironmentSet& envs, const std::filesystem::path& path) {
  detail::write_file(path, environments_to_json(envs).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Config files (JSON or flat TOML); keys match the SimConfig field names
// exactly and unknown keys are rejected.
// ---------------------------------------------------------------------------

inline void apply_config_key(SimConfig& config, const std::string& key, const json& value) {
  try {
    if (key == "N") config.N = value.get<int>();
    else if (key == "rho") config.rho = value.get<int>();
    else if (key == "theta_init") config.theta_init = value.get<double>();
    else if (key == "lambda_target") config.lambda_target = value.get<double>();
    else if (key == "lambda_b") config.lambda_b = value.get<double>();
    else if (key == "lambda_a") config.lambda_a = value.get<double>();
    else if (key == "gamma_plus") config.gamma_plus = value.get<double>();
    else if (key == "gamma_minus") config.gamma_minus = value.get<double>();
    else if (key == "dt_min_b") config.dt_min_b = value.get<double>();
    else if (key == "dt_max_b") config.dt_max_b = value.get<double>();
    else if (key == "kappa") config.kappa = value.get<double>();
    else if (key == "d_syn") config.d_syn = value.get<double>();
    else if (key == "d_inh") config.d_inh = value.get<double>();
    else if (key == "w_inh") config.w_inh = value.get<double>();
    else if (key == "t_ref_inh") config.t_ref_inh = value.get<double>();
    else if (key == "w_coinc") config.w_coinc = value.get<double>();
    else if (key == "adta_mode") config.adta_mode = adta_mode_from_string(value.get<std::string>());
    else if (key == "max_replays") config.max_replays = value.get<int>();
    else if (key == "seed") config.seed = value.get<std::uint64_t>();
    else throw IoError("config: unknown key '" + key + "'");
  } catch (const nlohmann::json::exception& e) {
    throw IoError("config: bad value for '" + key + "': " + e.what());
  }
}

inline SimConfig config_from_json(const json& j) {
  if (!j.is_object()) throw IoError("config: expected a JSON object");
  SimConfig config;
  for (const auto& [key, value] : j.items()) apply_config_key(config, key, value);
  return validate_config(config);
}

inline json config_to_json(const SimConfig& c) {
  json j;
  j["N"] = c.N;
  j["rho"] = c.rho;
  j["theta_init"] = c.theta_init;
  j["lambda_target"] = c.lambda_target;
  j["lambda_b"] = c.lambda_b;
  j["lambda_a"] = c.lambda_a;
  j["gamma_plus"] = c.gamma_plus;
  j["gamma_minus"] = c.gamma_minus;
  j["dt_min_b"] = c.dt_min_b;
  j["dt_max_b"] = c.dt_max_b;
  j["kappa"] = c.kappa;
  j["d_syn"] = c.d_syn;
  j["d_inh"] = c.d_inh;
  j["w_inh"] = c.w_inh;
  j["t_ref_inh"] = c.t_ref_inh;
  j["w_coinc"] = c.w_coinc;
  j["adta_mode"] = to_string(c.adta_mode);
  j["max_replays"] = c.max_replays;
  j["seed"] = c.seed;
  return j;
}

// Flat TOML: `key = value` lines, `#` comments, quoted strings, numbers,
// booleans. Tables/arrays are rejected; the config format is flat anyway.
inline SimConfig config_from_toml(const std::string& text) {
  SimConfig config;
  std::istringstream in(text);
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string stripped;
    bool in_string = false;
    for (char ch : line) {
      if (ch == '"') in_string = !in_string;
      if (ch == '#' && !in_string) break;
      stripped.push_back(ch);
    }
    auto trim = [](std::string s) {
      const auto begin = s.find_first_not_of(" \t\r");
      if (begin == std::string::npos) return std::string();
      const auto end = s.find_last_not_of(" \t\r");
      return s.substr(begin, end - begin + 1);
    };
    stripped = trim(stripped);
    if (stripped.empty()) continue;
    if (stripped.front() == '[')
      throw IoError("config: TOML tables are not supported (line " +
                    std::to_string(line_number) + ")");
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw IoError("config: expected 'key = value' (line " + std::to_string(line_number) + ")");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty())
      throw IoError("config: expected 'key = value' (line " + std::to_string(line_number) + ")");

    json jvalue;
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      jvalue = value.substr(1, value.size() - 2);
    } else if (value == "true" || value == "false") {
      jvalue = (value == "true");
    } else {
      try {
        std::size_t used = 0;
        if (value.find_first_of(".eE") == std::string::npos) {
          jvalue = std::stoll(value, &used);
        } else {
          jvalue = std::stod(value, &used);
        }
        if (used != value.size()) throw std::invalid_argument(value);
      } catch (const std::exception&) {
        throw IoError("config: cannot parse value '" + value + "' (line " +
                      std::to_string(line_number) + ")");
      }
    }
    apply_config_key(config, key, jvalue);
  }
  return validate_config(config);
}

inline SimConfig load_config(const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  if (path.extension() == ".toml") return config_from_toml(text);
  try {
    return config_from_json(json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("'" + path.string() + "': " + e.what());
  }
}

inline void save_config(const SimConfig& config, const std::filesystem::path& path) {
  detail::write_file(path, config_to_json(config).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// CSV exports
// ---------------------------------------------------------------------------

// Spike raster over all replays of a run. Events carry the population
// label and neuron index where they have one; the global inhibitory unit
// and the local relays leave the neuron column empty.
inline std::string raster_csv(const std::vector<ReplayTrace>& traces,
                              const std::vector<std::string>& names) {
  std::string out = "replay,time_ms,population,neuron,event\n";
  for (std::size_t r = 0; r < traces.size(); ++r) {
    for (const Event& event : traces[r].events) {
      out += std::to_string(r + 1);
      out += ',';
      out += detail::format_time(event.time);
      out += ',';
      if (event.population >= 0) out += names[static_cast<std::size_t>(event.population)];
      out += ',';
      if (event.neuron >= 0) out += std::to_string(event.neuron);
      out += ',';
      out += event_name(event.kind);
      out += '\n';
    }
  }
  return out;
}

// Threshold trace: initial values at replay 0 followed by one row per
// adaptation, tagged with the replay the update was applied after.
inline std::string theta_csv(const PlanResult& result, const std::vector<std::string>& names) {
  std::string out = "replay,population,theta,rule\n";
  for (const std::string& name : names) {
    out += "0," + name + "," + detail::format_theta(result.initial_theta) + ",init\n";
  }
  for (const auto& [replay, report] : result.reports) {
    for (const AdaptationReport::Row& row : report.rows) {
      out += std::to_string(replay);
      out += ',';
      out += names[static_cast<std::size_t>(row.population)];
      out += ',';
      out += detail::format_theta(row.theta_after);
      out += ',';
      out += rule_name(row.rule);
      out += '\n';
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Run manifests
// ---------------------------------------------------------------------------

struct RunManifest {
  PlanMode mode = PlanMode::path_planning;
  std::filesystem::path config_path;
  std::vector<std::filesystem::path> environment_paths;
  std::string start;
  std::string target;                       // plan mode only
  std::filesystem::path out_dir;            // empty: no artifacts
  TargetMode oracle_mode = TargetMode::nearest_reduced;  // verify, disambiguate
  bool has_seed_override = false;
  std::uint64_t seed_override = 0;
};

inline RunManifest manifest_from_json(const json& j, const std::filesystem::path& base_dir) {
  RunManifest manifest;
  bool saw_mode = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "mode") {
      const std::string mode = value.get<std::string>();
      if (mode == "plan") manifest.mode = PlanMode::path_planning;
      else if (mode == "disambiguate") manifest.mode = PlanMode::disambiguation;
      else throw IoError("manifest: mode must be 'plan' or 'disambiguate', got '" + mode + "'");
      saw_mode = true;
    } else if (key == "config") {
      manifest.config_path = base_dir / value.get<std::string>();
    } else if (key == "environments") {
      for (const json& je : value)
        manifest.environment_paths.push_back(base_dir / je.get<std::string>());
    } else if (key == "start") {
      manifest.start = value.get<std::string>();
    } else if (key == "target") {
      manifest.target = value.get<std::string>();
    } else if (key == "out") {
      manifest.out_dir = base_dir / value.get<std::string>();
    } else if (key == "oracle_mode") {
      const std::string mode = value.get<std::string>();
      if (mode == "nearest_reduced") manifest.oracle_mode = TargetMode::nearest_reduced;
      else if (mode == "global_min") manifest.oracle_mode = TargetMode::global_min;
      else throw IoError("manifest: unknown oracle_mode '" + mode + "'");
    } else if (key == "seed") {
      manifest.has_seed_override = true;
      manifest.seed_override = value.get<std::uint64_t>();
    } else {
      throw IoError("manifest: unknown key '" + key + "'");
    }
  }
  if (!saw_mode) throw IoError("manifest: missing 'mode'");
  if (manifest.config_path.empty()) throw IoError("manifest: missing 'config'");
  if (manifest.environment_paths.empty()) throw IoError("manifest: missing 'environments'");
  if (manifest.start.empty()) throw IoError("manifest: missing 'start'");
  if (manifest.mode == PlanMode::path_planning && manifest.target.empty())
    throw IoError("manifest: plan mode needs a 'target'");
  return manifest;
}

inline RunManifest load_manifest(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(detail::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("'" + path.string() + "': " + e.what());
  }
  return manifest_from_json(j, path.parent_path());
}

}  // namespace spikeplan
