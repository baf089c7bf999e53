// Command-line front end: loads environment and config files, runs the
// planner, and exports spike rasters and threshold traces as CSV.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <spikeplan/cli.hpp>

namespace {

struct CommonArgs {
  std::vector<std::string> env_files;
  std::string config_file;
  std::string start;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool has_seed = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--env", args.env_files, "environment file (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--config", args.config_file, "config file (JSON or TOML)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--start", args.start, "start symbol")->required();
  cmd->add_option("--out", args.out_dir, "output directory for summary/raster/theta files");
  cmd->add_option("--seed", args.seed, "override the config seed")
      ->each([&args](const std::string&) { args.has_seed = true; });
}

spikeplan::RunManifest to_manifest(const CommonArgs& args, spikeplan::PlanMode mode,
                                   const std::string& target) {
  spikeplan::RunManifest manifest;
  manifest.mode = mode;
  manifest.config_path = args.config_file;
  for (const std::string& env : args.env_files) manifest.environment_paths.emplace_back(env);
  manifest.start = args.start;
  manifest.target = target;
  manifest.out_dir = args.out_dir;
  manifest.has_seed_override = args.has_seed;
  manifest.seed_override = args.seed;
  return manifest;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Replay-based shortest path planning and place disambiguation "
               "on spiking subpopulation graphs"};
  app.require_subcommand(1);

  CommonArgs plan_args;
  std::string plan_target;
  CLI::App* plan = app.add_subcommand("plan", "shortest path to a given target");
  add_common(plan, plan_args);
  plan->add_option("--target", plan_target, "target symbol")->required();

  CommonArgs dis_args;
  CLI::App* dis = app.add_subcommand("disambiguate", "find a low-ambiguity target place");
  add_common(dis, dis_args);

  std::string manifest_file;
  std::uint64_t verify_seed = 0;
  bool verify_has_seed = false;
  CLI::App* verify = app.add_subcommand("verify", "cross-check the planner against the oracle");
  verify->add_option("manifest", manifest_file, "run manifest (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  verify->add_option("--seed", verify_seed, "override the config seed")
      ->each([&verify_has_seed](const std::string&) { verify_has_seed = true; });

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan->parsed()) {
      return spikeplan::run_plan(to_manifest(plan_args, spikeplan::PlanMode::path_planning,
                                             plan_target),
                                 std::cout, std::cerr);
    }
    if (dis->parsed()) {
      return spikeplan::run_disambiguate(
          to_manifest(dis_args, spikeplan::PlanMode::disambiguation, ""), std::cout, std::cerr);
    }
    spikeplan::RunManifest manifest = spikeplan::load_manifest(manifest_file);
    if (verify_has_seed) {
      manifest.has_seed_override = true;
      manifest.seed_override = verify_seed;
    }
    return spikeplan::run_verify(manifest, std::cout, std::cerr);
  } catch (const spikeplan::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
