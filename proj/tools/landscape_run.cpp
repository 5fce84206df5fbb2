#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "landscape/cli/runner.hpp"
#include "landscape/errors.hpp"

int main(int argc, char** argv) {
  using namespace landscape::cli;
  CLI::App app{"Monte Carlo laboratory for the random landscape function"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  app.add_option("--config", config_path, "YAML experiment config")->check(CLI::ExistingFile);
  app.add_option("--workers", workers, "worker threads (overrides the config)");
  app.add_option("--seed", seed, "master seed (overrides the config)");
  app.add_option("--output", output, "output directory (overrides the config)");
  app.fallthrough();  // inherited by subcommands: global flags may follow the subcommand
  for (const auto& name : subcommands()) app.add_subcommand(name, "run " + name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  ExperimentConfig config;
  try {
    if (!config_path.empty()) config = load_config(config_path);
  } catch (const landscape::ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitValidation;
  }
  if (config_path.empty()) config.experiment = sub;
  if (workers) config.workers = *workers;
  if (seed) config.master_seed = *seed;
  if (output) config.output_dir = *output;

  const RunOutcome out = run(sub, config);
  std::cout << sub << ": " << out.status;
  if (!out.message.empty()) std::cout << " (" << out.message << ")";
  std::cout << "\n";
  for (const auto& p : out.manifest.predicates)
    std::cout << "  " << (p.pass ? "PASS " : "FAIL ") << p.name << " value=" << p.value << " threshold=" << p.threshold
              << "\n";
  if (!out.manifest.files.empty()) std::cout << "outputs in " << config.output_dir << "\n";
  return out.exit_code;
}
