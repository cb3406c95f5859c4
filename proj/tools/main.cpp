// chainsim: reproducible experiment runner for chirally coupled atom chains.
// simulate <config>   run an experiment described by a JSON file
// preset <name>       run a built-in experiment (list-presets shows them)
// validate <config>   parse and check a config without running it
// Exit codes: 0 success, 2 config error, 3 at least one sweep point failed.

#include <CLI11.hpp>
#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "chiralchain/experiments.hpp"

namespace {

int run_and_report(const chiralchain::ExperimentConfig& config) {
  const chiralchain::ExperimentResult result = chiralchain::run(config);
  std::cout << "hash " << result.config_hash << ": " << result.records.size() << " records, "
            << result.failures << " failures -> " << config.output_dir << "\n";
  return result.failures > 0 ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"excitation transport, reflection, and trapping in chirally coupled atom chains"};
  app.require_subcommand(1);

  std::string config_file;
  CLI::App* simulate = app.add_subcommand("simulate", "run an experiment from a JSON config file");
  simulate->add_option("config", config_file, "experiment description (JSON)")->required();

  std::string preset_name;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  CLI::App* preset = app.add_subcommand("preset", "run a named built-in experiment");
  preset->add_option("name", preset_name, "preset name (see list-presets)")->required();
  CLI::Option* out_opt = preset->add_option("--out", out_dir, "output directory");
  CLI::Option* seed_opt = preset->add_option("--seed", seed, "base seed for disorder ensembles");
  CLI::Option* threads_opt =
      preset->add_option("--threads", threads, "worker threads (0 = all hardware threads)");

  CLI::App* list = app.add_subcommand("list-presets", "list built-in experiments");

  std::string validate_file;
  CLI::App* validate = app.add_subcommand("validate", "check a config file without running it");
  validate->add_option("config", validate_file, "experiment description (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (simulate->parsed()) {
      return run_and_report(chiralchain::load_config(config_file));
    }
    if (preset->parsed()) {
      chiralchain::ExperimentConfig config = chiralchain::preset_config(preset_name);
      if (*out_opt) config.output_dir = out_dir;
      if (*seed_opt) config.seed = seed;
      if (*threads_opt) config.threads = threads;
      return run_and_report(config);
    }
    if (list->parsed()) {
      for (const chiralchain::PresetInfo& info : chiralchain::presets())
        std::cout << info.name << "\t" << info.description << "\n";
      return 0;
    }
    if (validate->parsed()) {
      const chiralchain::ExperimentConfig config = chiralchain::load_config(validate_file);
      std::cout << "ok: " << (config.name.empty() ? "(unnamed)" : config.name) << ", hash "
                << chiralchain::config_hash(config) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
