// gtp <subcommand> --config <path> [--out <dir>] [--seed <u64>]
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gtp/config.hpp"
#include "gtp/errors.hpp"
#include "gtp/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Game-theoretic p-Laplacian heat asymptotics"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  for (const auto& name : gtp::experiment_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "config file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "random seed");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : gtp::kExitConfig;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  try {
    gtp::ExperimentConfig cfg = gtp::load_config(config_path);
    if (!cfg.experiment.empty() && cfg.experiment != name)
      throw gtp::ConfigError("config declares experiment '" + cfg.experiment + "' but '" + name + "' was requested",
                             cfg.line_of(".experiment"));
    cfg.experiment = name;
    if (out_dir) cfg.out_dir = *out_dir;
    if (seed) cfg.seed = *seed;
    return gtp::run_and_write(cfg, std::cout);
  } catch (const gtp::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return gtp::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return gtp::kExitInternal;
  }
}
