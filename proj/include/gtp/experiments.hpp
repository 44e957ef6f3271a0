#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gtp/config.hpp"
#include "json.hpp"

namespace gtp {

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ExperimentOutcome {
  std::string name;
  std::vector<Check> checks;
  nlohmann::json data;
  std::string csv;
  // extra artifacts: file name -> bytes
  std::vector<std::pair<std::string, std::string>> files;
  bool pass() const;
};

enum ExitCode { kExitPass = 0, kExitConfig = 2, kExitTolerance = 3, kExitInternal = 4 };

// Validates and runs; throws ConfigError on bad input.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

// Runs and writes <name>.csv, <name>.json and summary.json under cfg.out_dir.
int run_and_write(const ExperimentConfig& cfg, std::ostream& log);

std::string git_revision();

}  // namespace gtp
