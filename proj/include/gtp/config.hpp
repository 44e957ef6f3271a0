#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gtp/geometry.hpp"
#include "gtp/specfun.hpp"

namespace gtp {

struct DomainSpec {
  std::string kind = "ball";  // half_space | ball | ellipse | superellipse
  double radius = 1.0;
  double a = 2.0;
  double b = 1.0;
  double m = 4.0;
  bool operator==(const DomainSpec&) const = default;
};

// Plain key = value text with [section] headers and '#' comments.
struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 12345;
  std::string out_dir = "out";

  DomainSpec domain;

  PExponent p = PExponent::finite(2.0);
  int N = 2;
  double R = 0.5;
  std::vector<double> center;     // empty: on the first axis, R from the boundary
  double pi_gamma = 1.0;          // used by `constants`
  std::vector<double> distances = {0.5};

  double t0 = 1e-2;
  double ratio = 0.5;
  int count = 7;

  std::vector<double> q = {1.5, 2.0, 3.0};  // inf allowed
  std::vector<double> eps = {0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001};

  double h = 1.0 / 64;
  double T = 0.05;
  double dt = 0.0;
  double data_low = 1.0;
  double data_high = 1.0;

  double tolerance = -1.0;  // negative: the experiment default

  // source line of each key as "section.key"; not part of equality
  std::map<std::string, int> lines;

  bool operator==(const ExperimentConfig& o) const;

  int line_of(const std::string& key) const;
  Domain build_domain() const;
  std::vector<double> t_grid() const;
  Point touching_center() const;
};

const std::vector<std::string>& experiment_names();

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);
std::string emit_config(const ExperimentConfig& cfg);
// Numeric constraints of the target modules; throws ConfigError.
void validate_config(const ExperimentConfig& cfg);

}  // namespace gtp
