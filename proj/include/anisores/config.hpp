#ifndef ANISORES_CONFIG_HPP
#define ANISORES_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "anisores/common.hpp"

namespace anisores {

// Run configuration, parsed from an INI-like key = value format with one
// section per module. Unknown keys are rejected; all violations are collected
// (not first-failure).
struct RunConfig {
  // [run]
  std::string experiment = "partition-check";
  uint64_t seed = 1;
  std::string out_dir = "out";
  // [backend]
  std::string backend = "linear_cat";
  double eps = 0.0;
  double eps2 = 0.0;
  // [index]
  double s = -0.5, t = 0.5, q = 0.5, p = 2.0;
  // [partition]
  int chi_order = 3;
  int max_level = 7;
  int grid = 256;
  // [cones]
  double cone_halfwidth_deg = 15.0;
  double transition_width_deg = 5.0;
  // [transfer]
  int K = 16;
  long alpha = 1;
  // [horocycle]
  double cutoff_eps = 0.25;
  double t_max = 1000.0;
  int t_points = 24;
  // [tolerances]
  double margin_tol = 1e-6;
  double stability_tol = 1e-3;

  std::string serialize() const;
  uint64_t hash() const;  // FNV-1a over the canonical serialization
};

struct ConfigError {
  std::string key;
  std::string message;
};

// Parses and validates; on any violation throws InvalidParameter with all
// collected errors, or use the error-returning overload.
RunConfig parse_config(const std::string& text);
RunConfig parse_config(const std::string& text, std::vector<ConfigError>& errors);

RunConfig load_config_file(const std::string& path);

}  // namespace anisores

#endif
