#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cnslab/besov.hpp"
#include "cnslab/experiments.hpp"
#include "cnslab/solver.hpp"

namespace cnslab {

// Parse or validation failure; line is 0 for errors not tied to a line
// (including --set overrides).
class ConfigError : public Error {
 public:
  ConfigError(int line, const std::string& msg, std::string key = "");
  int line;
  std::string key;  // offending key when known, e.g. "material.mu"
  std::string detail;  // message without the location prefix
};

struct ProbeSettings {
  std::string name = "all";  // experiment selector for `probe`
  int d = 3;
  double p = 1;
  std::vector<double> k_list{-5, -4, -3, -2};
  std::vector<double> tau_list{4};
  int decay_n = 256;
  double decay_L = 300;
  double support_radius = 16;
  int wave_n = 128;
  double wave_L = 96;
  int trials = 20;
  int threads = 1;
};

struct RunConfig {
  GridSpec grid{3, 64, 2.0 * kPi};
  LameParams material;
  double kappa = 2.0;
  IndexPair pair{2, 4};
  std::optional<int> k0;
  double dt = 1e-3;
  double T = 1.0;
  bool dealias = true;
  std::string formulation = "velocity";
  int sample_stride = 10;
  int snapshot_stride = 0;
  double vacuum_guard = 0.1;
  bool linear_only = false;
  InitialDataSpec data;
  ProbeSettings probe;
  std::string out_dir = "out";
  unsigned seed = 1;

  // Throws ConfigError on the first violated constraint.
  void validate() const;
  SolverParams solver() const;
  SimConfig sim() const;
  Formulation form() const;
  // Canonical document with every key; parse(echo()) reproduces the config.
  std::string echo() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
// key is "section.key" (or "seed"); value uses document syntax.
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);
void apply_override(RunConfig& cfg, const std::string& assignment);  // "section.key=value"
std::vector<std::string> config_keys();

}  // namespace cnslab
