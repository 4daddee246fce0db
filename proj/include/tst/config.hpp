#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tst/ergm.hpp"
#include "tst/mcmc.hpp"

namespace tst {

inline constexpr int config_schema = 1;

struct ModelConfig {
  int n = 20;
  std::string attributes_file;  // empty: balanced faction design
  Theta theta = faction_theta;
};

struct SamplingConfig {
  int chains = 100;
  std::uint64_t steps = 10'000'000;
  std::uint64_t burnin = 100'000;
  std::uint64_t thin = 100'000;
  double heat = 10.0;
  std::uint64_t seed = 1;
};

struct ThresholdConfig {
  int hi = 80;
  int lo = 50;
};

struct EgpConfig {
  std::vector<std::string> kinds{"lergm", "ci", "cdcstergm", "cfcstergm"};
  double nu = 0.5;
  int trajectories = 20;
  std::uint64_t event_budget = 1'000'000'000;
  std::uint64_t seed = 2;
  RejectionConfig rejection;
};

struct AnalysisConfig {
  int grid = 201;
  int knots = 9;
  int window = 1;  // moving-median window for MSPCP milestones
};

/// Everything a pipeline run depends on. `output` and `threads` do not change
/// results and are left out of the hash.
struct RunConfig {
  int schema = config_schema;
  ModelConfig model;
  SamplingConfig sampling;
  ThresholdConfig thresholds;
  EgpConfig egp;
  AnalysisConfig analysis;
  std::string output = "run";
  int threads = 0;  // 0: available parallelism

  void validate() const;
  /// Full sampling protocol (at least 100 chains of 10^7 steps).
  bool full_scale() const;
  std::uint64_t hash() const;

  friend bool operator==(const RunConfig&, const RunConfig&);
};

/// JSON text. Unknown keys, missing schema or a different schema version are config errors;
/// omitted fields keep their defaults.
RunConfig parse_config(const std::string& text);
std::string to_json(const RunConfig& cfg);
RunConfig load_config(const std::filesystem::path& file);
void save_config(const std::filesystem::path& file, const RunConfig& cfg);

}  // namespace tst
