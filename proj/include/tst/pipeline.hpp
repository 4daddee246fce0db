#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tst/analysis.hpp"
#include "tst/change_path.hpp"
#include "tst/config.hpp"
#include "tst/egp.hpp"
#include "tst/state_space.hpp"

namespace tst {

/// Worker count: TST_THREADS when set, else the configured value, else available parallelism.
int worker_count(int configured);

NodeAttributeTable model_attributes(const ModelConfig& m);
/// Every dyad whose endpoints share b1: the fully b1-aligned graph.
Graph b1_faction_graph(const NodeAttributeTable& a);

// Stage building blocks. Each writes plain CSV under `dir`.

/// Heated seeds, one recording chain per seed, merged in chain order and finalized.
StateSpace sample_states(const RunConfig& cfg, const NodeAttributeTable& attrs, int threads,
                         std::vector<Graph>* seeds_out = nullptr);

enum class StateRule { aligned_b1, aligned_b2 };
StateRule parse_state_rule(const std::string& s);
StateRecord pick_state(const StateSpace& space, StateRule rule, const ThresholdConfig& t);

void write_endpoints(const std::filesystem::path& file, const StateRecord& source, const StateRecord& target);
/// Returns {source, target} records read back from endpoints.csv.
std::pair<StateRecord, StateRecord> read_endpoints(const std::filesystem::path& file);

struct EgpRunResult {
  std::vector<Trajectory> trajectories;  // kind order, then seed order
  StateCatalog catalog;
};

/// Simulates `per_kind` trajectories (one per source graph) for every kind and assigns shared state ids.
EgpRunResult run_egps(const std::vector<EgpKind>& kinds, const std::vector<Graph>& sources, const StateSpace& space,
                      const StatVector& source, const StatVector& target, const Theta& theta,
                      const NodeAttributeTable& attrs, std::uint64_t seed, std::uint64_t event_budget, int threads);
void write_egp_run(const std::filesystem::path& dir, const EgpRunResult& run);
/// Catalog plus every trajectory file under dir, ordered by path.
EgpRunResult read_egp_run(const std::filesystem::path& dir);

struct AnalysisOutput {
  std::vector<PathRecord> paths;
  std::vector<std::vector<int>> pruned;  // state ids per trajectory
  std::vector<LengthSummary> lengths;
  struct Group {
    std::string egp;
    PathClass cls;
    AlignmentResult alignment;
    AlignedCurve mean;
  };
  std::vector<Group> groups;
};

AnalysisOutput analyze(const EgpRunResult& run, const std::vector<StatVector>& mspcp_stats,
                       const AlignOptions& align_opt);
void write_analysis(const std::filesystem::path& dir, const AnalysisOutput& out);

inline const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names{"sample", "states", "mspcp", "egp-run", "analyze"};
  return names;
}

struct PipelineOptions {
  bool force = false;
  std::optional<std::string> only_stage;
};

struct StageReport {
  std::string name;
  std::string status;  // ok, skipped or failed
  double seconds = 0.0;
  std::string error;
};

/// Runs the stages in order under cfg.output, skipping stages whose outputs already
/// exist for the same config hash. Writes manifest.json after every stage.
/// Returns 0 on success and 3 when a stage fails; config errors are thrown.
int run_pipeline(const RunConfig& cfg, const PipelineOptions& opt, std::vector<StageReport>* reports = nullptr);

}  // namespace tst
