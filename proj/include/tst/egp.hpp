#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tst/ergm.hpp"
#include "tst/error.hpp"
#include "tst/graph.hpp"
#include "tst/kernels.hpp"
#include "tst/rng.hpp"

namespace tst {

class StateSpace;

struct EgpKind {
  EgpVariant variant = EgpVariant::lergm;
  double nu = 0.5;  // constant-rate parameter of the CSTERGM variants

  std::string name() const;
  static EgpKind parse(const std::string& name, double nu = 0.5);
};

/// Toggle rate for a move changing the potential by dq. Every law satisfies
/// rate(dq, adding) / rate(-dq, !adding) = e^dq.
///   LERGM      e^dq / (1 + e^dq)
///   CI         min(1, e^dq)
///   CDCSTERGM  nu e^dq when adding, nu when removing
///   CFCSTERGM  nu when adding, nu e^dq when removing
double move_rate(const EgpKind& kind, double dq, bool adding);

struct TrajectoryEvent {
  double time = 0.0;
  Dyad dyad;
  StatVector stats;
  int state_id = -1;
};

struct Trajectory {
  EgpKind kind;
  std::uint64_t seed = 0;
  int source_id = -1;
  int target_id = -1;
  double t0 = 0.0;
  StatVector seed_stats;
  int seed_state = -1;
  std::vector<TrajectoryEvent> events;
  std::uint64_t simulated_events = 0;  // including discarded returns to the source
  Graph start_graph;                   // the graph at t0, for replaying events

  /// Seed state followed by the state after each event.
  std::vector<StatVector> state_stats() const;
  std::vector<int> state_ids() const;
  std::size_t walk_length() const { return events.size(); }
};

/// Non-negative rates grouped in blocks of 16 with cached block sums. Sums are
/// recomputed from the leaves in a fixed order on refresh(), so totals never drift
/// and do not depend on the order of updates.
class RateTable {
 public:
  static constexpr std::size_t block = 16;

  explicit RateTable(std::size_t size = 0);

  void set(std::size_t index, double rate) {
    leaf_[index] = rate;
    dirty_[index / block] = 1;
  }
  void refresh();

  double total() const { return total_; }
  double rate(std::size_t index) const { return leaf_[index]; }
  std::size_t size() const { return size_; }
  /// Index whose cumulative interval contains u, for u in [0, total()); never a zero-rate index
  /// unless all rates are zero.
  std::size_t select(double u) const;

 private:
  std::size_t size_ = 0;
  std::vector<double> leaf_;
  std::vector<double> sum_;
  std::vector<char> dirty_;
  double total_ = 0.0;
};

/// Exact continuous-time simulation over single-dyad toggles. After each event only
/// the dyads touching the toggled pair change rate; those are re-evaluated in one
/// batch through the active kernel table.
class EgpSimulator {
 public:
  EgpSimulator(const EgpKind& kind, Graph g, const Theta& theta, const NodeAttributeTable& attrs, Rng rng,
               const kernels::KernelTable& table = kernels::active());
  // The attribute table is referenced, not copied.
  EgpSimulator(const EgpKind&, Graph, const Theta&, NodeAttributeTable&&, Rng,
               const kernels::KernelTable& = kernels::active()) = delete;

  /// Draws the next event and applies it.
  TrajectoryEvent step();
  double total_rate() const { return rates_.total(); }
  double rate(std::size_t dyad_index) const { return rates_.rate(dyad_index); }
  /// All C(n,2) rates evaluated from scratch, for cross-checks.
  std::vector<double> recompute_rates() const;
  double time() const { return time_; }
  const Graph& graph() const { return graph_; }
  const StatVector& current_stats() const { return stats_; }
  Rng& rng() { return rng_; }

 private:
  void evaluate(const std::size_t* indices, std::size_t count);

  EgpKind kind_;
  Graph graph_;
  std::array<double, stat_count> theta_;
  const NodeAttributeTable* attrs_;
  Rng rng_;
  const kernels::KernelTable* table_;
  StatVector stats_;
  double time_ = 0.0;
  std::vector<Dyad> dyads_;
  std::vector<std::vector<std::size_t>> incident_;  // dyad indices touching each node
  RateTable rates_;

  // Batch scratch, structure-of-arrays.
  std::vector<std::size_t> batch_;
  std::vector<std::int32_t> end_i_, end_j_;
  std::array<std::vector<std::int32_t>, stat_count> cols_;
  std::vector<double> dq_;
  std::vector<double> out_;
};

using StopRule = std::function<bool(const StatVector& state, double time)>;

/// Simulates from g0 until stop(state, time) holds; throws budget_exhausted after max_events.
Trajectory simulate(const EgpKind& kind, const Graph& g0, const Theta& theta, const NodeAttributeTable& attrs,
                    const StopRule& stop, Rng& rng, std::uint64_t max_events = 100'000'000);

class TrajectoryBudgetError : public Error {
 public:
  TrajectoryBudgetError(const std::string& what, Trajectory partial)
      : Error(ErrorKind::budget_exhausted, what), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

struct TargetRunConfig {
  int per_seed = 1;
  std::uint64_t max_events = 1'000'000'000;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Runs each seed forward until it reaches the target state. A return to the source
/// discards everything recorded so far, so each result starts in the source, never
/// revisits it, and ends in the target. Trajectory k uses RNG stream (seed, k).
std::vector<Trajectory> simulate_until_target(const EgpKind& kind, const std::vector<Graph>& seeds,
                                              const StatVector& source, const StatVector& target,
                                              const Theta& theta, const NodeAttributeTable& attrs,
                                              const TargetRunConfig& cfg);

/// The truncation rule on its own: keeps the suffix after the last visit to `source`.
std::vector<int> truncate_at_source(const std::vector<int>& states, int source);

/// State ids shared by trajectories: ids of a state space first, then new states in
/// the order they are registered.
class StateCatalog {
 public:
  StateCatalog() = default;
  explicit StateCatalog(const StateSpace& space);

  int id_of(const StatVector& s);
  int find(const StatVector& s) const;
  std::size_t size() const { return stats_.size(); }
  const StatVector& stats(int id) const { return stats_[static_cast<std::size_t>(id)]; }
  /// Potential of a state; valid after set_potentials() or read_catalog().
  double q(int id) const { return q_[static_cast<std::size_t>(id)]; }
  void set_potentials(const Theta& theta);
  /// Ids below this came from the state space.
  std::size_t known() const { return known_; }

  /// Assigns ids to every event, in trajectory then event order.
  void assign(std::vector<Trajectory>& trajectories);

 private:
  std::unordered_map<StatVector, int, StatVectorHash> index_;
  std::vector<StatVector> stats_;
  std::vector<double> q_;
  std::size_t known_ = 0;

  friend StateCatalog read_catalog(const std::filesystem::path& file);
};

/// Header lines "# key=value" for kind, nu, seed, source_id, target_id, t0, seed_state,
/// simulated_events, n and start_edges (space separated i-j pairs), then rows time,i,j,state_id.
void write_trajectory(const std::filesystem::path& file, const Trajectory& t);
Trajectory read_trajectory(const std::filesystem::path& file, const StateCatalog& catalog);

/// id,t_e..t_d2,q,known for every catalogued state; call set_potentials() first.
void write_catalog(const std::filesystem::path& file, const StateCatalog& catalog);
StateCatalog read_catalog(const std::filesystem::path& file);

}  // namespace tst
