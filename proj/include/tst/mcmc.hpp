#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "tst/ergm.hpp"
#include "tst/graph.hpp"
#include "tst/rng.hpp"

namespace tst {

class StateSpace;

struct ChainConfig {
  std::uint64_t burnin = 0;
  std::uint64_t thin = 1;
  std::uint64_t steps = 1;
  double heat = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Metropolis acceptance: log(u) < dq, u ~ U[0,1). Accepts with probability min(1, e^dq).
inline bool metropolis_accept(double dq, Rng& rng);

struct StepResult {
  Dyad dyad;
  StatVector delta;
  double dq = 0.0;
  bool accepted = false;
};

/// Single-site Metropolis chain with uniform dyad proposals; tracks its statistics.
class MetropolisChain {
 public:
  MetropolisChain(Graph g, const Theta& theta, const NodeAttributeTable& attrs, Rng rng);
  MetropolisChain(Graph, const Theta&, NodeAttributeTable&&, Rng) = delete;

  StepResult step();
  void advance(std::uint64_t steps) {
    for (std::uint64_t s = 0; s < steps; ++s) step();
  }

  const Graph& graph() const { return graph_; }
  const StatVector& current_stats() const { return stats_; }
  Rng& rng() { return rng_; }

 private:
  Graph graph_;
  std::array<double, stat_count> theta_;
  const NodeAttributeTable* attrs_;
  Rng rng_;
  StatVector stats_;
  std::vector<Dyad> dyads_;
};

/// One Metropolis step on g. The graph is updated in place when accepted.
StepResult metropolis_step(Graph& g, const Theta& theta, const NodeAttributeTable& attrs, Rng& rng);

/// `count` graphs from a chain at theta / heat, one every `thin` steps after `burnin`.
std::vector<Graph> sample_heated_seeds(const Theta& theta, const NodeAttributeTable& attrs,
                                       const ChainConfig& cfg, int count, Graph start = {});

/// Runs `steps` unthinned steps from `seed_graph`. Every step adds one occupancy to the
/// current state (the seed state included, so total grows by steps + 1); every accepted
/// move records a transition.
void run_recording_chain(const Graph& seed_graph, const Theta& theta, const NodeAttributeTable& attrs,
                         std::uint64_t steps, StateSpace& sink, Rng& rng);

struct RejectionConfig {
  std::uint64_t burnin = 160000;
  std::uint64_t thin = 10000;
  std::uint64_t batch = 500;
  std::uint64_t max_batches = 200;
};

using StatePredicate = std::function<bool(const StatVector&)>;

/// Thinned draws filtered by `target`, extended batch by batch until `count` are kept.
/// Throws budget_exhausted (with the acceptance rate) after max_batches.
std::vector<Graph> rejection_sample_state(const Theta& theta, const NodeAttributeTable& attrs,
                                          const StatePredicate& target, int count,
                                          const RejectionConfig& cfg, Graph start, Rng& rng);

inline bool metropolis_accept(double dq, Rng& rng) {
  if (dq >= 0.0) return true;
  return std::log(rng.uniform()) < dq;
}

}  // namespace tst
