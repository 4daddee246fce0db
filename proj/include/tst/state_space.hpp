#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tst/ergm.hpp"

namespace tst {

struct StateRecord {
  int id = 0;
  StatVector stats;
  std::uint64_t count = 0;
  double q = 0.0;
  double logp = 0.0;
};

/// Sampled states keyed by exact statistic vector, with dense ids in first-visit
/// order, occupancy counts, and the symmetric set of observed transitions.
class StateSpace {
 public:
  /// Adds `count` occupancy to the state, creating it if new. Returns its id.
  int accumulate(const StatVector& s, std::uint64_t count = 1);
  void add_count(int id, std::uint64_t count = 1);

  /// Symmetric, idempotent; self-transitions are ignored.
  void record_transition(const StatVector& s, const StatVector& s2);
  void record_transition(int a, int b);
  bool has_transition(int a, int b) const;

  /// Folds `other` in, assigning new ids in `other`'s id order. Associative.
  void merge(const StateSpace& other);

  /// Sets q from theta and logp = log(count) - log(total) for every state.
  void finalize(const Theta& theta);
  bool finalized() const { return finalized_; }

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  std::uint64_t total() const { return total_; }
  const StateRecord& record(int id) const { return records_[static_cast<std::size_t>(id)]; }
  const std::vector<StateRecord>& records() const { return records_; }
  /// -1 when absent.
  int find(const StatVector& s) const;

  std::size_t transition_count() const { return transitions_.size(); }
  /// Undirected transitions as (lo, hi) id pairs, sorted.
  std::vector<std::pair<int, int>> transitions() const;
  /// Sorted neighbor ids; built on first use after the last mutation.
  std::span<const int> neighbors(int id) const;
  double mean_degree() const;

  /// Restores a finalized table, e.g. from states.csv/transitions.csv.
  static StateSpace from_records(std::vector<StateRecord> records,
                                 const std::vector<std::pair<int, int>>& transitions);

 private:
  static std::uint64_t key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
  }
  void build_adjacency() const;

  std::unordered_map<StatVector, int, StatVectorHash> index_;
  std::vector<StateRecord> records_;
  std::unordered_set<std::uint64_t> transitions_;
  std::uint64_t total_ = 0;
  bool finalized_ = false;

  mutable std::vector<std::vector<int>> adjacency_;
  mutable bool adjacency_valid_ = false;
};

struct AlignedStates {
  StateRecord source;
  StateRecord target;
};

/// Highest-probability state with t_m1 > hi and t_m2 < lo (source) and its mirror
/// with t_m2 > hi and t_m1 < lo (target). Ties go to the smaller id.
AlignedStates find_aligned_states(const StateSpace& space, double hi, double lo);

void write_states(const StateSpace& space, const std::filesystem::path& dir);
StateSpace read_states(const std::filesystem::path& dir);

}  // namespace tst
