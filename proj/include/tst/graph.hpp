#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace tst {

/// Largest supported node count; adjacency rows are single 64-bit words.
inline constexpr int max_nodes = 64;

struct Dyad {
  int i = 0;
  int j = 0;

  /// Canonical (i < j) dyad; throws invalid_dyad on self-loops.
  static Dyad make(int a, int b);

  friend bool operator==(const Dyad&, const Dyad&) = default;
};

inline std::size_t dyad_count(int n) { return static_cast<std::size_t>(n) * (n - 1) / 2; }

/// Row-major index of dyad (i<j) among all C(n,2) dyads.
std::size_t dyad_index(int n, Dyad d);
Dyad dyad_at(int n, std::size_t index);

/// Two binary attributes per node, with cached same-value masks.
class NodeAttributeTable {
 public:
  NodeAttributeTable() = default;
  NodeAttributeTable(std::vector<int> b1, std::vector<int> b2);

  int n() const { return static_cast<int>(b1_.size()); }
  int b1(int i) const { return b1_[i]; }
  int b2(int i) const { return b2_[i]; }
  const std::vector<int>& b1_values() const { return b1_; }
  const std::vector<int>& b2_values() const { return b2_; }

  /// Nodes sharing node i's b1 (resp. b2) value, i included.
  std::uint64_t same_b1(int i) const { return same_b1_[i]; }
  const std::uint64_t* same_b1_data() const { return same_b1_.data(); }
  const std::uint64_t* same_b2_data() const { return same_b2_.data(); }
  std::uint64_t same_b2(int i) const { return same_b2_[i]; }

  friend bool operator==(const NodeAttributeTable& a, const NodeAttributeTable& b) {
    return a.b1_ == b.b1_ && a.b2_ == b.b2_;
  }

 private:
  std::vector<int> b1_;
  std::vector<int> b2_;
  std::vector<std::uint64_t> same_b1_;
  std::vector<std::uint64_t> same_b2_;
};

/// Nodes 0..n/4-1 get (0,0), then (0,1), (1,0), (1,1). Requires n % 4 == 0.
NodeAttributeTable make_faction_attributes(int n);

/// Undirected simple graph on n <= 64 nodes: bit-row adjacency plus degrees.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n);

  int n() const { return n_; }
  bool has_edge(int i, int j) const { return (rows_[i] >> j) & 1u; }
  std::uint64_t row(int i) const { return rows_[i]; }
  int degree(int i) const { return degree_[i]; }
  const std::uint64_t* row_data() const { return rows_.data(); }
  const int* degree_data() const { return degree_.data(); }
  int edge_count() const { return edges_; }

  /// Flips the presence of dyad d. Returns true if the edge now exists.
  bool toggle(Dyad d);
  void validate(Dyad d) const;

  std::vector<Dyad> edges() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.rows_ == b.rows_;
  }

 private:
  int n_ = 0;
  int edges_ = 0;
  std::vector<std::uint64_t> rows_;
  std::vector<int> degree_;
};

/// Non-mutating toggle.
Graph toggled(Graph g, Dyad d);

}  // namespace tst
