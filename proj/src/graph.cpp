#include "tst/graph.hpp"

#include <string>

#include "tst/error.hpp"

namespace tst {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_dyad: return "invalid dyad";
    case ErrorKind::dimension: return "dimension mismatch";
    case ErrorKind::invalid_design: return "invalid design";
    case ErrorKind::budget_exhausted: return "budget exhausted";
    case ErrorKind::empty_space: return "empty state space";
    case ErrorKind::regime_not_found: return "regime not found";
    case ErrorKind::disconnected_states: return "disconnected states";
    case ErrorKind::no_interior: return "no interior states";
    case ErrorKind::absorbing_state: return "absorbing state";
    case ErrorKind::malformed_trajectory: return "malformed trajectory";
    case ErrorKind::empty_input: return "empty input";
    case ErrorKind::config: return "config error";
    case ErrorKind::io: return "i/o error";
  }
  return "error";
}

Dyad Dyad::make(int a, int b) {
  if (a == b) throw Error(ErrorKind::invalid_dyad, "self-loop at node " + std::to_string(a));
  return a < b ? Dyad{a, b} : Dyad{b, a};
}

std::size_t dyad_index(int n, Dyad d) {
  // Rows i = 0..n-2 hold n-1-i dyads each.
  const auto i = static_cast<std::size_t>(d.i);
  return i * (2 * static_cast<std::size_t>(n) - i - 1) / 2 + static_cast<std::size_t>(d.j - d.i - 1);
}

Dyad dyad_at(int n, std::size_t index) {
  int i = 0;
  std::size_t row = static_cast<std::size_t>(n - 1);
  while (index >= row) {
    index -= row;
    ++i;
    --row;
  }
  return {i, i + 1 + static_cast<int>(index)};
}

NodeAttributeTable::NodeAttributeTable(std::vector<int> b1, std::vector<int> b2)
    : b1_(std::move(b1)), b2_(std::move(b2)) {
  if (b1_.size() != b2_.size())
    throw Error(ErrorKind::dimension, "attribute columns differ in length");
  if (b1_.size() > static_cast<std::size_t>(max_nodes))
    throw Error(ErrorKind::dimension, "at most 64 nodes are supported");
  const int n = static_cast<int>(b1_.size());
  for (int i = 0; i < n; ++i) {
    if ((b1_[i] != 0 && b1_[i] != 1) || (b2_[i] != 0 && b2_[i] != 1))
      throw Error(ErrorKind::invalid_design, "attribute values must be 0 or 1 (node " + std::to_string(i) + ")");
  }
  same_b1_.assign(n, 0);
  same_b2_.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (b1_[i] == b1_[j]) same_b1_[i] |= std::uint64_t{1} << j;
      if (b2_[i] == b2_[j]) same_b2_[i] |= std::uint64_t{1} << j;
    }
  }
}

NodeAttributeTable make_faction_attributes(int n) {
  if (n <= 0 || n % 4 != 0)
    throw Error(ErrorKind::invalid_design, "faction design needs n divisible by 4, got " + std::to_string(n));
  if (n > max_nodes) throw Error(ErrorKind::invalid_design, "at most 64 nodes are supported");
  const int quarter = n / 4;
  std::vector<int> b1(n), b2(n);
  for (int i = 0; i < n; ++i) {
    const int cell = i / quarter;
    b1[i] = cell >> 1;
    b2[i] = cell & 1;
  }
  return {std::move(b1), std::move(b2)};
}

Graph::Graph(int n) : n_(n), rows_(static_cast<std::size_t>(n), 0), degree_(static_cast<std::size_t>(n), 0) {
  if (n < 0 || n > max_nodes) throw Error(ErrorKind::dimension, "node count must be in [0, 64]");
}

void Graph::validate(Dyad d) const {
  if (d.i == d.j || d.i < 0 || d.j < 0 || d.i >= n_ || d.j >= n_)
    throw Error(ErrorKind::invalid_dyad,
                "(" + std::to_string(d.i) + "," + std::to_string(d.j) + ") on " + std::to_string(n_) + " nodes");
}

bool Graph::toggle(Dyad d) {
  validate(d);
  rows_[d.i] ^= std::uint64_t{1} << d.j;
  rows_[d.j] ^= std::uint64_t{1} << d.i;
  const bool present = has_edge(d.i, d.j);
  const int step = present ? 1 : -1;
  degree_[d.i] += step;
  degree_[d.j] += step;
  edges_ += step;
  return present;
}

std::vector<Dyad> Graph::edges() const {
  std::vector<Dyad> out;
  out.reserve(static_cast<std::size_t>(edges_));
  for (int i = 0; i < n_; ++i) {
    std::uint64_t above = rows_[i] & ~((std::uint64_t{2} << i) - 1);
    while (above) {
      out.push_back({i, std::countr_zero(above)});
      above &= above - 1;
    }
  }
  return out;
}

Graph toggled(Graph g, Dyad d) {
  g.toggle(d);
  return g;
}

}  // namespace tst
