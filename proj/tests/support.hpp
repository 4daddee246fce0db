#pragma once

// Independent oracles shared by the unit and acceptance tests. They favour obviousness
// over speed and deliberately avoid the library's own fast paths.

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "tst/change_path.hpp"
#include "tst/ergm.hpp"
#include "tst/graph.hpp"
#include "tst/rng.hpp"
#include "tst/state_space.hpp"

namespace oracle {

using namespace tst;

// Triple loops straight from the definitions.
inline StatVector naive_stats(const Graph& g, const NodeAttributeTable& a) {
  StatVector s;
  const int n = g.n();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (!g.has_edge(i, j)) continue;
      s[st_edges] += 1;
      s[st_match_b1] += a.b1(i) == a.b1(j);
      s[st_match_b2] += a.b2(i) == a.b2(j);
      for (int k = j + 1; k < n; ++k) {
        if (!g.has_edge(i, k) || !g.has_edge(j, k)) continue;
        s[st_tri_b1] += a.b1(i) == a.b1(j) && a.b1(j) == a.b1(k);
        s[st_tri_b2] += a.b2(i) == a.b2(j) && a.b2(j) == a.b2(k);
      }
    }
  for (int i = 0; i < n; ++i) {
    int d = 0;
    for (int j = 0; j < n; ++j) d += j != i && g.has_edge(i, j);
    s[st_twostar] += d * (d - 1) / 2;
  }
  return s;
}

inline Graph random_graph(int n, double density, Rng& rng) {
  Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < density) g.toggle(Dyad{i, j});
  return g;
}

inline NodeAttributeTable random_attributes(int n, Rng& rng) {
  std::vector<int> b1(n), b2(n);
  for (int i = 0; i < n; ++i) {
    b1[i] = static_cast<int>(rng.below(2));
    b2[i] = static_cast<int>(rng.below(2));
  }
  return NodeAttributeTable(b1, b2);
}

// Graph number `code` on n nodes: bit k of code is dyad k in row-major order.
inline Graph graph_from_code(int n, unsigned code) {
  Graph g(n);
  for (std::size_t k = 0; k < dyad_count(n); ++k)
    if ((code >> k) & 1u) g.toggle(dyad_at(n, k));
  return g;
}

inline unsigned code_of(const Graph& g) {
  unsigned code = 0;
  for (std::size_t k = 0; k < dyad_count(g.n()); ++k) {
    const Dyad d = dyad_at(g.n(), k);
    if (g.has_edge(d.i, d.j)) code |= 1u << k;
  }
  return code;
}

// exp(q(y)) / Z over every graph on n nodes (n <= 5).
inline std::vector<double> exact_graph_distribution(int n, const Theta& th, const NodeAttributeTable& a) {
  const unsigned count = 1u << dyad_count(n);
  std::vector<double> q(count);
  double mx = -INFINITY;
  for (unsigned c = 0; c < count; ++c) {
    q[c] = potential(th, naive_stats(graph_from_code(n, c), a));
    mx = std::max(mx, q[c]);
  }
  double z = 0.0;
  for (double& x : q) z += (x = std::exp(x - mx));
  for (double& x : q) x /= z;
  return q;
}

inline double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  double tv = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) tv += std::abs(p[k] - q[k]);
  return 0.5 * tv;
}

// Random connected state graph with `n` states; logp drawn from the given callable.
template <class Draw>
StateSpace random_state_graph(int n, double extra_edge_prob, Rng& rng, Draw draw) {
  std::vector<StateRecord> records;
  for (int k = 0; k < n; ++k) {
    StateRecord r;
    r.id = k;
    r.stats[0] = k;
    r.count = 1;
    r.logp = draw();
    records.push_back(r);
  }
  std::vector<std::pair<int, int>> edges;
  for (int k = 1; k < n; ++k) edges.emplace_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(k))), k);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (rng.uniform() < extra_edge_prob) edges.emplace_back(a, b);
  return StateSpace::from_records(records, edges);
}

// Every simple path from s to t; the best has the largest logp sum, ties to the
// lexicographically smallest id sequence. Sums are accumulated in 2^-32 fixed point,
// the resolution the path search documents.
inline std::vector<int> best_path_exhaustive(const StateSpace& space, int s, int t) {
  const auto n = static_cast<int>(space.size());
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : space.transitions()) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  auto units = [&](int v) {
    return std::max<long long>(1, std::llround(-space.record(v).logp * 4294967296.0));
  };
  std::vector<int> best, cur{s};
  long long best_cost = 0;
  std::vector<char> on(n, 0);
  on[s] = 1;
  auto dfs = [&](auto&& self, int v, long long cost) -> void {
    if (v == t) {
      if (best.empty() || cost < best_cost || (cost == best_cost && cur < best)) {
        best = cur;
        best_cost = cost;
      }
      return;
    }
    for (int w : adj[v]) {
      if (on[w]) continue;
      on[w] = 1;
      cur.push_back(w);
      self(self, w, cost + units(w));
      cur.pop_back();
      on[w] = 0;
    }
  };
  dfs(dfs, s, units(s));
  return best;
}

}  // namespace oracle
