#include "tst/ergm.hpp"

#include <bit>
#include <cmath>

#include "tst/error.hpp"

namespace tst {

Theta Theta::heated(double heat) const {
  return {edge / heat, twostar / heat, match_b1 / heat, match_b2 / heat, tri_b1 / heat, tri_b2 / heat};
}

bool Theta::finite() const {
  for (double x : as_array())
    if (!std::isfinite(x)) return false;
  return true;
}

void check_dims(const Graph& g, const NodeAttributeTable& a) {
  if (g.n() != a.n())
    throw Error(ErrorKind::dimension,
                "graph has " + std::to_string(g.n()) + " nodes, attributes " + std::to_string(a.n()));
}

StatVector stats(const Graph& g, const NodeAttributeTable& a) {
  check_dims(g, a);
  StatVector t;
  const int n = g.n();
  long long edges2 = 0, m1 = 0, m2 = 0, d1 = 0, d2 = 0, twostars = 0;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t row = g.row(i);
    const long long d = g.degree(i);
    edges2 += d;
    twostars += d * (d - 1) / 2;
    m1 += std::popcount(row & a.same_b1(i));
    m2 += std::popcount(row & a.same_b2(i));
    // Each homogeneous triangle is counted once from each of its three edges.
    std::uint64_t above = row & ~((std::uint64_t{2} << i) - 1);
    while (above) {
      const int j = std::countr_zero(above);
      above &= above - 1;
      const std::uint64_t common = row & g.row(j);
      if (a.b1(i) == a.b1(j)) d1 += std::popcount(common & a.same_b1(i));
      if (a.b2(i) == a.b2(j)) d2 += std::popcount(common & a.same_b2(i));
    }
  }
  t[st_edges] = static_cast<std::int32_t>(edges2 / 2);
  t[st_twostar] = static_cast<std::int32_t>(twostars);
  t[st_match_b1] = static_cast<std::int32_t>(m1 / 2);
  t[st_match_b2] = static_cast<std::int32_t>(m2 / 2);
  t[st_tri_b1] = static_cast<std::int32_t>(d1 / 3);
  t[st_tri_b2] = static_cast<std::int32_t>(d2 / 3);
  return t;
}

double potential(const Theta& th, const StatVector& t) {
  const auto w = th.as_array();
  double q = w[0] * t[0];
  for (int k = 1; k < stat_count; ++k) q = q + w[k] * t[k];
  return q;
}

StatVector add_stats(const Graph& g, const NodeAttributeTable& a, Dyad d) {
  const int i = d.i, j = d.j;
  const bool present = g.has_edge(i, j);
  const int di = g.degree(i) - present, dj = g.degree(j) - present;
  const std::uint64_t common = g.row(i) & g.row(j);
  const bool s1 = a.b1(i) == a.b1(j);
  const bool s2 = a.b2(i) == a.b2(j);
  StatVector delta;
  delta[st_edges] = 1;
  delta[st_twostar] = di + dj;
  delta[st_match_b1] = s1;
  delta[st_match_b2] = s2;
  delta[st_tri_b1] = s1 ? std::popcount(common & a.same_b1(i)) : 0;
  delta[st_tri_b2] = s2 ? std::popcount(common & a.same_b2(i)) : 0;
  return delta;
}

StatVector change_stats(const Graph& g, const NodeAttributeTable& a, Dyad d) {
  check_dims(g, a);
  g.validate(d);
  StatVector delta = add_stats(g, a, d);
  if (g.has_edge(d.i, d.j))
    for (auto& x : delta.v) x = -x;
  return delta;
}

}  // namespace tst
