#include <doctest.h>

#include "support.hpp"
#include "tst/error.hpp"

using namespace tst;

TEST_CASE("statistics of a hand-built graph") {
  // Nodes 0,1,2 share b1 and form a triangle; node 3 hangs off node 2.
  const NodeAttributeTable a({0, 0, 0, 1}, {0, 1, 0, 1});
  Graph g(4);
  for (auto [i, j] : {std::pair{0, 1}, {0, 2}, {1, 2}, {2, 3}}) g.toggle(Dyad{i, j});
  const auto s = stats(g, a);
  CHECK(s[st_edges] == 4);
  CHECK(s[st_twostar] == 1 + 1 + 3);  // degrees 2,2,3,1
  CHECK(s[st_match_b1] == 3);
  CHECK(s[st_match_b2] == 1);         // only (0,2)
  CHECK(s[st_tri_b1] == 1);
  CHECK(s[st_tri_b2] == 0);
}

TEST_CASE("potential is the dot product in statistic order") {
  StatVector t;
  t.v = {3, 4, 1, 2, 0, 5};
  const Theta th{-1.0, 0.5, 2.0, -3.0, 7.0, 0.25};
  CHECK(potential(th, t) == ((((-3.0 + 2.0) + 2.0) - 6.0) + 0.0) + 1.25);
}

TEST_CASE("stats and change statistics match the naive oracle") {
  Rng rng(11);
  for (int n : {4, 6, 8, 20}) {
    for (int rep = 0; rep < 200; ++rep) {
      const auto a = oracle::random_attributes(n, rng);
      const auto g = oracle::random_graph(n, rng.uniform(), rng);
      const auto s = stats(g, a);
      REQUIRE(s == oracle::naive_stats(g, a));
      for (int k = 0; k < 5; ++k) {
        const auto d = dyad_at(n, rng.below(dyad_count(n)));
        CHECK(change_stats(g, a, d) == oracle::naive_stats(toggled(g, d), a) - s);
      }
    }
  }
}

TEST_CASE("add_stats ignores the current state of the dyad") {
  Rng rng(5);
  const auto a = make_faction_attributes(8);
  const auto g = oracle::random_graph(8, 0.5, rng);
  for (std::size_t k = 0; k < dyad_count(8); ++k) {
    const Dyad d = dyad_at(8, k);
    const auto add = add_stats(g, a, d);
    CHECK(add == add_stats(toggled(g, d), a, d));
    CHECK(add[st_edges] == 1);
  }
}

TEST_CASE("dimension mismatch between graph and attributes") {
  CHECK_THROWS_AS(stats(Graph(5), make_faction_attributes(4)), Error);
}
