#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>

#include "support.hpp"
#include "tst/analysis.hpp"
#include "tst/error.hpp"

using namespace tst;
namespace fs = std::filesystem;

namespace {

StatVector sv(int e, int m1, int m2) {
  StatVector s;
  s[st_edges] = e;
  s[st_match_b1] = m1;
  s[st_match_b2] = m2;
  return s;
}

// Every shortest simple path in the visit digraph, compared by first-visit rank sequence.
std::vector<int> shortest_by_rank(const std::vector<int>& walk, int source, int target) {
  std::map<int, int> rank;
  for (int s : walk) rank.try_emplace(s, static_cast<int>(rank.size()));
  std::map<int, std::vector<int>> succ;
  for (std::size_t k = 1; k < walk.size(); ++k)
    if (walk[k] != walk[k - 1]) succ[walk[k - 1]].push_back(walk[k]);
  std::vector<int> best, cur{source};
  std::vector<int> best_ranks;
  auto ranks = [&](const std::vector<int>& p) {
    std::vector<int> r;
    for (int s : p) r.push_back(rank[s]);
    return r;
  };
  auto dfs = [&](auto&& self, int v) -> void {
    if (!best.empty() && cur.size() > best.size()) return;
    if (v == target) {
      const auto r = ranks(cur);
      if (best.empty() || cur.size() < best.size() || r < best_ranks) {
        best = cur;
        best_ranks = r;
      }
      return;
    }
    for (int w : succ[v]) {
      if (std::find(cur.begin(), cur.end(), w) != cur.end()) continue;
      cur.push_back(w);
      self(self, w);
      cur.pop_back();
    }
  };
  dfs(dfs, source);
  return best;
}

std::vector<StatVector> profile_stats(const std::vector<double>& q) {
  std::vector<StatVector> out;
  for (double x : q) out.push_back(sv(static_cast<int>(std::lround(10 * x)) + 50, 10, 10));
  return out;
}

}  // namespace

TEST_CASE("pruning a walk to its fewest-hop path") {
  // S,A,B,A,C,T
  CHECK(prune_to_path({0, 1, 2, 1, 3, 4}, 0, 4) == std::vector<int>{0, 1, 3, 4});
  CHECK(prune_to_path({5, 6, 7, 8}, 5, 8) == std::vector<int>{5, 6, 7, 8});
  CHECK(prune_to_path({5}, 5, 5) == std::vector<int>{5});
  // Two routes of equal length: the successor seen first wins.
  CHECK(prune_to_path({0, 2, 0, 1, 9, 0, 2, 9}, 0, 9) == std::vector<int>{0, 2, 9});
  CHECK_THROWS_AS(prune_to_path({0, 1, 2}, 0, 7), Error);
  CHECK_THROWS_AS(prune_to_path({1, 0, 2}, 0, 2), Error);
}

TEST_CASE("pruning agrees with exhaustive shortest paths on random walks") {
  Rng rng(41);
  for (int rep = 0; rep < 300; ++rep) {
    const int states = 3 + static_cast<int>(rng.below(8));
    auto space = oracle::random_state_graph(states, 0.3, rng, [] { return -1.0; });
    const int source = 0, target = states - 1;
    std::vector<int> walk{source};
    while (walk.back() != target && walk.size() < 400) {
      const auto nb = space.neighbors(walk.back());
      walk.push_back(nb[rng.below(nb.size())]);
    }
    if (walk.back() != target) continue;
    const auto p = prune_to_path(walk, source, target);
    REQUIRE(p == shortest_by_rank(walk, source, target));
    for (std::size_t k = 1; k < p.size(); ++k) CHECK(space.has_transition(p[k - 1], p[k]));
    std::vector<int> sorted = p;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  }
}

TEST_CASE("classification by the edge count at the neutral point") {
  const std::vector<StatVector> mspcp{sv(10, 10, 0), sv(20, 10, 4), sv(30, 8, 8), sv(20, 4, 10), sv(10, 0, 10)};
  const auto self = classify_path(mspcp, mspcp);
  CHECK(self.label == PathClass::primary);
  CHECK(self.neutral_index == 2);
  CHECK(self.neutral_edges == 30);
  CHECK(self.tau == 20.0);

  const std::vector<StatVector> low{sv(10, 10, 0), sv(8, 5, 5), sv(10, 0, 10)};
  const auto c = classify_path(low, mspcp);
  CHECK(c.label == PathClass::secondary);
  CHECK(c.neutral_edges == 8);

  const std::vector<StatVector> flat{sv(10, 10, 0), sv(10, 6, 6), sv(10, 0, 10)};
  CHECK(classify_path(flat, mspcp).label == PathClass::secondary);

  // The first of several equally neutral states decides.
  const std::vector<StatVector> two{sv(10, 10, 0), sv(25, 5, 5), sv(12, 4, 4), sv(10, 0, 10)};
  const auto t = classify_path(two, mspcp);
  CHECK(t.neutral_index == 1);
  CHECK(t.label == PathClass::primary);
  CHECK(std::string(to_string(PathClass::secondary)) == "secondary");
}

TEST_CASE("high road") {
  const std::vector<StatVector> high{sv(10, 10, 0), sv(15, 10, 5), sv(20, 10, 10), sv(15, 5, 10), sv(10, 0, 10)};
  const auto h = high_road(high);
  CHECK(h.holds);
  CHECK(h.m2_reach == 0.5);
  CHECK(h.m1_fall == 0.75);
  CHECK(h.max_edges == 20);
  CHECK(h.source_edges == 10);

  const std::vector<StatVector> low{sv(10, 10, 0), sv(8, 5, 0), sv(6, 0, 0), sv(8, 0, 5), sv(10, 0, 10)};
  const auto l = high_road(low);
  CHECK_FALSE(l.holds);
  CHECK(l.m1_fall == 0.25);
  CHECK(l.m2_reach == 1.0);

  // Right order, but never denser than the source.
  const std::vector<StatVector> thin{sv(10, 10, 0), sv(10, 10, 10), sv(10, 0, 10)};
  CHECK_FALSE(high_road(thin).holds);
}

TEST_CASE("monotone spline") {
  const MonotoneSpline lin({0, 1, 2, 3}, {1, 3, 5, 7});
  for (double t = 0; t <= 3; t += 0.125) CHECK(lin(t) == doctest::Approx(1 + 2 * t).epsilon(1e-14));
  const std::vector<double> x{0, 0.1, 0.5, 0.6, 1.0}, y{0, 0, 1, 5, 5};
  const MonotoneSpline s(x, y);
  for (std::size_t k = 0; k < x.size(); ++k) CHECK(s(x[k]) == y[k]);
  double prev = -1;
  for (int k = 0; k <= 1000; ++k) {
    const double v = s(k / 1000.0);
    CHECK(v >= prev - 1e-12);
    CHECK(v >= 0.0);
    CHECK(v <= 5.0);
    prev = v;
  }
  CHECK(s(0.05) == 0.0);   // flat segment stays flat
  CHECK(s(0.8) == 5.0);
  CHECK(s(-1.0) == 0.0);   // clamped outside the knots
  CHECK(s(2.0) == 5.0);
  CHECK_THROWS_AS(MonotoneSpline({0, 0}, {1, 2}), Error);
}

TEST_CASE("alignment") {
  AlignOptions opt;
  opt.grid = 101;
  SUBCASE("identical paths keep identity warps") {
    const std::vector<double> q{0, -3, -1, -4, 0};
    const auto res = align({q, q, q}, {profile_stats(q), profile_stats(q), profile_stats(q)}, opt);
    CHECK(res.rmse_before < 1e-12);
    CHECK(res.rmse_after < 1e-12);
    for (const auto& c : res.curves)
      for (std::size_t k = 0; k < c.warp.size(); ++k)
        CHECK(c.warp[k] == doctest::Approx(double(k) / (c.warp.size() - 1)).epsilon(1e-12));
  }
  SUBCASE("a duplicated interior state is aligned away") {
    const std::vector<double> a{0, -2, -6, -1, -3, -5, 0};
    std::vector<double> b = a;
    b.insert(b.begin() + 2, -2);
    const auto res = align({a, b}, {profile_stats(a), profile_stats(b)}, opt);
    MESSAGE("rmse " << res.rmse_before << " -> " << res.rmse_after);
    CHECK(res.rmse_after < res.rmse_before);
  }
  SUBCASE("descent and monotone warps on random profiles") {
    Rng rng(5);
    for (int rep = 0; rep < 10; ++rep) {
      std::vector<std::vector<double>> qs;
      std::vector<std::vector<StatVector>> ss;
      const int paths = 2 + static_cast<int>(rng.below(6));
      for (int p = 0; p < paths; ++p) {
        std::vector<double> q(4 + rng.below(40));
        for (std::size_t k = 0; k < q.size(); ++k) q[k] = -5.0 * std::sin(3.14159 * k / (q.size() - 1)) + rng.uniform();
        ss.push_back(profile_stats(q));
        qs.push_back(std::move(q));
      }
      const auto res = align(qs, ss, opt);
      CHECK(res.rmse_after <= res.rmse_before);
      double prev = res.rmse_before;
      for (double h : res.history) {
        CHECK(h <= prev);
        prev = h;
      }
      for (const auto& c : res.curves) {
        REQUIRE(c.warp.size() == static_cast<std::size_t>(opt.knots + 2));
        CHECK(c.warp.front() == 0.0);
        CHECK(c.warp.back() == 1.0);
        for (std::size_t k = 1; k < c.warp.size(); ++k) CHECK(c.warp[k] - c.warp[k - 1] >= opt.min_gap * 0.999);
        CHECK(c.grid.size() == 101u);
        CHECK(c.q.size() == 101u);
      }
    }
  }
  SUBCASE("a single path is returned unwarped") {
    const std::vector<double> q{0, -1, -2};
    const auto res = align({q}, {profile_stats(q)}, opt);
    REQUIRE(res.curves.size() == 1);
    CHECK(res.sweeps == 0);
    CHECK(res.curves[0].q.front() == 0.0);
    CHECK(res.curves[0].q[50] == -1.0);
    CHECK(res.curves[0].q.back() == -2.0);
  }
}

TEST_CASE("mean curves") {
  AlignedCurve c;
  c.grid = {0, 0.5, 1};
  c.q = {1, -2, 3};
  for (auto& s : c.stats) s = {0.5, 1, 0.25};
  c.stats[1] = {0, 0, 0};
  const auto one = mean_curves({c});
  CHECK(one.q == c.q);
  CHECK(one.stats[0] == c.stats[0]);
  CHECK(one.stats[1] == c.stats[1]);

  AlignedCurve neg = c;
  for (double& x : neg.q) x = -x;
  for (double x : mean_curves({c, neg}).q) CHECK(x == 0.0);

  // Normalization happens per curve.
  AlignedCurve big = c;
  for (double& x : big.stats[0]) x *= 10;
  CHECK(mean_curves({c, big}).stats[0] == c.stats[0]);

  AlignedCurve other = c;
  other.grid = {0, 1};
  other.q = {0, 0};
  try {
    mean_curves({c, other});
    FAIL("expected a dimension error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::dimension);
  }
  CHECK_THROWS_AS(mean_curves({}), Error);
}

TEST_CASE("length statistics") {
  std::vector<double> v;
  for (int k = 1; k <= 10; ++k) v.push_back(k);
  CHECK(quantile_sorted(v, 0.25) == 3.25);
  CHECK(quantile_sorted(v, 0.5) == 5.5);
  CHECK(quantile_sorted(v, 1.0) == 10.0);

  const auto s = summarize("ci", "walk", {42});
  CHECK(s.median == 42);
  CHECK(s.notch_lo == 42);
  CHECK(s.notch_hi == 42);

  const auto t = summarize("ci", "walk", v);
  CHECK(t.q1 == 3.25);
  CHECK(t.q3 == 7.75);
  CHECK(t.notch_lo == doctest::Approx(5.5 - 1.57 * 4.5 / std::sqrt(10.0)));

  std::vector<PathRecord> recs(3);
  recs[0].egp = "lergm";
  recs[0].walk_len = 100;
  recs[0].path_len = 10;
  recs[1].egp = "ci";
  recs[1].walk_len = 30;
  recs[1].path_len = 10;
  recs[2].egp = "lergm";
  recs[2].walk_len = 300;
  recs[2].path_len = 20;
  const auto rows = length_stats(recs);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].egp == "lergm");
  CHECK(rows[0].kind == "walk");
  CHECK(rows[0].median == 200);
  CHECK(rows[1].kind == "path");
  CHECK(rows[1].median == 15);
  CHECK(rows[2].kind == "ratio");
  CHECK(rows[2].median == 12.5);
  CHECK(rows[3].egp == "ci");

  try {
    length_stats({});
    FAIL("expected empty input");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::empty_input);
  }

  const auto file = fs::temp_directory_path() / "tst_lengths.csv";
  write_lengths_csv(file, rows);
  const auto back = read_lengths_csv(file);
  REQUIRE(back.size() == rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(back[k].egp == rows[k].egp);
    CHECK(back[k].kind == rows[k].kind);
    CHECK(back[k].median == rows[k].median);
    CHECK(back[k].notch_hi == rows[k].notch_hi);
    CHECK(back[k].n == rows[k].n);
  }
  fs::remove(file);
}

TEST_CASE("connected components") {
  CHECK(count_components(Graph(4)) == 4);
  Graph g(6);
  g.toggle(Dyad{0, 1});
  g.toggle(Dyad{1, 2});
  g.toggle(Dyad{3, 4});
  CHECK(count_components(g) == 3);
  Graph big(64);
  for (int k = 1; k < 64; ++k) big.toggle(Dyad{0, k});
  CHECK(count_components(big) == 1);

  Trajectory t;
  t.start_graph = Graph(4);
  t.seed_state = 0;
  t.events.push_back({1.0, Dyad{0, 1}, {}, 1});
  t.events.push_back({2.0, Dyad{2, 3}, {}, 2});
  CHECK(components_at(t, 0) == 4);
  CHECK(components_at(t, 1) == 3);
  CHECK(components_at(t, 2) == 2);
  CHECK_THROWS_AS(components_at(t, 9), Error);
}

TEST_CASE("path records round-trip") {
  std::vector<PathRecord> recs(2);
  recs[0] = {"lergm/traj_000", "lergm", {PathClass::primary, 4, 77, 61.5}, 300, 2900, 1, true};
  recs[1] = {"ci/traj_003", "ci", {PathClass::secondary, 2, 40, 61.5}, 250, 2000, 3, false};
  const auto file = fs::temp_directory_path() / "tst_paths.csv";
  write_paths_csv(file, recs);
  const auto back = read_paths_csv(file);
  REQUIRE(back.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(back[k].traj_id == recs[k].traj_id);
    CHECK(back[k].egp == recs[k].egp);
    CHECK(back[k].cls.label == recs[k].cls.label);
    CHECK(back[k].cls.neutral_edges == recs[k].cls.neutral_edges);
    CHECK(back[k].cls.tau == recs[k].cls.tau);
    CHECK(back[k].path_len == recs[k].path_len);
    CHECK(back[k].walk_len == recs[k].walk_len);
    CHECK(back[k].neutral_components == recs[k].neutral_components);
    CHECK(back[k].high_road == recs[k].high_road);
  }
  fs::remove(file);
}
