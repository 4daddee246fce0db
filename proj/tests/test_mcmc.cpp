#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "tst/error.hpp"
#include "tst/mcmc.hpp"
#include "tst/state_space.hpp"

using namespace tst;

TEST_CASE("acceptance probability is min(1, e^dq)") {
  Rng rng(1);
  int zero = 0, minus2 = 0;
  const int trials = 200000;
  for (int k = 0; k < trials; ++k) {
    zero += metropolis_accept(0.0, rng);
    minus2 += metropolis_accept(-2.0, rng);
  }
  CHECK(zero == trials);
  const double p = std::exp(-2.0);  // 0.1353
  CHECK(std::abs(minus2 / double(trials) - p) < 4 * std::sqrt(p * (1 - p) / trials));
  CHECK_FALSE(metropolis_accept(-1e300, rng));
  CHECK(metropolis_accept(1e300, rng));
}

TEST_CASE("detailed balance ratio of the acceptance rule") {
  for (double dq : {-5.0, -0.3, 0.0, 0.7, 12.0}) {
    const double ratio = std::min(1.0, std::exp(dq)) / std::min(1.0, std::exp(-dq));
    CHECK(ratio == doctest::Approx(std::exp(dq)).epsilon(1e-12));
  }
}

TEST_CASE("metropolis chain keeps its statistics in sync") {
  const auto a = make_faction_attributes(12);
  MetropolisChain chain(Graph(12), faction_theta, a, Rng(5));
  for (int k = 0; k < 20000; ++k) {
    const auto r = chain.step();
    if (k % 1000 == 0) REQUIRE(chain.current_stats() == oracle::naive_stats(chain.graph(), a));
    if (!r.accepted) CHECK(r.delta == change_stats(chain.graph(), a, r.dyad));
  }
}

TEST_CASE("chain frequencies match the exact distribution on four nodes") {
  const auto a = make_faction_attributes(4);
  for (const Theta th : {faction_theta, Theta{-1.0, -0.1, 1.0, 1.0, 0.5, 0.5}}) {
    const auto exact = oracle::exact_graph_distribution(4, th, a);
    std::vector<double> freq(exact.size(), 0.0);
    MetropolisChain chain(Graph(4), th, a, Rng(17));
    chain.advance(10000);
    const int steps = 2'000'000;
    for (int k = 0; k < steps; ++k) {
      chain.step();
      freq[oracle::code_of(chain.graph())] += 1.0 / steps;
    }
    CHECK(oracle::total_variation(freq, exact) < 0.02);
  }
}

TEST_CASE("zero potential gives uniform seeds") {
  const auto a = make_faction_attributes(20);
  ChainConfig cfg;
  cfg.burnin = 1000;
  cfg.thin = 1000;
  cfg.heat = 1;
  cfg.seed = 9;
  const auto seeds = sample_heated_seeds(Theta{}, a, cfg, 50);
  REQUIRE(seeds.size() == 50);
  double edges = 0;
  for (const auto& g : seeds) edges += g.edge_count();
  const double m = 50.0 * 190;
  const double density = edges / m;
  CHECK(std::abs(density - 0.5) < 3 * std::sqrt(0.25 / m));
}

TEST_CASE("heated seeds cover both aligned regimes") {
  const auto a = make_faction_attributes(20);
  ChainConfig cfg;
  cfg.burnin = 100000;
  cfg.thin = 100000;
  cfg.heat = 10;
  cfg.seed = 1;
  const auto seeds = sample_heated_seeds(faction_theta, a, cfg, 100);
  int pos = 0, neg = 0;
  for (const auto& g : seeds) {
    const auto s = stats(g, a);
    pos += s[st_match_b1] > s[st_match_b2];
    neg += s[st_match_b1] < s[st_match_b2];
  }
  CHECK(pos > 0);
  CHECK(neg > 0);
}

TEST_CASE("recording chain edge cases") {
  const auto a = make_faction_attributes(4);
  SUBCASE("no steps records only the seed") {
    StateSpace space;
    Rng rng(1);
    run_recording_chain(Graph(4), faction_theta, a, 0, space, rng);
    CHECK(space.size() == 1);
    CHECK(space.total() == 1);
    CHECK(space.transition_count() == 0);
  }
  SUBCASE("a frozen chain stays put") {
    Theta frozen{};
    frozen.edge = -1e300;
    StateSpace space;
    Rng rng(1);
    run_recording_chain(Graph(4), frozen, a, 500, space, rng);
    CHECK(space.size() == 1);
    CHECK(space.records()[0].count == 501);
  }
}

TEST_CASE("chains are reproducible from their seed") {
  const auto a = make_faction_attributes(8);
  StateSpace s1, s2;
  Rng r1(42), r2(42);
  run_recording_chain(Graph(8), faction_theta, a, 50000, s1, r1);
  run_recording_chain(Graph(8), faction_theta, a, 50000, s2, r2);
  REQUIRE(s1.size() == s2.size());
  for (std::size_t k = 0; k < s1.size(); ++k) {
    CHECK(s1.records()[k].stats == s2.records()[k].stats);
    CHECK(s1.records()[k].count == s2.records()[k].count);
  }
  CHECK(s1.transitions() == s2.transitions());
}

TEST_CASE("rejection sampling") {
  const auto a = make_faction_attributes(8);
  RejectionConfig cfg;
  cfg.burnin = 100;
  cfg.thin = 10;
  cfg.batch = 5;
  cfg.max_batches = 3;
  SUBCASE("a tautology keeps the first thinned draws") {
    Rng rng(3);
    const auto gs = rejection_sample_state(faction_theta, a, [](const StatVector&) { return true; }, 7, cfg, Graph(8), rng);
    CHECK(gs.size() == 7);
  }
  SUBCASE("every kept graph satisfies the predicate") {
    Rng rng(3);
    auto pred = [](const StatVector& s) { return s[st_edges] % 2 == 0; };
    cfg.max_batches = 100;
    const auto gs = rejection_sample_state(faction_theta, a, pred, 10, cfg, Graph(8), rng);
    REQUIRE(gs.size() == 10);
    for (const auto& g : gs) CHECK(pred(stats(g, a)));
  }
  SUBCASE("an unreachable state exhausts the budget") {
    Rng rng(3);
    try {
      rejection_sample_state(faction_theta, a, [](const StatVector&) { return false; }, 1, cfg, Graph(8), rng);
      FAIL("expected budget exhaustion");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::budget_exhausted);
      CHECK(std::string(e.what()).find("acceptance rate") != std::string::npos);
    }
  }
}
