#include "tst/mcmc.hpp"

#include <sstream>

#include "tst/error.hpp"
#include "tst/state_space.hpp"

namespace tst {

void ChainConfig::validate() const {
  if (thin < 1) throw Error(ErrorKind::config, "thin must be >= 1");
  if (steps < 1) throw Error(ErrorKind::config, "steps must be >= 1");
  if (!(heat > 0.0)) throw Error(ErrorKind::config, "heat must be > 0");
}

MetropolisChain::MetropolisChain(Graph g, const Theta& theta, const NodeAttributeTable& attrs, Rng rng)
    : graph_(std::move(g)),
      theta_(theta.as_array()),
      attrs_(&attrs),
      rng_(std::move(rng)),
      stats_(stats(graph_, attrs)) {
  if (graph_.n() < 2) throw Error(ErrorKind::dimension, "a chain needs at least two nodes");
  const auto m = dyad_count(graph_.n());
  dyads_.reserve(m);
  for (std::size_t k = 0; k < m; ++k) dyads_.push_back(dyad_at(graph_.n(), k));
}

StepResult MetropolisChain::step() {
  StepResult r;
  r.dyad = dyads_[rng_.below(dyads_.size())];
  r.delta = add_stats(graph_, *attrs_, r.dyad);
  if (graph_.has_edge(r.dyad.i, r.dyad.j))
    for (auto& x : r.delta.v) x = -x;
  double dq = theta_[0] * r.delta[0];
  for (int k = 1; k < stat_count; ++k) dq = dq + theta_[k] * r.delta[k];
  r.dq = dq;
  r.accepted = metropolis_accept(dq, rng_);
  if (r.accepted) {
    graph_.toggle(r.dyad);
    stats_ += r.delta;
  }
  return r;
}

StepResult metropolis_step(Graph& g, const Theta& theta, const NodeAttributeTable& attrs, Rng& rng) {
  check_dims(g, attrs);
  const Dyad d = dyad_at(g.n(), rng.below(dyad_count(g.n())));
  StepResult r;
  r.dyad = d;
  r.delta = change_stats(g, attrs, d);
  r.dq = potential(theta, r.delta);
  r.accepted = metropolis_accept(r.dq, rng);
  if (r.accepted) g.toggle(d);
  return r;
}

std::vector<Graph> sample_heated_seeds(const Theta& theta, const NodeAttributeTable& attrs,
                                       const ChainConfig& cfg, int count, Graph start) {
  cfg.validate();
  if (count < 1) throw Error(ErrorKind::config, "seed count must be >= 1");
  if (start.n() == 0) start = Graph(attrs.n());
  check_dims(start, attrs);
  const Theta heated = theta.heated(cfg.heat);
  MetropolisChain chain(std::move(start), heated, attrs, Rng::derive(cfg.seed, 0xfeed));
  chain.advance(cfg.burnin);
  std::vector<Graph> seeds;
  seeds.reserve(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) {
    chain.advance(cfg.thin);
    seeds.push_back(chain.graph());
  }
  return seeds;
}

void run_recording_chain(const Graph& seed_graph, const Theta& theta, const NodeAttributeTable& attrs,
                         std::uint64_t steps, StateSpace& sink, Rng& rng) {
  check_dims(seed_graph, attrs);
  MetropolisChain chain(seed_graph, theta, attrs, rng);
  int current = sink.accumulate(chain.current_stats());
  for (std::uint64_t s = 0; s < steps; ++s) {
    const StepResult r = chain.step();
    if (r.accepted) {
      const int next = sink.accumulate(chain.current_stats());
      sink.record_transition(current, next);
      current = next;
    } else {
      sink.add_count(current);
    }
  }
  rng = chain.rng();
}

std::vector<Graph> rejection_sample_state(const Theta& theta, const NodeAttributeTable& attrs,
                                          const StatePredicate& target, int count,
                                          const RejectionConfig& cfg, Graph start, Rng& rng) {
  if (count < 1) throw Error(ErrorKind::config, "count must be >= 1");
  if (cfg.thin < 1 || cfg.batch < 1) throw Error(ErrorKind::config, "thin and batch must be >= 1");
  if (start.n() == 0) start = Graph(attrs.n());
  MetropolisChain chain(std::move(start), theta, attrs, rng);
  chain.advance(cfg.burnin);
  std::vector<Graph> kept;
  std::uint64_t draws = 0;
  for (std::uint64_t b = 0; b < cfg.max_batches; ++b) {
    for (std::uint64_t k = 0; k < cfg.batch; ++k) {
      chain.advance(cfg.thin);
      ++draws;
      if (target(chain.current_stats())) kept.push_back(chain.graph());
    }
    if (kept.size() >= static_cast<std::size_t>(count)) {
      kept.resize(static_cast<std::size_t>(count));
      rng = chain.rng();
      return kept;
    }
  }
  std::ostringstream msg;
  msg << "kept " << kept.size() << " of " << count << " after " << draws << " draws (acceptance rate "
      << static_cast<double>(kept.size()) / static_cast<double>(draws) << ")";
  throw Error(ErrorKind::budget_exhausted, msg.str());
}

}  // namespace tst
