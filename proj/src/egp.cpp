#include "tst/egp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "tst/error.hpp"
#include "tst/io.hpp"
#include "tst/state_space.hpp"

namespace tst {

std::string EgpKind::name() const {
  switch (variant) {
    case EgpVariant::lergm: return "lergm";
    case EgpVariant::ci: return "ci";
    case EgpVariant::cdcstergm: return "cdcstergm";
    case EgpVariant::cfcstergm: return "cfcstergm";
  }
  return "lergm";
}

EgpKind EgpKind::parse(const std::string& name, double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw Error(ErrorKind::config, "nu must be a positive number");
  if (name == "lergm") return {EgpVariant::lergm, nu};
  if (name == "ci") return {EgpVariant::ci, nu};
  if (name == "cdcstergm") return {EgpVariant::cdcstergm, nu};
  if (name == "cfcstergm") return {EgpVariant::cfcstergm, nu};
  throw Error(ErrorKind::config, "unknown EGP kind '" + name + "'");
}

double move_rate(const EgpKind& kind, double dq, bool adding) {
  double out = 0.0;
  const std::int32_t edge_delta = adding ? 1 : -1;
  kernels::scalar_table().move_rates(kind.variant, kind.nu, &dq, &edge_delta, 1, &out);
  return out;
}

std::vector<StatVector> Trajectory::state_stats() const {
  std::vector<StatVector> out;
  out.reserve(events.size() + 1);
  out.push_back(seed_stats);
  for (const auto& e : events) out.push_back(e.stats);
  return out;
}

std::vector<int> Trajectory::state_ids() const {
  std::vector<int> out;
  out.reserve(events.size() + 1);
  out.push_back(seed_state);
  for (const auto& e : events) out.push_back(e.state_id);
  return out;
}

RateTable::RateTable(std::size_t size)
    : size_(size),
      leaf_((size + block - 1) / block * block, 0.0),
      sum_((size + block - 1) / block, 0.0),
      dirty_((size + block - 1) / block, 1) {}

void RateTable::refresh() {
  for (std::size_t b = 0; b < sum_.size(); ++b) {
    if (!dirty_[b]) continue;
    const double* x = &leaf_[b * block];
    double lane[4];
    for (int l = 0; l < 4; ++l) lane[l] = ((x[l] + x[l + 4]) + x[l + 8]) + x[l + 12];
    sum_[b] = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    dirty_[b] = 0;
  }
  double t = 0.0;
  for (double s : sum_) t += s;
  total_ = t;
}

std::size_t RateTable::select(double u) const {
  std::size_t b = 0;
  while (b + 1 < sum_.size() && (u >= sum_[b] || sum_[b] == 0.0)) {
    u -= sum_[b];
    ++b;
  }
  // Rounding can leave u past the last positive block; fall back to the last one.
  while (sum_[b] == 0.0 && b > 0) --b;
  const std::size_t first = b * block, last = std::min(first + block, size_);
  std::size_t k = first;
  while (k + 1 < last && (u >= leaf_[k] || leaf_[k] == 0.0)) {
    u -= leaf_[k];
    ++k;
  }
  while (leaf_[k] == 0.0 && k > first) --k;
  return k;
}

EgpSimulator::EgpSimulator(const EgpKind& kind, Graph g, const Theta& theta, const NodeAttributeTable& attrs,
                           Rng rng, const kernels::KernelTable& table)
    : kind_(kind),
      graph_(std::move(g)),
      theta_(theta.as_array()),
      attrs_(&attrs),
      rng_(std::move(rng)),
      table_(&table),
      stats_(stats(graph_, attrs)) {
  const int n = graph_.n();
  const auto m = dyad_count(n);
  if (m == 0) throw Error(ErrorKind::dimension, "an EGP needs at least two nodes");
  incident_.resize(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < m; ++k) {
    const Dyad d = dyad_at(n, k);
    dyads_.push_back(d);
    incident_[static_cast<std::size_t>(d.i)].push_back(k);
    incident_[static_cast<std::size_t>(d.j)].push_back(k);
  }
  rates_ = RateTable(m);
  for (auto& col : cols_) col.resize(m);
  dq_.resize(m);
  out_.resize(m);
  batch_.resize(m);
  end_i_.resize(m);
  end_j_.resize(m);
  for (std::size_t k = 0; k < m; ++k) batch_[k] = k;
  evaluate(batch_.data(), m);
}

void EgpSimulator::evaluate(const std::size_t* indices, std::size_t count) {
  for (std::size_t b = 0; b < count; ++b) {
    const Dyad d = dyads_[indices[b]];
    end_i_[b] = d.i;
    end_j_[b] = d.j;
  }
  const kernels::GraphView view{graph_.row_data(), graph_.degree_data(), attrs_->same_b1_data(),
                                attrs_->same_b2_data()};
  table_->change_stats(view, end_i_.data(), end_j_.data(), count,
                       {cols_[0].data(), cols_[1].data(), cols_[2].data(), cols_[3].data(),
                        cols_[4].data(), cols_[5].data()});
  const kernels::DeltaColumns cols{cols_[0].data(), cols_[1].data(), cols_[2].data(),
                                   cols_[3].data(), cols_[4].data(), cols_[5].data()};
  table_->potential_deltas(theta_, cols, count, dq_.data());
  table_->move_rates(kind_.variant, kind_.nu, dq_.data(), cols_[st_edges].data(), count, out_.data());
  for (std::size_t b = 0; b < count; ++b) rates_.set(indices[b], out_[b]);
  rates_.refresh();
}

std::vector<double> EgpSimulator::recompute_rates() const {
  std::vector<double> out(dyads_.size());
  for (std::size_t k = 0; k < dyads_.size(); ++k) {
    const Dyad d = dyads_[k];
    const StatVector delta = change_stats(graph_, *attrs_, d);
    const double dq = potential(Theta{theta_[0], theta_[1], theta_[2], theta_[3], theta_[4], theta_[5]}, delta);
    out[k] = move_rate(kind_, dq, delta[st_edges] > 0);
  }
  return out;
}

TrajectoryEvent EgpSimulator::step() {
  const double total = rates_.total();
  if (!(total > 0.0) || !std::isfinite(total))
    throw Error(ErrorKind::absorbing_state, "total toggle rate is " + io::fmt(total));
  time_ += rng_.exponential(total);
  const std::size_t pick = rates_.select(rng_.uniform() * total);

  TrajectoryEvent e;
  e.dyad = dyads_[pick];
  StatVector delta = add_stats(graph_, *attrs_, e.dyad);
  if (graph_.has_edge(e.dyad.i, e.dyad.j))
    for (auto& x : delta.v) x = -x;
  stats_ += delta;
  graph_.toggle(e.dyad);
  e.time = time_;
  e.stats = stats_;

  std::size_t count = 0;
  for (std::size_t k : incident_[static_cast<std::size_t>(e.dyad.i)]) batch_[count++] = k;
  for (std::size_t k : incident_[static_cast<std::size_t>(e.dyad.j)])
    if (k != pick) batch_[count++] = k;
  evaluate(batch_.data(), count);
  return e;
}

Trajectory simulate(const EgpKind& kind, const Graph& g0, const Theta& theta, const NodeAttributeTable& attrs,
                    const StopRule& stop, Rng& rng, std::uint64_t max_events) {
  check_dims(g0, attrs);
  EgpSimulator sim(kind, g0, theta, attrs, rng);
  Trajectory t;
  t.kind = kind;
  t.seed_stats = sim.current_stats();
  t.start_graph = g0;
  while (!stop(sim.current_stats(), sim.time())) {
    if (t.simulated_events >= max_events) {
      rng = sim.rng();
      throw TrajectoryBudgetError("no stop after " + std::to_string(max_events) + " events", std::move(t));
    }
    t.events.push_back(sim.step());
    ++t.simulated_events;
  }
  rng = sim.rng();
  return t;
}

std::vector<int> truncate_at_source(const std::vector<int>& states, int source) {
  auto last = std::find(states.rbegin(), states.rend(), source);
  if (last == states.rend()) return states;
  return {states.begin() + (states.rend() - last - 1), states.end()};
}

namespace {

Trajectory run_to_target(const EgpKind& kind, const Graph& seed, const StatVector& source,
                         const StatVector& target, const Theta& theta, const NodeAttributeTable& attrs,
                         std::uint64_t max_events, std::uint64_t stream_seed, Rng rng) {
  EgpSimulator sim(kind, seed, theta, attrs, std::move(rng));
  Trajectory t;
  t.kind = kind;
  t.seed = stream_seed;
  t.seed_stats = sim.current_stats();
  t.start_graph = seed;
  if (t.seed_stats != source) throw Error(ErrorKind::malformed_trajectory, "seed graph is not in the source state");
  while (sim.current_stats() != target) {
    if (t.simulated_events >= max_events)
      throw TrajectoryBudgetError(kind.name() + ": target not reached after " + std::to_string(max_events) + " events",
                                  std::move(t));
    auto e = sim.step();
    ++t.simulated_events;
    if (e.stats == source) {
      t.events.clear();
      t.t0 = e.time;
      t.start_graph = sim.graph();
    } else {
      t.events.push_back(e);
    }
  }
  return t;
}

}  // namespace

std::vector<Trajectory> simulate_until_target(const EgpKind& kind, const std::vector<Graph>& seeds,
                                              const StatVector& source, const StatVector& target,
                                              const Theta& theta, const NodeAttributeTable& attrs,
                                              const TargetRunConfig& cfg) {
  if (cfg.per_seed < 1) throw Error(ErrorKind::config, "per_seed must be >= 1");
  if (source == target) throw Error(ErrorKind::config, "source and target states coincide");
  const std::size_t jobs = seeds.size() * static_cast<std::size_t>(cfg.per_seed);
  std::vector<Trajectory> out(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs; k = next++) {
      try {
        const auto& seed = seeds[k / static_cast<std::size_t>(cfg.per_seed)];
        check_dims(seed, attrs);
        out[k] = run_to_target(kind, seed, source, target, theta, attrs, cfg.max_events, k,
                               Rng::derive(cfg.seed, k));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(jobs)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

StateCatalog::StateCatalog(const StateSpace& space) {
  for (const auto& r : space.records()) {
    index_.emplace(r.stats, r.id);
    stats_.push_back(r.stats);
    q_.push_back(r.q);
  }
  known_ = stats_.size();
}

int StateCatalog::id_of(const StatVector& s) {
  auto [it, inserted] = index_.try_emplace(s, static_cast<int>(stats_.size()));
  if (inserted) {
    stats_.push_back(s);
    q_.push_back(std::numeric_limits<double>::quiet_NaN());
  }
  return it->second;
}

int StateCatalog::find(const StatVector& s) const {
  const auto it = index_.find(s);
  return it == index_.end() ? -1 : it->second;
}

void StateCatalog::set_potentials(const Theta& theta) {
  for (std::size_t k = 0; k < stats_.size(); ++k) q_[k] = potential(theta, stats_[k]);
}

void StateCatalog::assign(std::vector<Trajectory>& trajectories) {
  for (auto& t : trajectories) {
    t.seed_state = id_of(t.seed_stats);
    for (auto& e : t.events) e.state_id = id_of(e.stats);
  }
}

void write_trajectory(const std::filesystem::path& file, const Trajectory& t) {
  auto out = io::open_out(file);
  out << "# kind=" << t.kind.name() << '\n'
      << "# nu=" << io::fmt(t.kind.nu) << '\n'
      << "# seed=" << t.seed << '\n'
      << "# source_id=" << t.source_id << '\n'
      << "# target_id=" << t.target_id << '\n'
      << "# t0=" << io::fmt(t.t0) << '\n'
      << "# seed_state=" << t.seed_state << '\n'
      << "# simulated_events=" << t.simulated_events << '\n'
      << "# n=" << t.start_graph.n() << '\n'
      << "# start_edges=";
  bool first = true;
  for (const Dyad& d : t.start_graph.edges()) {
    out << (first ? "" : " ") << d.i << '-' << d.j;
    first = false;
  }
  out << "\ntime,i,j,state_id\n";
  for (const auto& e : t.events)
    out << io::fmt(e.time) << ',' << e.dyad.i << ',' << e.dyad.j << ',' << e.state_id << '\n';
}

Trajectory read_trajectory(const std::filesystem::path& file, const StateCatalog& catalog) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::io, "cannot open " + file.string());
  Trajectory t;
  std::string line;
  std::string kind = "lergm";
  double nu = 0.5;
  bool header = false;
  auto state_of = [&](long long id) -> const StatVector& {
    if (id < 0 || static_cast<std::size_t>(id) >= catalog.size())
      throw Error(ErrorKind::io, file.string() + ": unknown state id " + std::to_string(id));
    return catalog.stats(static_cast<int>(id));
  };
  while (std::getline(in, line)) {
    const std::string s = io::trim(line);
    if (s.empty()) continue;
    if (s[0] == '#') {
      const auto eq = s.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = io::trim(std::string_view(s).substr(1, eq - 1));
      const std::string value = io::trim(std::string_view(s).substr(eq + 1));
      if (key == "kind") kind = value;
      else if (key == "nu") nu = io::parse_double(value);
      else if (key == "seed") t.seed = static_cast<std::uint64_t>(io::parse_int(value));
      else if (key == "source_id") t.source_id = static_cast<int>(io::parse_int(value));
      else if (key == "target_id") t.target_id = static_cast<int>(io::parse_int(value));
      else if (key == "t0") t.t0 = io::parse_double(value);
      else if (key == "seed_state") t.seed_state = static_cast<int>(io::parse_int(value));
      else if (key == "simulated_events") t.simulated_events = static_cast<std::uint64_t>(io::parse_int(value));
      else if (key == "n") t.start_graph = Graph(static_cast<int>(io::parse_int(value)));
      else if (key == "start_edges") {
        for (const auto& pair : io::split(value, ' ')) {
          if (pair.empty()) continue;
          const auto ij = io::split(pair, '-');
          if (ij.size() != 2) throw Error(ErrorKind::io, file.string() + ": bad start edge '" + pair + "'");
          t.start_graph.toggle(Dyad::make(static_cast<int>(io::parse_int(ij[0])), static_cast<int>(io::parse_int(ij[1]))));
        }
      }
      continue;
    }
    if (!header) {
      header = true;
      continue;
    }
    const auto f = io::split(s);
    if (f.size() != 4) throw Error(ErrorKind::io, file.string() + ": bad row '" + s + "'");
    TrajectoryEvent e;
    e.time = io::parse_double(f[0]);
    e.dyad = Dyad::make(static_cast<int>(io::parse_int(f[1])), static_cast<int>(io::parse_int(f[2])));
    e.state_id = static_cast<int>(io::parse_int(f[3]));
    e.stats = state_of(e.state_id);
    t.events.push_back(e);
  }
  t.kind = EgpKind::parse(kind, nu);
  t.seed_stats = state_of(t.seed_state);
  return t;
}

void write_catalog(const std::filesystem::path& file, const StateCatalog& catalog) {
  auto out = io::open_out(file);
  out << "id,t_e,t_2s,t_m1,t_m2,t_d1,t_d2,q,known\n";
  for (std::size_t k = 0; k < catalog.size(); ++k) {
    out << k;
    for (auto x : catalog.stats(static_cast<int>(k)).v) out << ',' << x;
    out << ',' << io::fmt(catalog.q(static_cast<int>(k))) << ',' << (k < catalog.known() ? 1 : 0) << '\n';
  }
}

StateCatalog read_catalog(const std::filesystem::path& file) {
  const auto t = io::read_csv(file);
  StateCatalog c;
  const auto c_id = t.column("id"), c_q = t.column("q"), c_known = t.column("known");
  for (const auto& row : t.rows) {
    StatVector s;
    for (int k = 0; k < stat_count; ++k) s[k] = static_cast<std::int32_t>(io::parse_int(row[t.column(stat_names[k])]));
    const int id = c.id_of(s);
    if (id != static_cast<int>(io::parse_int(row[c_id]))) throw Error(ErrorKind::io, file.string() + ": ids not dense");
    c.q_[static_cast<std::size_t>(id)] = io::parse_double(row[c_q]);
    if (io::parse_int(row[c_known]) != 0) c.known_ = static_cast<std::size_t>(id) + 1;
  }
  return c;
}

}  // namespace tst
