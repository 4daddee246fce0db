#include "tst/state_space.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "tst/error.hpp"
#include "tst/io.hpp"

namespace tst {

int StateSpace::accumulate(const StatVector& s, std::uint64_t count) {
  auto [it, inserted] = index_.try_emplace(s, static_cast<int>(records_.size()));
  if (inserted) {
    StateRecord r;
    r.id = it->second;
    r.stats = s;
    records_.push_back(r);
    adjacency_valid_ = false;
  }
  records_[static_cast<std::size_t>(it->second)].count += count;
  total_ += count;
  finalized_ = false;
  return it->second;
}

void StateSpace::add_count(int id, std::uint64_t count) {
  records_[static_cast<std::size_t>(id)].count += count;
  total_ += count;
  finalized_ = false;
}

void StateSpace::record_transition(const StatVector& s, const StatVector& s2) {
  if (s == s2) return;
  const int a = find(s), b = find(s2);
  if (a < 0 || b < 0) throw Error(ErrorKind::dimension, "transition between unrecorded states");
  record_transition(a, b);
}

void StateSpace::record_transition(int a, int b) {
  if (a == b) return;
  if (transitions_.insert(key(a, b)).second) adjacency_valid_ = false;
}

bool StateSpace::has_transition(int a, int b) const { return a != b && transitions_.count(key(a, b)) > 0; }

int StateSpace::find(const StatVector& s) const {
  const auto it = index_.find(s);
  return it == index_.end() ? -1 : it->second;
}

void StateSpace::merge(const StateSpace& other) {
  std::vector<int> remap(other.records_.size());
  for (const auto& r : other.records_) remap[static_cast<std::size_t>(r.id)] = accumulate(r.stats, r.count);
  for (const auto& [a, b] : other.transitions())
    record_transition(remap[static_cast<std::size_t>(a)], remap[static_cast<std::size_t>(b)]);
}

void StateSpace::finalize(const Theta& theta) {
  if (records_.empty() || total_ == 0) throw Error(ErrorKind::empty_space, "no states recorded");
  const double log_total = std::log(static_cast<double>(total_));
  for (auto& r : records_) {
    r.q = potential(theta, r.stats);
    r.logp = std::log(static_cast<double>(r.count)) - log_total;
  }
  finalized_ = true;
}

std::vector<std::pair<int, int>> StateSpace::transitions() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(transitions_.size());
  for (auto k : transitions_) out.emplace_back(static_cast<int>(k >> 32), static_cast<int>(k & 0xffffffffu));
  std::sort(out.begin(), out.end());
  return out;
}

void StateSpace::build_adjacency() const {
  adjacency_.assign(records_.size(), {});
  for (auto k : transitions_) {
    const auto a = static_cast<std::size_t>(k >> 32), b = static_cast<std::size_t>(k & 0xffffffffu);
    adjacency_[a].push_back(static_cast<int>(b));
    adjacency_[b].push_back(static_cast<int>(a));
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
  adjacency_valid_ = true;
}

std::span<const int> StateSpace::neighbors(int id) const {
  if (!adjacency_valid_) build_adjacency();
  return adjacency_[static_cast<std::size_t>(id)];
}

double StateSpace::mean_degree() const {
  if (records_.empty()) return 0.0;
  return 2.0 * static_cast<double>(transitions_.size()) / static_cast<double>(records_.size());
}

StateSpace StateSpace::from_records(std::vector<StateRecord> records,
                                    const std::vector<std::pair<int, int>>& transitions) {
  StateSpace space;
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t k = 0; k < records.size(); ++k) {
    if (records[k].id != static_cast<int>(k)) throw Error(ErrorKind::io, "state ids are not dense");
    if (!space.index_.emplace(records[k].stats, records[k].id).second)
      throw Error(ErrorKind::io, "duplicate statistic vector for state " + std::to_string(k));
    space.total_ += records[k].count;
  }
  space.records_ = std::move(records);
  for (const auto& [a, b] : transitions) {
    if (a < 0 || b < 0 || static_cast<std::size_t>(std::max(a, b)) >= space.records_.size())
      throw Error(ErrorKind::io, "transition references unknown state");
    space.record_transition(a, b);
  }
  space.finalized_ = true;
  return space;
}

AlignedStates find_aligned_states(const StateSpace& space, double hi, double lo) {
  if (!space.finalized()) throw Error(ErrorKind::empty_space, "state space not finalized");
  const StateRecord* best[2] = {nullptr, nullptr};
  for (const auto& r : space.records()) {
    const double m1 = r.stats[st_match_b1], m2 = r.stats[st_match_b2];
    const int regime = (m1 > hi && m2 < lo) ? 0 : (m2 > hi && m1 < lo) ? 1 : -1;
    if (regime < 0) continue;
    if (!best[regime] || r.logp > best[regime]->logp) best[regime] = &r;
  }
  if (!best[0]) throw Error(ErrorKind::regime_not_found, "no state with t_m1 > hi and t_m2 < lo");
  if (!best[1]) throw Error(ErrorKind::regime_not_found, "no state with t_m2 > hi and t_m1 < lo");
  return {*best[0], *best[1]};
}

void write_states(const StateSpace& space, const std::filesystem::path& dir) {
  {
    auto out = io::open_out(dir / "states.csv");
    out << "id,t_e,t_2s,t_m1,t_m2,t_d1,t_d2,count,q,logp\n";
    for (const auto& r : space.records()) {
      out << r.id;
      for (auto x : r.stats.v) out << ',' << x;
      out << ',' << r.count << ',' << io::fmt(r.q) << ',' << io::fmt(r.logp) << '\n';
    }
  }
  auto out = io::open_out(dir / "transitions.csv");
  out << "src_id,dst_id\n";
  for (const auto& [a, b] : space.transitions()) out << a << ',' << b << '\n';
}

StateSpace read_states(const std::filesystem::path& dir) {
  const auto states = io::read_csv(dir / "states.csv");
  std::vector<StateRecord> records;
  records.reserve(states.rows.size());
  const auto c_id = states.column("id"), c_count = states.column("count"), c_q = states.column("q"),
             c_logp = states.column("logp");
  std::array<std::size_t, stat_count> c_stat{};
  for (int k = 0; k < stat_count; ++k) c_stat[k] = states.column(stat_names[k]);
  for (const auto& row : states.rows) {
    StateRecord r;
    r.id = static_cast<int>(io::parse_int(row[c_id]));
    for (int k = 0; k < stat_count; ++k) r.stats[k] = static_cast<std::int32_t>(io::parse_int(row[c_stat[k]]));
    r.count = static_cast<std::uint64_t>(io::parse_int(row[c_count]));
    r.q = io::parse_double(row[c_q]);
    r.logp = io::parse_double(row[c_logp]);
    records.push_back(r);
  }
  const auto trans = io::read_csv(dir / "transitions.csv");
  const auto c_src = trans.column("src_id"), c_dst = trans.column("dst_id");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(trans.rows.size());
  for (const auto& row : trans.rows)
    edges.emplace_back(static_cast<int>(io::parse_int(row[c_src])), static_cast<int>(io::parse_int(row[c_dst])));
  return StateSpace::from_records(std::move(records), edges);
}

}  // namespace tst
