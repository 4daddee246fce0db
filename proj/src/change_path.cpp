#include "tst/change_path.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>

#include "tst/error.hpp"
#include "tst/io.hpp"

namespace tst {

const char* to_string(Milestone m) {
  switch (m) {
    case Milestone::plain: return "plain";
    case Milestone::source: return "source";
    case Milestone::target: return "target";
    case Milestone::intermediate: return "intermediate";
    case Milestone::transition: return "transition";
  }
  return "plain";
}

Milestone milestone_from_string(const std::string& s) {
  for (auto m : {Milestone::plain, Milestone::source, Milestone::target, Milestone::intermediate,
                 Milestone::transition})
    if (s == to_string(m)) return m;
  throw Error(ErrorKind::io, "unknown milestone '" + s + "'");
}

std::vector<double> change_coordinate(std::size_t len) {
  std::vector<double> c(len, 0.0);
  if (len < 2) return c;
  for (std::size_t i = 0; i < len; ++i) c[i] = static_cast<double>(i) / static_cast<double>(len - 1);
  return c;
}

ChangePath make_path(const StateSpace& space, std::vector<int> states) {
  ChangePath p;
  p.states = std::move(states);
  p.coords = change_coordinate(p.states.size());
  for (int id : p.states) {
    p.logp.push_back(space.record(id).logp);
    p.q.push_back(space.record(id).q);
  }
  p.milestones.assign(p.states.size(), Milestone::plain);
  if (!p.states.empty()) {
    p.milestones.front() = Milestone::source;
    if (p.states.size() > 1) p.milestones.back() = Milestone::target;
  }
  return p;
}

namespace {

constexpr double fixed_scale = 4294967296.0;  // 2^32

std::vector<int> trace(const std::vector<int>& pred, int v) {
  std::vector<int> path;
  for (; v >= 0; v = pred[static_cast<std::size_t>(v)]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

ChangePath mspcp(const StateSpace& space, int source, int target, PathWeight weight) {
  if (!space.finalized()) throw Error(ErrorKind::empty_space, "state space not finalized");
  const auto n = space.size();
  if (source < 0 || target < 0 || static_cast<std::size_t>(std::max(source, target)) >= n)
    throw Error(ErrorKind::disconnected_states, "source or target not in the state space");
  if (source == target) return make_path(space, {source});

  double q_max = -std::numeric_limits<double>::infinity();
  if (weight == PathWeight::q)
    for (const auto& r : space.records()) q_max = std::max(q_max, r.q);

  std::vector<std::int64_t> cost(n);
  for (std::size_t v = 0; v < n; ++v) {
    const auto& r = space.records()[v];
    const double c = weight == PathWeight::logp ? -r.logp : q_max - r.q;
    cost[v] = std::max<std::int64_t>(1, std::llround(c * fixed_scale));
  }

  constexpr auto inf = std::numeric_limits<std::int64_t>::max();
  std::vector<std::int64_t> dist(n, inf);
  std::vector<int> pred(n, -1);
  std::vector<char> done(n, 0);
  using Entry = std::pair<std::int64_t, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  dist[static_cast<std::size_t>(source)] = cost[static_cast<std::size_t>(source)];
  queue.emplace(dist[static_cast<std::size_t>(source)], source);

  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    const auto uu = static_cast<std::size_t>(u);
    if (done[uu] || d != dist[uu]) continue;
    done[uu] = 1;
    if (u == target) break;
    for (int v : space.neighbors(u)) {
      const auto vv = static_cast<std::size_t>(v);
      if (done[vv]) continue;
      if (dist[uu] > inf - cost[vv]) throw Error(ErrorKind::dimension, "path cost overflow");
      const std::int64_t nd = dist[uu] + cost[vv];
      if (nd < dist[vv]) {
        dist[vv] = nd;
        pred[vv] = u;
        queue.emplace(nd, v);
      } else if (nd == dist[vv] && pred[vv] != u) {
        // Compare whole paths: one trace may be a prefix of the other.
        auto via_u = trace(pred, u), via_old = trace(pred, pred[vv]);
        via_u.push_back(v);
        via_old.push_back(v);
        if (via_u < via_old) pred[vv] = u;
      }
    }
  }
  if (!done[static_cast<std::size_t>(target)])
    throw Error(ErrorKind::disconnected_states,
                "no path from state " + std::to_string(source) + " to " + std::to_string(target));
  return make_path(space, trace(pred, target));
}

std::vector<double> moving_median(const std::vector<double>& values, int window) {
  if (window < 1 || window % 2 == 0) throw Error(ErrorKind::config, "smoothing window must be odd and >= 1");
  const auto n = values.size();
  if (window == 1) return values;
  const std::size_t half = static_cast<std::size_t>(window / 2);
  std::vector<double> out(n), buf;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t h = std::min({half, i, n - 1 - i});
    buf.assign(values.begin() + static_cast<std::ptrdiff_t>(i - h), values.begin() + static_cast<std::ptrdiff_t>(i + h + 1));
    std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(h), buf.end());
    out[i] = buf[h];
  }
  return out;
}

std::vector<MilestoneLabel> find_milestones(const std::vector<double>& logp, int window) {
  if (logp.size() < 3) throw Error(ErrorKind::no_interior, "need at least 3 states, got " + std::to_string(logp.size()));
  const auto v = moving_median(logp, window);
  const auto coords = change_coordinate(v.size());
  std::vector<MilestoneLabel> out;
  std::size_t a = 1;
  while (a + 1 < v.size()) {
    std::size_t b = a;
    while (b + 1 < v.size() && v[b + 1] == v[a]) ++b;
    if (b + 1 < v.size()) {  // plateau [a, b] does not touch the target
      const double left = v[a - 1], right = v[b + 1];
      Milestone kind = Milestone::plain;
      if (left < v[a] && right < v[a]) kind = Milestone::intermediate;
      if (left > v[a] && right > v[a]) kind = Milestone::transition;
      if (kind != Milestone::plain) {
        const std::size_t mid = (a + b) / 2;
        out.push_back({kind, mid, coords[mid], logp[mid]});
      }
    }
    a = b + 1;
  }
  return out;
}

std::vector<MilestoneLabel> find_milestones(const ChangePath& path, int window) {
  return find_milestones(path.logp, window);
}

void annotate(ChangePath& path, const std::vector<MilestoneLabel>& labels) {
  path.milestones.assign(path.size(), Milestone::plain);
  if (path.size() > 0) path.milestones.front() = Milestone::source;
  if (path.size() > 1) path.milestones.back() = Milestone::target;
  for (const auto& l : labels) path.milestones[l.index] = l.kind;
}

std::vector<PathStatsRow> stats_along_path(const ChangePath& path, const std::vector<StatVector>& stats) {
  if (stats.size() != path.size()) throw Error(ErrorKind::dimension, "statistics do not match path length");
  std::array<double, stat_count> max{};
  for (const auto& s : stats)
    for (int k = 0; k < stat_count; ++k) max[k] = std::max(max[k], static_cast<double>(s[k]));
  std::vector<PathStatsRow> rows(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    auto& r = rows[i];
    r.coord = path.coords[i];
    r.id = path.states[i];
    r.stats = stats[i];
    for (int k = 0; k < stat_count; ++k) r.normalized[k] = max[k] > 0.0 ? stats[i][k] / max[k] : 0.0;
    r.q = path.q[i];
    r.logp = path.logp[i];
    r.milestone = path.milestones.empty() ? Milestone::plain : path.milestones[i];
  }
  return rows;
}

std::vector<PathStatsRow> stats_along_path(const ChangePath& path, const StateSpace& space) {
  std::vector<StatVector> stats;
  stats.reserve(path.size());
  for (int id : path.states) stats.push_back(space.record(id).stats);
  return stats_along_path(path, stats);
}

void write_path_csv(const std::filesystem::path& file, const std::vector<PathStatsRow>& rows) {
  auto out = io::open_out(file);
  out << "coord,id";
  for (auto name : stat_names) out << ',' << name;
  out << ",q,logp,milestone";
  for (auto name : stat_names) out << ",n_" << name;
  out << '\n';
  for (const auto& r : rows) {
    out << io::fmt(r.coord) << ',' << r.id;
    for (auto x : r.stats.v) out << ',' << x;
    out << ',' << io::fmt(r.q) << ',' << io::fmt(r.logp) << ',' << to_string(r.milestone);
    for (double x : r.normalized) out << ',' << io::fmt(x);
    out << '\n';
  }
}

std::vector<PathStatsRow> read_path_csv(const std::filesystem::path& file) {
  const auto t = io::read_csv(file);
  const auto c_coord = t.column("coord"), c_id = t.column("id"), c_q = t.column("q"), c_logp = t.column("logp"),
             c_m = t.column("milestone");
  std::vector<PathStatsRow> rows;
  for (const auto& row : t.rows) {
    PathStatsRow r;
    r.coord = io::parse_double(row[c_coord]);
    r.id = static_cast<int>(io::parse_int(row[c_id]));
    for (int k = 0; k < stat_count; ++k) {
      r.stats[k] = static_cast<std::int32_t>(io::parse_int(row[t.column(stat_names[k])]));
      r.normalized[k] = io::parse_double(row[t.column(std::string("n_") + stat_names[k])]);
    }
    r.q = io::parse_double(row[c_q]);
    r.logp = io::parse_double(row[c_logp]);
    r.milestone = milestone_from_string(row[c_m]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace tst
