#include "tst/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

#include "tst/error.hpp"
#include "tst/io.hpp"

namespace tst {

std::vector<int> prune_to_path(const std::vector<int>& walk, int source, int target) {
  if (walk.empty() || walk.front() != source)
    throw Error(ErrorKind::malformed_trajectory, "walk does not start in the source state");
  // Dense local ids in order of first visit, so adjacency order is first-visit order.
  std::unordered_map<int, int> local;
  std::vector<int> global;
  std::vector<int> seq;
  seq.reserve(walk.size());
  for (int s : walk) {
    auto [it, inserted] = local.try_emplace(s, static_cast<int>(global.size()));
    if (inserted) global.push_back(s);
    seq.push_back(it->second);
  }
  const auto tgt = local.find(target);
  if (tgt == local.end()) throw Error(ErrorKind::malformed_trajectory, "walk never reaches the target state");
  std::vector<std::vector<int>> succ(global.size());
  for (std::size_t k = 1; k < seq.size(); ++k)
    if (seq[k] != seq[k - 1]) succ[static_cast<std::size_t>(seq[k - 1])].push_back(seq[k]);
  for (auto& s : succ) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  std::vector<int> parent(global.size(), -1);
  std::vector<char> seen(global.size(), 0);
  std::vector<int> queue{0};
  seen[0] = 1;
  for (std::size_t head = 0; head < queue.size() && !seen[static_cast<std::size_t>(tgt->second)]; ++head) {
    const int u = queue[head];
    for (int v : succ[static_cast<std::size_t>(u)]) {
      if (seen[static_cast<std::size_t>(v)]) continue;
      seen[static_cast<std::size_t>(v)] = 1;
      parent[static_cast<std::size_t>(v)] = u;
      queue.push_back(v);
    }
  }
  if (!seen[static_cast<std::size_t>(tgt->second)])
    throw Error(ErrorKind::malformed_trajectory, "target unreachable in the visit digraph");
  std::vector<int> path;
  for (int v = tgt->second; v != -1; v = parent[static_cast<std::size_t>(v)])
    path.push_back(global[static_cast<std::size_t>(v)]);
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<int> prune_to_path(const Trajectory& t) {
  return prune_to_path(t.state_ids(), t.seed_state, t.events.empty() ? t.seed_state : t.events.back().state_id);
}

ChangePath make_catalog_path(const StateCatalog& catalog, const StateSpace* space, std::vector<int> states) {
  ChangePath p;
  p.coords = change_coordinate(states.size());
  for (int id : states) {
    p.q.push_back(catalog.q(id));
    double lp = -std::numeric_limits<double>::infinity();
    if (space && static_cast<std::size_t>(id) < catalog.known()) lp = space->record(id).logp;
    p.logp.push_back(lp);
  }
  p.milestones.assign(states.size(), Milestone::plain);
  if (!states.empty()) {
    p.milestones.front() = Milestone::source;
    if (states.size() > 1) p.milestones.back() = Milestone::target;
  }
  p.states = std::move(states);
  return p;
}

const char* to_string(PathClass c) { return c == PathClass::primary ? "primary" : "secondary"; }

Classification classify_path(const std::vector<StatVector>& path, const std::vector<StatVector>& mspcp) {
  if (path.empty() || mspcp.empty()) throw Error(ErrorKind::empty_input, "classification needs non-empty paths");
  Classification c;
  int best = std::numeric_limits<int>::max();
  for (std::size_t k = 0; k < path.size(); ++k) {
    const int pol = std::abs(path[k][st_match_b1] - path[k][st_match_b2]);
    if (pol < best) {
      best = pol;
      c.neutral_index = k;
    }
  }
  c.neutral_edges = path[c.neutral_index][st_edges];
  int max_e = 0;
  for (const auto& s : mspcp) max_e = std::max(max_e, s[st_edges]);
  c.tau = 0.5 * (max_e + mspcp.front()[st_edges]);
  c.label = c.neutral_edges >= c.tau ? PathClass::primary : PathClass::secondary;
  return c;
}

HighRoad high_road(const std::vector<StatVector>& path, double level) {
  HighRoad h;
  if (path.empty()) return h;
  const auto coords = change_coordinate(path.size());
  int max_m1 = 0, max_m2 = 0;
  for (const auto& s : path) {
    h.max_edges = std::max(h.max_edges, s[st_edges]);
    max_m1 = std::max(max_m1, s[st_match_b1]);
    max_m2 = std::max(max_m2, s[st_match_b2]);
  }
  h.source_edges = path.front()[st_edges];
  auto norm = [](int x, int m) { return m == 0 ? 0.0 : static_cast<double>(x) / m; };
  bool reached = false;
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (!reached && norm(path[k][st_match_b2], max_m2) >= level) {
      h.m2_reach = coords[k];
      reached = true;
    }
    if (k > 0 && norm(path[k][st_match_b1], max_m1) < level && norm(path[k - 1][st_match_b1], max_m1) >= level)
      h.m1_fall = coords[k];
  }
  h.holds = h.max_edges > h.source_edges && h.m2_reach < h.m1_fall;
  return h;
}

MonotoneSpline::MonotoneSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n == 0 || n != y_.size()) throw Error(ErrorKind::dimension, "spline needs matching non-empty knots");
  for (std::size_t k = 1; k < n; ++k)
    if (!(x_[k] > x_[k - 1])) throw Error(ErrorKind::dimension, "spline knots must increase strictly");
  slope_.assign(n, 0.0);
  if (n == 1) return;
  std::vector<double> d(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) d[k] = (y_[k + 1] - y_[k]) / (x_[k + 1] - x_[k]);
  slope_[0] = d[0];
  slope_[n - 1] = d[n - 2];
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (d[k - 1] * d[k] <= 0.0) continue;
    // Weighted harmonic mean keeps each segment monotone.
    const double h0 = x_[k] - x_[k - 1], h1 = x_[k + 1] - x_[k];
    const double w0 = 2 * h1 + h0, w1 = h1 + 2 * h0;
    slope_[k] = (w0 + w1) / (w0 / d[k - 1] + w1 / d[k]);
  }
}

double MonotoneSpline::operator()(double t) const {
  const std::size_t n = x_.size();
  if (n == 1 || t <= x_.front()) return y_.front();
  if (t >= x_.back()) return y_.back();
  const std::size_t k =
      static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin()) - 1;
  const double h = x_[k + 1] - x_[k];
  const double s = (t - x_[k]) / h;
  const double s2 = s * s, s3 = s2 * s;
  // Increment form: a flat segment evaluates to exactly y_k.
  return y_[k] + (3 * s2 - 2 * s3) * (y_[k + 1] - y_[k]) + h * ((s3 - 2 * s2 + s) * slope_[k] + (s3 - s2) * slope_[k + 1]);
}

namespace {

double piecewise_linear(const std::vector<double>& values, double g) {
  const std::size_t segments = values.size() - 1;
  const double pos = g * static_cast<double>(segments);
  std::size_t k = static_cast<std::size_t>(pos);
  if (k >= segments) return values.back();
  const double f = pos - static_cast<double>(k);
  return values[k] + f * (values[k + 1] - values[k]);
}

MonotoneSpline profile_spline(const std::vector<double>& y) {
  return MonotoneSpline(change_coordinate(y.size()), y);
}

struct WarpState {
  std::vector<MonotoneSpline> splines;
  std::vector<std::vector<double>> warps;
  std::vector<double> grid;

  double curve(std::size_t p, std::size_t g, const std::vector<double>& warp) const {
    return splines[p](piecewise_linear(warp, grid[g]));
  }
  std::vector<double> mean() const {
    std::vector<double> m(grid.size(), 0.0);
    for (std::size_t p = 0; p < splines.size(); ++p)
      for (std::size_t g = 0; g < grid.size(); ++g) m[g] += curve(p, g, warps[p]);
    for (double& x : m) x /= static_cast<double>(splines.size());
    return m;
  }
  double objective(const std::vector<double>& m) const {
    double total = 0.0;
    for (std::size_t p = 0; p < splines.size(); ++p) {
      double ss = 0.0;
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const double r = curve(p, g, warps[p]) - m[g];
        ss += r * r;
      }
      total += std::sqrt(ss / static_cast<double>(grid.size()));
    }
    return total / static_cast<double>(splines.size());
  }
};

// Squared residual of path p against m over the grid points whose warp depends on knot k.
double local_ss(const WarpState& st, std::size_t p, const std::vector<double>& warp, const std::vector<double>& m,
                std::size_t lo, std::size_t hi) {
  double ss = 0.0;
  for (std::size_t g = lo; g < hi; ++g) {
    const double r = st.curve(p, g, warp) - m[g];
    ss += r * r;
  }
  return ss;
}

void fit_knot(const WarpState& st, std::size_t p, std::size_t k, std::vector<double>& warp,
              const std::vector<double>& m, const AlignOptions& opt) {
  const double segments = static_cast<double>(warp.size() - 1);
  const double a0 = static_cast<double>(k - 1) / segments, a1 = static_cast<double>(k + 1) / segments;
  const std::size_t n = st.grid.size();
  std::size_t lo = 0, hi = n;
  while (lo < n && st.grid[lo] <= a0) ++lo;
  while (hi > lo && st.grid[hi - 1] >= a1) --hi;
  if (lo >= hi) return;
  const double left = warp[k - 1] + opt.min_gap, right = warp[k + 1] - opt.min_gap;
  if (!(right > left)) return;
  const double current = warp[k];
  auto f = [&](double v) {
    warp[k] = v;
    return local_ss(st, p, warp, m, lo, hi);
  };
  const double f_current = f(current);
  constexpr int coarse = 16;
  double best_v = current, best_f = f_current;
  int best_i = -1;
  for (int i = 0; i <= coarse; ++i) {
    const double v = left + (right - left) * i / coarse;
    const double fv = f(v);
    if (fv < best_f) {
      best_f = fv;
      best_v = v;
      best_i = i;
    }
  }
  if (best_i >= 0) {
    double a = left + (right - left) * std::max(0, best_i - 1) / coarse;
    double b = left + (right - left) * std::min(coarse, best_i + 1) / coarse;
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - ratio * (b - a), d = a + ratio * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 40 && b - a > 1e-9; ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - ratio * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + ratio * (b - a);
        fd = f(d);
      }
    }
    const double v = fc < fd ? c : d;
    const double fv = std::min(fc, fd);
    if (fv < best_f) {
      best_f = fv;
      best_v = v;
    }
  }
  warp[k] = best_f < f_current ? best_v : current;
}

}  // namespace

AlignmentResult align(const std::vector<std::vector<double>>& q_profiles,
                      const std::vector<std::vector<StatVector>>& stat_profiles, const AlignOptions& opt) {
  if (q_profiles.empty()) throw Error(ErrorKind::empty_input, "no paths to align");
  if (q_profiles.size() != stat_profiles.size())
    throw Error(ErrorKind::dimension, "potential and statistic profiles differ in count");
  if (opt.grid < 2 || opt.knots < 0 || opt.max_sweeps < 0 || !(opt.min_gap > 0.0))
    throw Error(ErrorKind::config, "invalid alignment options");
  for (std::size_t p = 0; p < q_profiles.size(); ++p)
    if (q_profiles[p].empty() || q_profiles[p].size() != stat_profiles[p].size())
      throw Error(ErrorKind::dimension, "profile " + std::to_string(p) + " is empty or inconsistent");

  WarpState st;
  st.grid = change_coordinate(static_cast<std::size_t>(opt.grid));
  for (const auto& q : q_profiles) st.splines.push_back(profile_spline(q));
  st.warps.assign(q_profiles.size(), change_coordinate(static_cast<std::size_t>(opt.knots) + 2));

  AlignmentResult res;
  std::vector<double> m = st.mean();
  double objective = st.objective(m);
  res.rmse_before = objective;
  if (q_profiles.size() > 1) {
    for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
      const auto previous = st.warps;
      for (std::size_t p = 0; p < st.warps.size(); ++p)
        for (std::size_t k = 1; k + 1 < st.warps[p].size(); ++k) fit_knot(st, p, k, st.warps[p], m, opt);
      const auto m_next = st.mean();
      const double next = st.objective(m_next);
      if (next > objective) {
        st.warps = previous;
        break;
      }
      ++res.sweeps;
      res.history.push_back(next);
      const double gain = objective - next;
      objective = next;
      m = m_next;
      if (gain < opt.tolerance) break;
    }
  }
  res.rmse_after = objective;

  for (std::size_t p = 0; p < q_profiles.size(); ++p) {
    AlignedCurve c;
    c.grid = st.grid;
    c.warp = st.warps[p];
    std::array<MonotoneSpline, stat_count> stat_splines;
    for (int f = 0; f < stat_count; ++f) {
      std::vector<double> y;
      for (const auto& s : stat_profiles[p]) y.push_back(s[f]);
      stat_splines[f] = profile_spline(y);
    }
    for (std::size_t g = 0; g < st.grid.size(); ++g) {
      const double u = piecewise_linear(c.warp, st.grid[g]);
      c.q.push_back(st.splines[p](u));
      for (int f = 0; f < stat_count; ++f) c.stats[f].push_back(stat_splines[f](u));
    }
    res.curves.push_back(std::move(c));
  }
  return res;
}

AlignedCurve mean_curves(const std::vector<AlignedCurve>& curves) {
  if (curves.empty()) throw Error(ErrorKind::empty_input, "no curves to average");
  const auto& grid = curves.front().grid;
  AlignedCurve out;
  out.grid = grid;
  out.q.assign(grid.size(), 0.0);
  for (auto& s : out.stats) s.assign(grid.size(), 0.0);
  for (const auto& c : curves) {
    if (c.grid != grid || c.q.size() != grid.size()) throw Error(ErrorKind::dimension, "curves use different grids");
    for (std::size_t g = 0; g < grid.size(); ++g) out.q[g] += c.q[g];
    for (int f = 0; f < stat_count; ++f) {
      if (c.stats[f].size() != grid.size()) throw Error(ErrorKind::dimension, "curves use different grids");
      const double mx = *std::max_element(c.stats[f].begin(), c.stats[f].end());
      for (std::size_t g = 0; g < grid.size(); ++g) out.stats[f][g] += mx == 0.0 ? 0.0 : c.stats[f][g] / mx;
    }
  }
  const double n = static_cast<double>(curves.size());
  for (double& x : out.q) x /= n;
  for (auto& s : out.stats)
    for (double& x : s) x /= n;
  return out;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw Error(ErrorKind::empty_input, "quantile of no values");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

LengthSummary summarize(const std::string& egp, const std::string& kind, std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::empty_input, "no " + kind + " lengths for " + egp);
  std::sort(values.begin(), values.end());
  LengthSummary s;
  s.egp = egp;
  s.kind = kind;
  s.n = values.size();
  s.median = quantile_sorted(values, 0.5);
  s.q1 = quantile_sorted(values, 0.25);
  s.q3 = quantile_sorted(values, 0.75);
  const double half = 1.57 * (s.q3 - s.q1) / std::sqrt(static_cast<double>(s.n));
  s.notch_lo = s.median - half;
  s.notch_hi = s.median + half;
  return s;
}

std::vector<LengthSummary> length_stats(const std::vector<PathRecord>& records) {
  if (records.empty()) throw Error(ErrorKind::empty_input, "no trajectories to summarize");
  std::vector<std::string> order;
  std::map<std::string, std::array<std::vector<double>, 3>> by_egp;
  for (const auto& r : records) {
    auto [it, inserted] = by_egp.try_emplace(r.egp);
    if (inserted) order.push_back(r.egp);
    it->second[0].push_back(static_cast<double>(r.walk_len));
    it->second[1].push_back(static_cast<double>(r.path_len));
    it->second[2].push_back(r.path_len == 0 ? 0.0 : static_cast<double>(r.walk_len) / static_cast<double>(r.path_len));
  }
  std::vector<LengthSummary> out;
  for (const auto& egp : order) {
    const auto& v = by_egp[egp];
    out.push_back(summarize(egp, "walk", v[0]));
    out.push_back(summarize(egp, "path", v[1]));
    out.push_back(summarize(egp, "ratio", v[2]));
  }
  return out;
}

int count_components(const Graph& g) {
  const int n = g.n();
  std::uint64_t unseen = n == 64 ? ~0ull : ((1ull << n) - 1);
  int components = 0;
  while (unseen) {
    std::uint64_t frontier = unseen & (~unseen + 1);
    std::uint64_t comp = 0;
    while (frontier) {
      comp |= frontier;
      std::uint64_t next = 0;
      for (std::uint64_t f = frontier; f; f &= f - 1) next |= g.row(std::countr_zero(f));
      frontier = next & ~comp;
    }
    unseen &= ~comp;
    ++components;
  }
  return components;
}

int components_at(const Trajectory& t, int state_id) {
  Graph g = t.start_graph;
  if (t.seed_state == state_id) return count_components(g);
  for (const auto& e : t.events) {
    g.toggle(e.dyad);
    if (e.state_id == state_id) return count_components(g);
  }
  throw Error(ErrorKind::malformed_trajectory, "state " + std::to_string(state_id) + " not visited");
}

void write_paths_csv(const std::filesystem::path& file, const std::vector<PathRecord>& records) {
  auto out = io::open_out(file);
  out << "traj_id,egp,class,path_len,walk_len,neutral_edge_count,tau,neutral_components,high_road\n";
  for (const auto& r : records)
    out << r.traj_id << ',' << r.egp << ',' << to_string(r.cls.label) << ',' << r.path_len << ',' << r.walk_len << ','
        << r.cls.neutral_edges << ',' << io::fmt(r.cls.tau) << ',' << r.neutral_components << ','
        << (r.high_road ? 1 : 0) << '\n';
}

std::vector<PathRecord> read_paths_csv(const std::filesystem::path& file) {
  const auto t = io::read_csv(file);
  std::vector<PathRecord> out;
  const auto id = t.column("traj_id"), egp = t.column("egp"), cls = t.column("class"), pl = t.column("path_len"),
             wl = t.column("walk_len"), ne = t.column("neutral_edge_count"), tau = t.column("tau"),
             nc = t.column("neutral_components"), hr = t.column("high_road");
  for (const auto& row : t.rows) {
    PathRecord r;
    r.traj_id = row[id];
    r.egp = row[egp];
    if (row[cls] != "primary" && row[cls] != "secondary")
      throw Error(ErrorKind::io, file.string() + ": bad class '" + row[cls] + "'");
    r.cls.label = row[cls] == "primary" ? PathClass::primary : PathClass::secondary;
    r.path_len = static_cast<std::size_t>(io::parse_int(row[pl]));
    r.walk_len = static_cast<std::size_t>(io::parse_int(row[wl]));
    r.cls.neutral_edges = static_cast<int>(io::parse_int(row[ne]));
    r.cls.tau = io::parse_double(row[tau]);
    r.neutral_components = static_cast<int>(io::parse_int(row[nc]));
    r.high_road = io::parse_int(row[hr]) != 0;
    out.push_back(std::move(r));
  }
  return out;
}

void write_curve_csv(const std::filesystem::path& file, const AlignedCurve& curve) {
  auto out = io::open_out(file);
  out << "coord,q";
  for (const char* name : stat_names) out << ",n_" << name;
  out << '\n';
  for (std::size_t g = 0; g < curve.grid.size(); ++g) {
    out << io::fmt(curve.grid[g]) << ',' << io::fmt(curve.q[g]);
    for (int f = 0; f < stat_count; ++f) out << ',' << io::fmt(curve.stats[f][g]);
    out << '\n';
  }
}

void write_lengths_csv(const std::filesystem::path& file, const std::vector<LengthSummary>& rows) {
  auto out = io::open_out(file);
  out << "egp,kind,median,q1,q3,notch_lo,notch_hi,n\n";
  for (const auto& r : rows)
    out << r.egp << ',' << r.kind << ',' << io::fmt(r.median) << ',' << io::fmt(r.q1) << ',' << io::fmt(r.q3) << ','
        << io::fmt(r.notch_lo) << ',' << io::fmt(r.notch_hi) << ',' << r.n << '\n';
}

std::vector<LengthSummary> read_lengths_csv(const std::filesystem::path& file) {
  const auto t = io::read_csv(file);
  std::vector<LengthSummary> out;
  const auto egp = t.column("egp"), kind = t.column("kind"), med = t.column("median"), q1 = t.column("q1"),
             q3 = t.column("q3"), lo = t.column("notch_lo"), hi = t.column("notch_hi"), n = t.column("n");
  for (const auto& row : t.rows) {
    LengthSummary s;
    s.egp = row[egp];
    s.kind = row[kind];
    s.median = io::parse_double(row[med]);
    s.q1 = io::parse_double(row[q1]);
    s.q3 = io::parse_double(row[q3]);
    s.notch_lo = io::parse_double(row[lo]);
    s.notch_hi = io::parse_double(row[hi]);
    s.n = static_cast<std::size_t>(io::parse_int(row[n]));
    out.push_back(s);
  }
  return out;
}

}  // namespace tst
