#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "tst/change_path.hpp"
#include "tst/egp.hpp"

namespace tst {

/// Fewest-hop source -> target path through the digraph of observed consecutive
/// transitions. Among equally short paths the one reached first in breadth-first
/// order wins, with successors visited in order of their first appearance in the walk.
std::vector<int> prune_to_path(const std::vector<int>& walk, int source, int target);
std::vector<int> prune_to_path(const Trajectory& t);

/// Path over catalog ids with coordinates and potentials; logp is taken from the
/// state space for states it knows and left as -inf otherwise.
ChangePath make_catalog_path(const StateCatalog& catalog, const StateSpace* space, std::vector<int> states);

enum class PathClass { primary, secondary };
const char* to_string(PathClass c);

struct Classification {
  PathClass label = PathClass::primary;
  std::size_t neutral_index = 0;  // first path state minimising |t_m1 - t_m2|
  int neutral_edges = 0;
  double tau = 0.0;               // (max edges on the MSPCP + source edges) / 2
};

/// Primary iff the edge count at the polarization-neutral point reaches tau.
Classification classify_path(const std::vector<StatVector>& path, const std::vector<StatVector>& mspcp);

struct HighRoad {
  bool holds = false;
  int max_edges = 0;
  int source_edges = 0;
  double m2_reach = 1.0;  // first coordinate with normalized t_m2 >= 0.9
  double m1_fall = 0.0;   // coordinate where normalized t_m1 last drops below 0.9
};

/// Realignment through the dense side: the edge count rises above the source's, and
/// cross ties matched on b2 build up before those matched on b1 erode.
HighRoad high_road(const std::vector<StatVector>& path, double level = 0.9);

/// Monotone (Fritsch-Carlson) cubic interpolant through (x_k, y_k), x strictly increasing.
class MonotoneSpline {
 public:
  MonotoneSpline() = default;
  MonotoneSpline(std::vector<double> x, std::vector<double> y);
  double operator()(double t) const;

 private:
  std::vector<double> x_, y_, slope_;
};

struct AlignOptions {
  int grid = 201;
  int knots = 9;
  double tolerance = 1e-6;
  int max_sweeps = 100;
  double min_gap = 1e-6;
};

/// One path resampled on the common grid after warping. warp holds the original
/// coordinate at each of the knots+2 equally spaced aligned coordinates, so the
/// aligned value at grid point g is the interpolated profile at warp(g).
struct AlignedCurve {
  std::vector<double> grid;
  std::vector<double> q;
  std::array<std::vector<double>, stat_count> stats;
  std::vector<double> warp;
};

struct AlignmentResult {
  std::vector<AlignedCurve> curves;
  double rmse_before = 0.0;  // mean RMSE against the mean curve with identity warps
  double rmse_after = 0.0;
  int sweeps = 0;
  std::vector<double> history;  // objective after every accepted sweep
};

/// Potential profiles are indexed by their change coordinate. Warps are fitted by
/// block coordinate descent, one knot at a time, against the cross-path mean curve,
/// which is recomputed after every sweep; a sweep that would raise the mean RMSE is
/// rejected and ends the search.
AlignmentResult align(const std::vector<std::vector<double>>& q_profiles,
                      const std::vector<std::vector<StatVector>>& stat_profiles, const AlignOptions& opt = {});

/// Pointwise mean of q and of the per-curve max-normalized statistics.
AlignedCurve mean_curves(const std::vector<AlignedCurve>& curves);

/// Type-7 sample quantile of sorted data.
double quantile_sorted(const std::vector<double>& sorted, double p);

struct LengthSummary {
  std::string egp;
  std::string kind;  // walk, path or ratio
  std::size_t n = 0;
  double median = 0.0, q1 = 0.0, q3 = 0.0, notch_lo = 0.0, notch_hi = 0.0;
};

/// Median, quartiles and notch median +- 1.57 IQR / sqrt(n).
LengthSummary summarize(const std::string& egp, const std::string& kind, std::vector<double> values);

struct PathRecord {
  std::string traj_id;
  std::string egp;
  Classification cls;
  std::size_t path_len = 0;  // hops, states - 1
  std::size_t walk_len = 0;  // events after truncation
  int neutral_components = 0;
  bool high_road = false;
};

/// Walk, path and per-trajectory walk/path ratio summaries for each EGP, in first-seen order.
std::vector<LengthSummary> length_stats(const std::vector<PathRecord>& records);

/// Connected components of the graph reached at the walk's first visit to state_id,
/// replaying events from start_graph; singletons count as components.
int components_at(const Trajectory& t, int state_id);
int count_components(const Graph& g);

void write_paths_csv(const std::filesystem::path& file, const std::vector<PathRecord>& records);
std::vector<PathRecord> read_paths_csv(const std::filesystem::path& file);
void write_curve_csv(const std::filesystem::path& file, const AlignedCurve& curve);
void write_lengths_csv(const std::filesystem::path& file, const std::vector<LengthSummary>& rows);
std::vector<LengthSummary> read_lengths_csv(const std::filesystem::path& file);

}  // namespace tst
