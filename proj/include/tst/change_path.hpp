#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "tst/state_space.hpp"

namespace tst {

enum class Milestone { plain, source, target, intermediate, transition };
const char* to_string(Milestone m);
Milestone milestone_from_string(const std::string& s);

struct ChangePath {
  std::vector<int> states;
  std::vector<double> coords;
  std::vector<double> logp;
  std::vector<double> q;
  std::vector<Milestone> milestones;

  std::size_t size() const { return states.size(); }
};

struct MilestoneLabel {
  Milestone kind = Milestone::plain;  // intermediate or transition
  std::size_t index = 0;
  double coord = 0.0;
  double logp = 0.0;
};

enum class PathWeight { logp, q };

/// Evenly spaced change coordinates i / (len - 1); a single state gets 0.
std::vector<double> change_coordinate(std::size_t len);

/// Path maximizing the summed node weight (log state probability, or potential
/// shifted to be non-positive) between two states. Node costs are converted to
/// 2^-32 fixed point so that equal-cost paths are detected exactly; among those the
/// lexicographically smallest id sequence wins.
ChangePath mspcp(const StateSpace& space, int source, int target, PathWeight weight = PathWeight::logp);

/// Fills coords, logp, q and source/target labels for an id sequence.
ChangePath make_path(const StateSpace& space, std::vector<int> states);

/// Centered moving median, window shrunk symmetrically near the ends. w must be odd.
std::vector<double> moving_median(const std::vector<double>& values, int window);

/// Strict interior local maxima (intermediates) and minima (transition states) of
/// the smoothed logp. A plateau counts once, at its midpoint, when both flanks are
/// strictly lower (or higher).
std::vector<MilestoneLabel> find_milestones(const std::vector<double>& logp, int window = 1);
std::vector<MilestoneLabel> find_milestones(const ChangePath& path, int window = 1);
/// Writes the labels into path.milestones.
void annotate(ChangePath& path, const std::vector<MilestoneLabel>& labels);

struct PathStatsRow {
  double coord = 0.0;
  int id = 0;
  StatVector stats;
  std::array<double, stat_count> normalized{};
  double q = 0.0;
  double logp = 0.0;
  Milestone milestone = Milestone::plain;
};

/// Raw statistics per path state, each also divided by its maximum along the path (0/0 -> 0).
std::vector<PathStatsRow> stats_along_path(const ChangePath& path, const StateSpace& space);
std::vector<PathStatsRow> stats_along_path(const ChangePath& path, const std::vector<StatVector>& stats);

void write_path_csv(const std::filesystem::path& file, const std::vector<PathStatsRow>& rows);
std::vector<PathStatsRow> read_path_csv(const std::filesystem::path& file);

}  // namespace tst
