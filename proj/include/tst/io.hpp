#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tst/graph.hpp"

namespace tst::io {

/// Shortest decimal that round-trips to the same double.
std::string fmt(double x);

std::vector<std::string> split(std::string_view line, char sep = ',');
std::string trim(std::string_view s);

double parse_double(std::string_view s);
long long parse_int(std::string_view s);

/// Header row plus data rows; blank lines and lines starting with '#' are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Throws io error when the column is missing.
  std::size_t column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

/// Opens for writing, creating parent directories; throws io error on failure.
std::ofstream open_out(const std::filesystem::path& path);

/// "n=<N>" header followed by one 0-based "i j" line per edge.
void write_graph(std::ostream& os, const Graph& g);
Graph read_graph(std::istream& is);
/// Consecutive graph blocks, each introduced by its own "n=" line.
void write_graphs(const std::filesystem::path& path, const std::vector<Graph>& graphs);
std::vector<Graph> read_graphs(const std::filesystem::path& path);

/// CSV with columns node,b1,b2. Node ids are 0-based unless `one_based`.
void write_attributes(const std::filesystem::path& path, const NodeAttributeTable& a);
NodeAttributeTable read_attributes(const std::filesystem::path& path, bool one_based = false);

}  // namespace tst::io
