#include "tst/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "tst/error.hpp"

namespace tst::io {

std::string fmt(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw Error(ErrorKind::io, "cannot format number");
  return std::string(buf, ptr);
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(std::string_view s) {
  const std::string t = trim(s);
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  double x = 0.0;
  const char* first = t.data();
  if (!t.empty() && t[0] == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), x);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
    throw Error(ErrorKind::io, "not a number: '" + t + "'");
  return x;
}

long long parse_int(std::string_view s) {
  const std::string t = trim(s);
  long long x = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
    throw Error(ErrorKind::io, "not an integer: '" + t + "'");
  return x;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t k = 0; k < header.size(); ++k)
    if (header[k] == name) return k;
  throw Error(ErrorKind::io, "missing column '" + std::string(name) + "'");
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto fields = split(t);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
    } else {
      if (fields.size() != table.header.size())
        throw Error(ErrorKind::io, path.string() + ": ragged row '" + t + "'");
      table.rows.push_back(std::move(fields));
    }
  }
  if (!have_header) throw Error(ErrorKind::io, path.string() + ": no header");
  return table;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  return out;
}

void write_graph(std::ostream& os, const Graph& g) {
  os << "n=" << g.n() << '\n';
  for (const auto& d : g.edges()) os << d.i << ' ' << d.j << '\n';
}

namespace {

int parse_header(const std::string& t) {
  if (t.rfind("n=", 0) != 0) throw Error(ErrorKind::io, "expected 'n=<N>' header, got '" + t + "'");
  return static_cast<int>(parse_int(std::string_view(t).substr(2)));
}

void parse_edge(Graph& g, const std::string& t) {
  std::istringstream ss(t);
  int i = -1, j = -1;
  if (!(ss >> i >> j)) throw Error(ErrorKind::io, "bad edge line '" + t + "'");
  const Dyad d = Dyad::make(i, j);
  g.validate(d);
  if (!g.has_edge(d.i, d.j)) g.toggle(d);
}

}  // namespace

Graph read_graph(std::istream& is) {
  std::string line;
  Graph g;
  bool have_header = false;
  while (std::getline(is, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!have_header) {
      g = Graph(parse_header(t));
      have_header = true;
    } else {
      parse_edge(g, t);
    }
  }
  if (!have_header) throw Error(ErrorKind::io, "graph without 'n=' header");
  return g;
}

void write_graphs(const std::filesystem::path& path, const std::vector<Graph>& graphs) {
  auto out = open_out(path);
  for (const auto& g : graphs) write_graph(out, g);
}

std::vector<Graph> read_graphs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::vector<Graph> graphs;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.rfind("n=", 0) == 0) {
      graphs.emplace_back(parse_header(t));
    } else {
      if (graphs.empty()) throw Error(ErrorKind::io, path.string() + ": edge before 'n=' header");
      parse_edge(graphs.back(), t);
    }
  }
  return graphs;
}

void write_attributes(const std::filesystem::path& path, const NodeAttributeTable& a) {
  auto out = open_out(path);
  out << "node,b1,b2\n";
  for (int i = 0; i < a.n(); ++i) out << i << ',' << a.b1(i) << ',' << a.b2(i) << '\n';
}

NodeAttributeTable read_attributes(const std::filesystem::path& path, bool one_based) {
  const auto table = read_csv(path);
  const auto c_node = table.column("node"), c_b1 = table.column("b1"), c_b2 = table.column("b2");
  const auto n = table.rows.size();
  std::vector<int> b1(n, -1), b2(n, -1);
  for (const auto& row : table.rows) {
    const long long node = parse_int(row[c_node]) - (one_based ? 1 : 0);
    if (node < 0 || static_cast<std::size_t>(node) >= n || b1[node] != -1)
      throw Error(ErrorKind::io, path.string() + ": bad or duplicate node id " + row[c_node]);
    b1[node] = static_cast<int>(parse_int(row[c_b1]));
    b2[node] = static_cast<int>(parse_int(row[c_b2]));
  }
  return {std::move(b1), std::move(b2)};
}

}  // namespace tst::io
