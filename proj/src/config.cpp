#include "tst/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tst/egp.hpp"
#include "tst/error.hpp"
#include "tst/io.hpp"

namespace tst {

using nlohmann::json;

namespace {

// Reads the members of one object, failing on anything it was not asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw Error(ErrorKind::config, where() + " must be an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!it->is_number_integer()) throw Error(ErrorKind::config, name(key) + " must be an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (it->is_number_unsigned() || it->template get<long long>() >= 0) {
            out = it->template get<T>();
            return;
          }
          throw Error(ErrorKind::config, name(key) + " must be non-negative");
        }
      }
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw Error(ErrorKind::config, name(key) + ": " + e.what());
    }
  }

  Section child(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    static const json empty = json::object();
    return Section(it == j_.end() ? empty : *it, name(key));
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw Error(ErrorKind::config, "unknown key " + name(k.c_str()));
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }
  std::string name(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json theta_json(const Theta& t) {
  return {{"edge", t.edge},       {"twostar", t.twostar}, {"match_b1", t.match_b1},
          {"match_b2", t.match_b2}, {"tri_b1", t.tri_b1},   {"tri_b2", t.tri_b2}};
}

json semantic_json(const RunConfig& c) {
  return {
      {"schema", c.schema},
      {"model", {{"n", c.model.n}, {"attributes_file", c.model.attributes_file}, {"theta", theta_json(c.model.theta)}}},
      {"sampling",
       {{"chains", c.sampling.chains},
        {"steps", c.sampling.steps},
        {"burnin", c.sampling.burnin},
        {"thin", c.sampling.thin},
        {"heat", c.sampling.heat},
        {"seed", c.sampling.seed}}},
      {"thresholds", {{"hi", c.thresholds.hi}, {"lo", c.thresholds.lo}}},
      {"egp",
       {{"kinds", c.egp.kinds},
        {"nu", c.egp.nu},
        {"trajectories", c.egp.trajectories},
        {"event_budget", c.egp.event_budget},
        {"seed", c.egp.seed},
        {"rejection",
         {{"burnin", c.egp.rejection.burnin},
          {"thin", c.egp.rejection.thin},
          {"batch", c.egp.rejection.batch},
          {"max_batches", c.egp.rejection.max_batches}}}}},
      {"analysis", {{"grid", c.analysis.grid}, {"knots", c.analysis.knots}, {"window", c.analysis.window}}},
  };
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::config, what);
}

}  // namespace

void RunConfig::validate() const {
  require(schema == config_schema, "unsupported schema " + std::to_string(schema));
  require(model.n >= 2 && model.n <= max_nodes, "model.n must be in [2, 64]");
  require(model.theta.finite(), "model.theta must be finite");
  require(sampling.chains >= 1, "sampling.chains must be >= 1");
  require(sampling.steps >= 1, "sampling.steps must be >= 1");
  require(sampling.thin >= 1, "sampling.thin must be >= 1");
  require(std::isfinite(sampling.heat) && sampling.heat > 0, "sampling.heat must be > 0");
  require(thresholds.hi >= 0 && thresholds.lo >= 0, "thresholds must be >= 0");
  require(!egp.kinds.empty(), "egp.kinds must not be empty");
  std::set<std::string> kinds;
  for (const auto& k : egp.kinds) {
    EgpKind::parse(k, egp.nu);
    require(kinds.insert(k).second, "egp.kinds lists " + k + " twice");
  }
  require(std::isfinite(egp.nu) && egp.nu > 0, "egp.nu must be > 0");
  require(egp.trajectories >= 1, "egp.trajectories must be >= 1");
  require(egp.event_budget >= 1, "egp.event_budget must be >= 1");
  require(egp.rejection.thin >= 1 && egp.rejection.batch >= 1 && egp.rejection.max_batches >= 1,
          "egp.rejection thin, batch and max_batches must be >= 1");
  require(analysis.grid >= 2, "analysis.grid must be >= 2");
  require(analysis.knots >= 0, "analysis.knots must be >= 0");
  require(analysis.window >= 1 && analysis.window % 2 == 1, "analysis.window must be odd and >= 1");
  require(!output.empty(), "output must not be empty");
  require(threads >= 0, "threads must be >= 0");
}

bool RunConfig::full_scale() const {
  return sampling.chains >= 100 && sampling.steps >= 10'000'000;
}

std::uint64_t RunConfig::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : semantic_json(*this).dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

bool operator==(const RunConfig& a, const RunConfig& b) { return to_json(a) == to_json(b); }

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  Section root(j, "");
  require(j.is_object() && j.contains("schema"), "config lacks a schema field");
  root.get("schema", c.schema);
  require(c.schema == config_schema, "unsupported schema " + std::to_string(c.schema));

  auto model = root.child("model");
  model.get("n", c.model.n);
  model.get("attributes_file", c.model.attributes_file);
  auto theta = model.child("theta");
  theta.get("edge", c.model.theta.edge);
  theta.get("twostar", c.model.theta.twostar);
  theta.get("match_b1", c.model.theta.match_b1);
  theta.get("match_b2", c.model.theta.match_b2);
  theta.get("tri_b1", c.model.theta.tri_b1);
  theta.get("tri_b2", c.model.theta.tri_b2);
  theta.finish();
  model.finish();

  auto s = root.child("sampling");
  s.get("chains", c.sampling.chains);
  s.get("steps", c.sampling.steps);
  s.get("burnin", c.sampling.burnin);
  s.get("thin", c.sampling.thin);
  s.get("heat", c.sampling.heat);
  s.get("seed", c.sampling.seed);
  s.finish();

  auto t = root.child("thresholds");
  t.get("hi", c.thresholds.hi);
  t.get("lo", c.thresholds.lo);
  t.finish();

  auto e = root.child("egp");
  e.get("kinds", c.egp.kinds);
  e.get("nu", c.egp.nu);
  e.get("trajectories", c.egp.trajectories);
  e.get("event_budget", c.egp.event_budget);
  e.get("seed", c.egp.seed);
  auto r = e.child("rejection");
  r.get("burnin", c.egp.rejection.burnin);
  r.get("thin", c.egp.rejection.thin);
  r.get("batch", c.egp.rejection.batch);
  r.get("max_batches", c.egp.rejection.max_batches);
  r.finish();
  e.finish();

  auto a = root.child("analysis");
  a.get("grid", c.analysis.grid);
  a.get("knots", c.analysis.knots);
  a.get("window", c.analysis.window);
  a.finish();

  root.get("output", c.output);
  root.get("threads", c.threads);
  root.finish();
  c.validate();
  return c;
}

std::string to_json(const RunConfig& cfg) {
  json j = semantic_json(cfg);
  j["output"] = cfg.output;
  j["threads"] = cfg.threads;
  return j.dump(2) + "\n";
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::config, "cannot open config " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void save_config(const std::filesystem::path& file, const RunConfig& cfg) { io::open_out(file) << to_json(cfg); }

}  // namespace tst
