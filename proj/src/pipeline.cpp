#include "tst/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tst/error.hpp"
#include "tst/io.hpp"
#include "tst/kernels.hpp"
#include "tst/mcmc.hpp"

namespace tst {

namespace fs = std::filesystem;

int worker_count(int configured) {
  if (const char* env = std::getenv("TST_THREADS"); env && *env) {
    const long long n = io::parse_int(env);
    if (n < 1) throw Error(ErrorKind::config, "TST_THREADS must be >= 1");
    return static_cast<int>(n);
  }
  if (configured > 0) return configured;
  return std::max(1u, std::thread::hardware_concurrency());
}

NodeAttributeTable model_attributes(const ModelConfig& m) {
  if (m.attributes_file.empty()) return make_faction_attributes(m.n);
  auto a = io::read_attributes(m.attributes_file);
  if (a.n() != m.n) throw Error(ErrorKind::config, "attributes file has " + std::to_string(a.n()) + " nodes, expected " + std::to_string(m.n));
  return a;
}

Graph b1_faction_graph(const NodeAttributeTable& a) {
  Graph g(a.n());
  for (int i = 0; i < a.n(); ++i)
    for (int j = i + 1; j < a.n(); ++j)
      if (a.b1(i) == a.b1(j)) g.toggle(Dyad{i, j});
  return g;
}

namespace {

// Runs job(k) for k in [0, jobs) on up to `threads` workers; rethrows the first failure in index order.
template <class Job>
void parallel_for(std::size_t jobs, int threads, Job job) {
  std::vector<std::exception_ptr> errors(jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs; k = next++) {
      try {
        job(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(jobs)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n; ++w) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

StateSpace sample_states(const RunConfig& cfg, const NodeAttributeTable& attrs, int threads,
                         std::vector<Graph>* seeds_out) {
  ChainConfig chain{cfg.sampling.burnin, cfg.sampling.thin, cfg.sampling.steps, cfg.sampling.heat, cfg.sampling.seed};
  chain.validate();
  const auto seeds = sample_heated_seeds(cfg.model.theta, attrs, chain, cfg.sampling.chains);
  std::vector<StateSpace> local(seeds.size());
  parallel_for(seeds.size(), threads, [&](std::size_t c) {
    Rng rng = Rng::derive(cfg.sampling.seed, c);
    run_recording_chain(seeds[c], cfg.model.theta, attrs, cfg.sampling.steps, local[c], rng);
  });
  StateSpace space;
  for (auto& l : local) {
    space.merge(l);
    l = StateSpace{};
  }
  space.finalize(cfg.model.theta);
  if (seeds_out) *seeds_out = seeds;
  return space;
}

StateRule parse_state_rule(const std::string& s) {
  if (s == "aligned-b1") return StateRule::aligned_b1;
  if (s == "aligned-b2") return StateRule::aligned_b2;
  throw Error(ErrorKind::config, "unknown state rule '" + s + "' (expected aligned-b1 or aligned-b2)");
}

StateRecord pick_state(const StateSpace& space, StateRule rule, const ThresholdConfig& t) {
  const auto aligned = find_aligned_states(space, t.hi, t.lo);
  return rule == StateRule::aligned_b1 ? aligned.source : aligned.target;
}

void write_endpoints(const fs::path& file, const StateRecord& source, const StateRecord& target) {
  auto out = io::open_out(file);
  out << "role,id,t_e,t_2s,t_m1,t_m2,t_d1,t_d2,count,q,logp\n";
  auto row = [&](const char* role, const StateRecord& r) {
    out << role << ',' << r.id;
    for (auto x : r.stats.v) out << ',' << x;
    out << ',' << r.count << ',' << io::fmt(r.q) << ',' << io::fmt(r.logp) << '\n';
  };
  row("source", source);
  row("target", target);
}

std::pair<StateRecord, StateRecord> read_endpoints(const fs::path& file) {
  const auto t = io::read_csv(file);
  std::map<std::string, StateRecord> by_role;
  for (const auto& row : t.rows) {
    StateRecord r;
    r.id = static_cast<int>(io::parse_int(row[t.column("id")]));
    for (int f = 0; f < stat_count; ++f) r.stats[f] = static_cast<std::int32_t>(io::parse_int(row[t.column(stat_names[f])]));
    r.count = static_cast<std::uint64_t>(io::parse_int(row[t.column("count")]));
    r.q = io::parse_double(row[t.column("q")]);
    r.logp = io::parse_double(row[t.column("logp")]);
    by_role[row[t.column("role")]] = r;
  }
  if (!by_role.count("source") || !by_role.count("target"))
    throw Error(ErrorKind::io, file.string() + ": needs source and target rows");
  return {by_role["source"], by_role["target"]};
}

EgpRunResult run_egps(const std::vector<EgpKind>& kinds, const std::vector<Graph>& sources, const StateSpace& space,
                      const StatVector& source, const StatVector& target, const Theta& theta,
                      const NodeAttributeTable& attrs, std::uint64_t seed, std::uint64_t event_budget, int threads) {
  EgpRunResult res;
  for (const auto& kind : kinds) {
    TargetRunConfig tc;
    tc.per_seed = 1;
    tc.max_events = event_budget;
    // Streams depend on the process, not on its position in the list.
    tc.seed = Rng::derive(seed, 1 + static_cast<std::uint64_t>(kind.variant)).next();
    tc.threads = threads;
    auto trajs = simulate_until_target(kind, sources, source, target, theta, attrs, tc);
    for (auto& t : trajs) res.trajectories.push_back(std::move(t));
  }
  res.catalog = StateCatalog(space);
  res.catalog.assign(res.trajectories);
  const int src = res.catalog.id_of(source), tgt = res.catalog.id_of(target);
  for (auto& t : res.trajectories) {
    t.source_id = src;
    t.target_id = tgt;
  }
  res.catalog.set_potentials(theta);
  return res;
}

namespace {

std::string traj_name(std::size_t k) {
  std::ostringstream os;
  os << "traj_" << std::setw(3) << std::setfill('0') << k << ".csv";
  return os.str();
}

}  // namespace

void write_egp_run(const fs::path& dir, const EgpRunResult& run) {
  write_catalog(dir / "catalog.csv", run.catalog);
  std::map<std::string, std::size_t> per_kind;
  for (const auto& t : run.trajectories) {
    const auto name = t.kind.name();
    write_trajectory(dir / name / traj_name(per_kind[name]++), t);
  }
}

EgpRunResult read_egp_run(const fs::path& dir) {
  EgpRunResult run;
  run.catalog = read_catalog(dir / "catalog.csv");
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) throw Error(ErrorKind::io, dir.string() + " is not a directory");
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename().string().rfind("traj_", 0) == 0) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  // Keep kinds in the canonical process order rather than alphabetical.
  auto rank = [](const fs::path& p) { return static_cast<int>(EgpKind::parse(p.parent_path().filename().string()).variant); };
  std::stable_sort(files.begin(), files.end(), [&](const fs::path& a, const fs::path& b) { return rank(a) < rank(b); });
  for (const auto& f : files) run.trajectories.push_back(read_trajectory(f, run.catalog));
  if (run.trajectories.empty()) throw Error(ErrorKind::empty_input, "no trajectories under " + dir.string());
  return run;
}

AnalysisOutput analyze(const EgpRunResult& run, const std::vector<StatVector>& mspcp_stats,
                       const AlignOptions& align_opt) {
  AnalysisOutput out;
  std::map<std::string, std::size_t> per_kind;
  std::vector<std::string> kind_order;
  for (const auto& t : run.trajectories) {
    const auto path = prune_to_path(t);
    std::vector<StatVector> stats;
    for (int id : path) stats.push_back(run.catalog.stats(id));
    PathRecord r;
    r.egp = t.kind.name();
    if (!per_kind.count(r.egp)) kind_order.push_back(r.egp);
    std::ostringstream id;
    id << r.egp << '_' << std::setw(3) << std::setfill('0') << per_kind[r.egp]++;
    r.traj_id = id.str();
    r.cls = classify_path(stats, mspcp_stats);
    r.path_len = path.size() - 1;
    r.walk_len = t.walk_length();
    r.neutral_components = components_at(t, path[r.cls.neutral_index]);
    r.high_road = high_road(stats).holds;
    out.paths.push_back(std::move(r));
    out.pruned.push_back(path);
  }
  out.lengths = length_stats(out.paths);
  for (const auto& egp : kind_order) {
    for (PathClass cls : {PathClass::primary, PathClass::secondary}) {
      std::vector<std::vector<double>> q;
      std::vector<std::vector<StatVector>> s;
      for (std::size_t k = 0; k < out.paths.size(); ++k) {
        if (out.paths[k].egp != egp || out.paths[k].cls.label != cls) continue;
        std::vector<double> qp;
        std::vector<StatVector> sp;
        for (int id : out.pruned[k]) {
          qp.push_back(run.catalog.q(id));
          sp.push_back(run.catalog.stats(id));
        }
        q.push_back(std::move(qp));
        s.push_back(std::move(sp));
      }
      if (q.empty()) continue;
      AnalysisOutput::Group g{egp, cls, align(q, s, align_opt), {}};
      g.mean = mean_curves(g.alignment.curves);
      out.groups.push_back(std::move(g));
    }
  }
  return out;
}

void write_analysis(const fs::path& dir, const AnalysisOutput& out) {
  write_paths_csv(dir / "paths.csv", out.paths);
  write_lengths_csv(dir / "lengths.csv", out.lengths);
  auto summary = io::open_out(dir / "alignment.csv");
  summary << "egp,class,n,rmse_before,rmse_after,sweeps\n";
  for (const auto& g : out.groups) {
    write_curve_csv(dir / ("curves_mean_" + g.egp + "_" + to_string(g.cls) + ".csv"), g.mean);
    summary << g.egp << ',' << to_string(g.cls) << ',' << g.alignment.curves.size() << ','
            << io::fmt(g.alignment.rmse_before) << ',' << io::fmt(g.alignment.rmse_after) << ','
            << g.alignment.sweeps << '\n';
  }
}

namespace {

using nlohmann::json;

std::string hex(std::uint64_t x) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << x;
  return os.str();
}

struct Paths {
  fs::path root, sample, states, mspcp, egp, analysis;
  explicit Paths(const fs::path& r)
      : root(r), sample(r / "sample"), states(r / "states"), mspcp(r / "mspcp"), egp(r / "egp"), analysis(r / "analysis") {}
};

std::vector<fs::path> stage_outputs(const Paths& p, const std::string& stage) {
  if (stage == "sample") return {p.sample / "states.csv", p.sample / "transitions.csv", p.sample / "seeds.txt"};
  if (stage == "states") return {p.states / "endpoints.csv", p.states / "summary.csv"};
  if (stage == "mspcp") return {p.mspcp / "mspcp.csv"};
  if (stage == "egp-run") return {p.egp / "catalog.csv", p.egp / "sources.txt"};
  return {p.analysis / "paths.csv", p.analysis / "lengths.csv"};
}

json read_manifest(const fs::path& file) {
  std::ifstream in(file);
  if (!in) return json::object();
  try {
    return json::parse(in);
  } catch (const json::exception&) {
    return json::object();
  }
}

std::vector<StatVector> path_stats(const fs::path& mspcp_csv) {
  std::vector<StatVector> out;
  for (const auto& r : read_path_csv(mspcp_csv)) out.push_back(r.stats);
  return out;
}

void run_stage(const std::string& stage, const RunConfig& cfg, const Paths& p, const NodeAttributeTable& attrs,
               int threads, json& observed) {
  if (stage == "sample") {
    std::vector<Graph> seeds;
    const auto space = sample_states(cfg, attrs, threads, &seeds);
    write_states(space, p.sample);
    io::write_graphs(p.sample / "seeds.txt", seeds);
    observed["states"] = space.size();
    observed["mean_degree"] = space.mean_degree();
    observed["observations"] = space.total();
  } else if (stage == "states") {
    const auto space = read_states(p.sample);
    const auto aligned = find_aligned_states(space, cfg.thresholds.hi, cfg.thresholds.lo);
    write_endpoints(p.states / "endpoints.csv", aligned.source, aligned.target);
    auto out = io::open_out(p.states / "summary.csv");
    out << "key,value\n"
        << "states," << space.size() << '\n'
        << "transitions," << space.transition_count() << '\n'
        << "observations," << space.total() << '\n'
        << "mean_degree," << io::fmt(space.mean_degree()) << '\n';
  } else if (stage == "mspcp") {
    const auto space = read_states(p.sample);
    const auto [source, target] = read_endpoints(p.states / "endpoints.csv");
    auto path = mspcp(space, source.id, target.id);
    if (path.size() >= 3) annotate(path, find_milestones(path, cfg.analysis.window));
    write_path_csv(p.mspcp / "mspcp.csv", stats_along_path(path, space));
  } else if (stage == "egp-run") {
    const auto space = read_states(p.sample);
    const auto [source, target] = read_endpoints(p.states / "endpoints.csv");
    Rng rng = Rng::derive(cfg.egp.seed, 0);
    const auto sources = rejection_sample_state(
        cfg.model.theta, attrs, [&](const StatVector& s) { return s == source.stats; }, cfg.egp.trajectories,
        cfg.egp.rejection, b1_faction_graph(attrs), rng);
    std::vector<EgpKind> kinds;
    for (const auto& k : cfg.egp.kinds) kinds.push_back(EgpKind::parse(k, cfg.egp.nu));
    const auto run = run_egps(kinds, sources, space, source.stats, target.stats, cfg.model.theta, attrs,
                              cfg.egp.seed, cfg.egp.event_budget, threads);
    write_egp_run(p.egp, run);
    io::write_graphs(p.egp / "sources.txt", sources);
  } else if (stage == "analyze") {
    const auto run = read_egp_run(p.egp);
    AlignOptions opt;
    opt.grid = cfg.analysis.grid;
    opt.knots = cfg.analysis.knots;
    write_analysis(p.analysis, analyze(run, path_stats(p.mspcp / "mspcp.csv"), opt));
  }
}

}  // namespace

int run_pipeline(const RunConfig& cfg, const PipelineOptions& opt, std::vector<StageReport>* reports) {
  cfg.validate();
  const auto& names = stage_names();
  if (opt.only_stage && std::find(names.begin(), names.end(), *opt.only_stage) == names.end())
    throw Error(ErrorKind::config, "unknown stage '" + *opt.only_stage + "'");
  const Paths p(cfg.output);
  fs::create_directories(p.root);
  const auto attrs = model_attributes(cfg.model);
  const int threads = worker_count(cfg.threads);
  save_config(p.root / "config.json", cfg);

  const fs::path manifest_file = p.root / "manifest.json";
  json previous = read_manifest(manifest_file);
  const std::string hash = hex(cfg.hash());
  const bool same_config = previous.value("config_hash", "") == hash;

  json manifest;
  manifest["tool"] = "tst";
  manifest["version"] = "1.0.0";
  manifest["config_hash"] = hash;
  manifest["full_scale"] = cfg.full_scale();
  manifest["seeds"] = {{"sampling", cfg.sampling.seed}, {"egp", cfg.egp.seed}};
  manifest["threads"] = threads;
  manifest["kernels"] = kernels::active().name;
  manifest["reference"] = {{"states", 164462}, {"mean_state_degree", 6.7}, {"observations", 1000000000}};
  manifest["observed"] = same_config && previous.contains("observed") ? previous["observed"] : json::object();
  manifest["stages"] = json::array();
  manifest["status"] = "running";

  auto save = [&] {
    auto out = io::open_out(manifest_file);
    out << manifest.dump(2) << '\n';
  };

  int status = 0;
  bool upstream_ran = false;  // outputs downstream of a rerun stage are stale
  for (const auto& stage : names) {
    StageReport rep{stage, "ok", 0.0, {}};
    const bool selected = !opt.only_stage || *opt.only_stage == stage;
    bool present = same_config && !upstream_ran;
    for (const auto& f : stage_outputs(p, stage)) present = present && fs::exists(f);
    if (!selected || (present && !opt.force)) {
      rep.status = "skipped";
    } else {
      upstream_ran = true;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        json observed = manifest["observed"];
        run_stage(stage, cfg, p, attrs, threads, observed);
        manifest["observed"] = observed;
      } catch (const std::exception& e) {
        rep.status = "failed";
        rep.error = e.what();
        status = 3;
      }
      rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    json entry = {{"name", rep.name}, {"status", rep.status}, {"seconds", rep.seconds}};
    if (!rep.error.empty()) entry["error"] = rep.error;
    manifest["stages"].push_back(entry);
    if (reports) reports->push_back(rep);
    if (status != 0) {
      manifest["status"] = "failed";
      manifest["failed_stage"] = stage;
      save();
      return status;
    }
    save();
  }
  manifest["status"] = "ok";
  save();
  return 0;
}

}  // namespace tst
