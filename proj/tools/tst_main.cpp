// Command-line front end: one subcommand per pipeline stage plus the full pipeline.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tst/analysis.hpp"
#include "tst/config.hpp"
#include "tst/error.hpp"
#include "tst/io.hpp"
#include "tst/pipeline.hpp"

namespace fs = std::filesystem;
using namespace tst;

namespace {

RunConfig config_or_default(const std::string& file) {
  return file.empty() ? RunConfig{} : load_config(file);
}

int cmd_sample(const std::string& config, const std::string& out) {
  auto cfg = config_or_default(config);
  const auto attrs = model_attributes(cfg.model);
  std::vector<Graph> seeds;
  const auto space = sample_states(cfg, attrs, worker_count(cfg.threads), &seeds);
  write_states(space, out);
  io::write_graphs(fs::path(out) / "seeds.txt", seeds);
  std::cout << "states " << space.size() << ", transitions " << space.transition_count() << ", mean degree "
            << io::fmt(space.mean_degree()) << '\n';
  return 0;
}

int cmd_mspcp(const std::string& states, const std::string& source_rule, const std::string& target_rule,
              const std::string& weight, int window, const ThresholdConfig& t, const std::string& out) {
  const auto space = read_states(states);
  const auto source = pick_state(space, parse_state_rule(source_rule), t);
  const auto target = pick_state(space, parse_state_rule(target_rule), t);
  auto path = mspcp(space, source.id, target.id, weight == "q" ? PathWeight::q : PathWeight::logp);
  if (path.size() >= 3) annotate(path, find_milestones(path, window));
  const fs::path file = out.empty() ? fs::path(states) / "mspcp.csv" : fs::path(out);
  write_path_csv(file, stats_along_path(path, space));
  std::cout << "path of " << path.size() << " states written to " << file.string() << '\n';
  return 0;
}

struct EgpArgs {
  std::string kind = "lergm";
  double nu = 0.5;
  std::string seeds, states, config, out = "egp";
  bool until_target = false;
  std::uint64_t events = 0;
  std::uint64_t seed = 2;
  std::uint64_t budget = 1'000'000'000;
  ThresholdConfig t;
};

int cmd_egp(const EgpArgs& a) {
  const auto cfg = config_or_default(a.config);
  const auto attrs = model_attributes(cfg.model);
  const auto seeds = io::read_graphs(a.seeds);
  if (seeds.empty()) throw Error(ErrorKind::empty_input, "no seed graphs in " + a.seeds);
  const auto kind = EgpKind::parse(a.kind, a.nu);
  if (a.until_target) {
    const auto space = read_states(a.states);
    const StatVector source = stats(seeds.front(), attrs);
    const auto target = pick_state(space, StateRule::aligned_b2, a.t);
    const auto run = run_egps({kind}, seeds, space, source, target.stats, cfg.model.theta, attrs, a.seed, a.budget,
                              worker_count(cfg.threads));
    write_egp_run(a.out, run);
    std::cout << run.trajectories.size() << " trajectories written to " << a.out << '\n';
    return 0;
  }
  if (a.events == 0) throw Error(ErrorKind::config, "give --until-target or --events N");
  StateCatalog catalog;
  std::vector<Trajectory> trajs;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    Rng rng = Rng::derive(a.seed, k);
    std::uint64_t left = a.events;
    auto t = simulate(kind, seeds[k], cfg.model.theta, attrs, [&](const StatVector&, double) { return left-- == 0; },
                      rng, a.events + 1);
    t.seed = k;
    trajs.push_back(std::move(t));
  }
  catalog.assign(trajs);
  catalog.set_potentials(cfg.model.theta);
  write_egp_run(a.out, EgpRunResult{std::move(trajs), std::move(catalog)});
  return 0;
}

int cmd_analyze(const std::string& trajs, const std::string& mspcp_file, const std::string& out, int grid, int knots) {
  const auto run = read_egp_run(trajs);
  std::vector<StatVector> path;
  for (const auto& r : read_path_csv(mspcp_file)) path.push_back(r.stats);
  AlignOptions opt;
  opt.grid = grid;
  opt.knots = knots;
  const auto res = analyze(run, path, opt);
  write_analysis(out, res);
  std::size_t primary = 0;
  for (const auto& p : res.paths) primary += p.cls.label == PathClass::primary;
  std::cout << res.paths.size() << " paths, " << primary << " primary\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transition-state analysis of network dynamics"};
  app.require_subcommand(1);

  std::string config, out, states, source_rule = "aligned-b1", target_rule = "aligned-b2", weight = "logp";
  std::string trajs, mspcp_file, stage;
  int window = 1, grid = 201, knots = 9;
  bool force = false;
  ThresholdConfig t;
  EgpArgs egp;

  auto* sample = app.add_subcommand("sample", "Sample the state space by MCMC");
  sample->add_option("--config", config, "Run configuration (JSON)");
  sample->add_option("--out", out, "Output directory")->required();

  const CLI::IsMember rules({"aligned-b1", "aligned-b2"});
  auto* ms = app.add_subcommand("mspcp", "Maximum state probability change path");
  ms->add_option("--states", states, "Directory with states.csv and transitions.csv")->required();
  ms->add_option("--source-rule", source_rule, "aligned-b1 or aligned-b2")->check(rules);
  ms->add_option("--target-rule", target_rule, "aligned-b1 or aligned-b2")->check(rules);
  ms->add_option("--weight", weight, "logp or q")->check(CLI::IsMember({"logp", "q"}));
  ms->add_option("--window", window, "Moving-median window for milestones (odd)");
  ms->add_option("--hi", t.hi, "Aligned regime: matched ties above this");
  ms->add_option("--lo", t.lo, "Aligned regime: other matched ties below this");
  ms->add_option("--out", out, "Output CSV (default <states>/mspcp.csv)");

  auto* er = app.add_subcommand("egp-run", "Simulate an ERGM generating process");
  er->add_option("--kind", egp.kind, "lergm, ci, cdcstergm or cfcstergm")
      ->check(CLI::IsMember({"lergm", "ci", "cdcstergm", "cfcstergm"}));
  er->add_option("--nu", egp.nu, "Constant rate of the CSTERGM variants");
  er->add_option("--seeds", egp.seeds, "Seed graphs file")->required();
  er->add_flag("--until-target", egp.until_target, "Run each seed until the aligned-b2 state");
  er->add_option("--events", egp.events, "Otherwise stop after this many events");
  er->add_option("--states", egp.states, "State space directory (for --until-target)");
  er->add_option("--config", egp.config, "Model configuration (JSON)");
  er->add_option("--seed", egp.seed, "Master RNG seed");
  er->add_option("--budget", egp.budget, "Event budget per trajectory");
  er->add_option("--hi", egp.t.hi, "Aligned regime: matched ties above this");
  er->add_option("--lo", egp.t.lo, "Aligned regime: other matched ties below this");
  er->add_option("--out", egp.out, "Output directory");

  auto* an = app.add_subcommand("analyze", "Prune, classify and align trajectories");
  an->add_option("--trajs", trajs, "Directory written by egp-run")->required();
  an->add_option("--states", states, "State space directory (accepted for symmetry; ids come from the catalog)");
  an->add_option("--mspcp", mspcp_file, "MSPCP CSV")->required();
  an->add_option("--out", out, "Output directory")->required();
  an->add_option("--grid", grid, "Alignment grid size");
  an->add_option("--knots", knots, "Interior warp knots");

  auto* pl = app.add_subcommand("pipeline", "Run all stages from one configuration");
  pl->add_option("--config", config, "Run configuration (JSON)")->required();
  pl->add_flag("--force", force, "Rerun stages whose outputs exist");
  pl->add_option("--stage", stage, "Run only this stage");

  auto* dc = app.add_subcommand("default-config", "Print the default configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sample) return cmd_sample(config, out);
    if (*ms) return cmd_mspcp(states, source_rule, target_rule, weight, window, t, out);
    if (*er) return cmd_egp(egp);
    if (*an) return cmd_analyze(trajs, mspcp_file, out, grid, knots);
    if (*dc) {
      std::cout << to_json(RunConfig{});
      return 0;
    }
    if (*pl) {
      const auto cfg = load_config(config);
      PipelineOptions opt;
      opt.force = force;
      if (!stage.empty()) opt.only_stage = stage;
      std::vector<StageReport> reports;
      const int code = run_pipeline(cfg, opt, &reports);
      for (const auto& r : reports) {
        std::cout << r.name << ": " << r.status;
        if (r.status == "ok") std::cout << " (" << io::fmt(r.seconds) << " s)";
        if (!r.error.empty()) std::cout << ": " << r.error;
        std::cout << '\n';
      }
      return code;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::config ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
