#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tst/error.hpp"
#include "tst/io.hpp"
#include "tst/pipeline.hpp"

using namespace tst;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Eight nodes with sharper homophily than the full model so that both aligned states
// are frequent enough for rejection sampling; the whole run takes well under a second.
RunConfig small_config(const fs::path& out) {
  RunConfig cfg;
  cfg.model.n = 8;
  cfg.model.theta = Theta{-8.0, 0.0, 6.0, 6.0, 2.0, 2.0};
  cfg.sampling.chains = 8;
  cfg.sampling.steps = 200000;
  cfg.sampling.burnin = 20000;
  cfg.sampling.thin = 20000;
  cfg.thresholds = {9, 6};
  cfg.egp.trajectories = 3;
  cfg.egp.rejection = {20000, 1000, 50, 20};
  cfg.analysis.grid = 51;
  cfg.analysis.knots = 3;
  cfg.output = out.string();
  cfg.threads = 1;
  return cfg;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("tst_pipeline_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& f) {
  std::ifstream in(f, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Relative path -> contents for every result file (manifest and config carry timings and paths).
std::map<std::string, std::string> results(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const auto name = e.path().filename().string();
    if (name == "manifest.json" || name == "config.json") continue;
    out[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return out;
}

std::vector<std::string> statuses(const std::vector<StageReport>& r) {
  std::vector<std::string> s;
  for (const auto& x : r) s.push_back(x.status);
  return s;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(TST_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

const std::vector<std::string> all_ok(5, "ok"), all_skipped(5, "skipped");

}  // namespace

TEST_CASE("a small run completes, records a manifest and resumes") {
  const auto dir = scratch("resume");
  auto cfg = small_config(dir / "run");
  std::vector<StageReport> rep;
  REQUIRE(run_pipeline(cfg, {}, &rep) == 0);
  CHECK(statuses(rep) == all_ok);
  for (const char* f : {"sample/states.csv", "sample/transitions.csv", "states/endpoints.csv", "mspcp/mspcp.csv",
                        "egp/catalog.csv", "egp/lergm/traj_000.csv", "egp/cfcstergm/traj_002.csv",
                        "analysis/paths.csv", "analysis/lengths.csv", "analysis/alignment.csv", "config.json"})
    CHECK_MESSAGE(fs::exists(dir / "run" / f), f);

  const auto manifest = json::parse(slurp(dir / "run/manifest.json"));
  CHECK(manifest["status"] == "ok");
  CHECK(manifest["stages"].size() == 5);
  CHECK(manifest["full_scale"] == false);
  CHECK(manifest["seeds"]["sampling"] == cfg.sampling.seed);
  CHECK(manifest["reference"]["states"] == 164462);
  CHECK(manifest["observed"]["states"].get<int>() > 0);
  CHECK(load_config(dir / "run/config.json") == cfg);

  const auto paths = read_paths_csv(dir / "run/analysis/paths.csv");
  CHECK(paths.size() == 12);
  const auto first = results(dir / "run");

  rep.clear();
  REQUIRE(run_pipeline(cfg, {}, &rep) == 0);
  CHECK(statuses(rep) == all_skipped);

  // Only the stage asked for runs; its downstream outputs are left alone.
  rep.clear();
  PipelineOptions only;
  only.only_stage = "analyze";
  only.force = true;
  REQUIRE(run_pipeline(cfg, only, &rep) == 0);
  CHECK(statuses(rep) == std::vector<std::string>{"skipped", "skipped", "skipped", "skipped", "ok"});

  // A different configuration invalidates everything.
  cfg.egp.seed = 77;
  rep.clear();
  REQUIRE(run_pipeline(cfg, {}, &rep) == 0);
  CHECK(statuses(rep) == all_ok);
  CHECK(results(dir / "run") != first);
  fs::remove_all(dir);
}

TEST_CASE("results do not depend on the worker count") {
  const auto dir = scratch("threads");
  auto one = small_config(dir / "one");
  auto three = small_config(dir / "three");
  three.threads = 3;
  REQUIRE(run_pipeline(one, {}) == 0);
  REQUIRE(run_pipeline(three, {}) == 0);
  const auto a = results(dir / "one"), b = results(dir / "three");
  CHECK(a.size() == b.size());
  for (const auto& [name, body] : a) CHECK_MESSAGE((b.count(name) && b.at(name) == body), name);
  fs::remove_all(dir);
}

TEST_CASE("a failing stage stops the run") {
  const auto dir = scratch("fail");
  auto cfg = small_config(dir / "run");
  cfg.thresholds = {1000, 6};
  std::vector<StageReport> rep;
  CHECK(run_pipeline(cfg, {}, &rep) == 3);
  REQUIRE(rep.size() == 2);
  CHECK(rep[1].status == "failed");
  CHECK(rep[1].error.find("regime") != std::string::npos);
  const auto manifest = json::parse(slurp(dir / "run/manifest.json"));
  CHECK(manifest["status"] == "failed");
  CHECK(manifest["failed_stage"] == "states");
  fs::remove_all(dir);
}

TEST_CASE("command-line exit codes") {
  const auto dir = scratch("cli");
  const auto good = small_config(dir / "run");
  save_config(dir / "good.json", good);
  auto failing = good;
  failing.output = (dir / "failing").string();
  failing.thresholds = {1000, 6};
  save_config(dir / "failing.json", failing);
  {
    std::ofstream(dir / "bad.json") << R"({"schema": 1, "sampling": {"chians": 3}})";
  }
  CHECK(run_cli("default-config") == 0);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("pipeline") == 2);
  CHECK(run_cli("pipeline --config " + (dir / "bad.json").string()) == 2);
  CHECK(run_cli("pipeline --config " + (dir / "failing.json").string()) == 3);
  CHECK(run_cli("pipeline --config " + (dir / "good.json").string()) == 0);

  // The individual stages chain together through their files.
  const auto run = dir / "run";
  const auto st = dir / "st";
  CHECK(run_cli("sample --config " + (dir / "good.json").string() + " --out " + st.string()) == 0);
  CHECK(fs::exists(st / "states.csv"));
  CHECK(run_cli("mspcp --states " + st.string() + " --hi 9 --lo 6") == 0);
  CHECK(run_cli("mspcp --states " + st.string() + " --hi 9 --lo 6 --weight q --out " + (st / "q.csv").string()) == 0);
  CHECK(run_cli("mspcp --states " + st.string() + " --weight neither") == 2);
  CHECK(run_cli("mspcp --states " + st.string()) == 3);  // no state above the default thresholds
  CHECK(run_cli("mspcp --states " + (dir / "missing").string()) == 3);
  const auto egp = dir / "egp";
  CHECK(run_cli("egp-run --kind ci --seeds " + (run / "egp/sources.txt").string() + " --until-target --states " +
                st.string() + " --config " + (dir / "good.json").string() + " --hi 9 --lo 6 --out " + egp.string()) == 0);
  CHECK(fs::exists(egp / "ci/traj_000.csv"));
  CHECK(run_cli("egp-run --kind ci --seeds " + (run / "egp/sources.txt").string() + " --events 50 --config " +
                (dir / "good.json").string() + " --out " + (dir / "fixed").string()) == 0);
  CHECK(run_cli("egp-run --kind tergm --seeds " + (run / "egp/sources.txt").string() + " --events 5") == 2);
  CHECK(run_cli("analyze --trajs " + egp.string() + " --mspcp " + (st / "mspcp.csv").string() + " --out " +
                (dir / "an").string()) == 0);
  CHECK(read_paths_csv(dir / "an/paths.csv").size() == 3);
  fs::remove_all(dir);
}
