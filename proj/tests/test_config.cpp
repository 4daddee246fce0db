#include <doctest.h>

#include <filesystem>

#include "tst/config.hpp"
#include "tst/error.hpp"

using namespace tst;
namespace fs = std::filesystem;

namespace {

ErrorKind parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::io;  // sentinel: nothing thrown
}

}  // namespace

TEST_CASE("defaults describe the full protocol") {
  const RunConfig cfg;
  CHECK(cfg.model.n == 20);
  CHECK(cfg.model.theta == faction_theta);
  CHECK(cfg.sampling.chains == 100);
  CHECK(cfg.sampling.steps == 10'000'000u);
  CHECK(cfg.thresholds.hi == 80);
  CHECK(cfg.thresholds.lo == 50);
  CHECK(cfg.egp.nu == 0.5);
  CHECK(cfg.analysis.grid == 201);
  CHECK(cfg.analysis.knots == 9);
  CHECK(cfg.full_scale());
  cfg.validate();
}

TEST_CASE("configurations round-trip through JSON") {
  RunConfig cfg;
  cfg.model.theta.twostar = 0.125;
  cfg.sampling.chains = 7;
  cfg.egp.kinds = {"ci", "lergm"};
  cfg.egp.nu = 0.3;
  cfg.analysis.window = 5;
  cfg.output = "elsewhere";
  const auto back = parse_config(to_json(cfg));
  CHECK(back == cfg);
  CHECK(back.hash() == cfg.hash());
  CHECK_FALSE(back.full_scale());

  const auto file = fs::temp_directory_path() / "tst_config.json";
  save_config(file, cfg);
  CHECK(load_config(file) == cfg);
  fs::remove(file);
}

TEST_CASE("partial documents keep defaults") {
  const auto cfg = parse_config(R"({"schema": 1, "sampling": {"chains": 3}})");
  CHECK(cfg.sampling.chains == 3);
  CHECK(cfg.sampling.steps == 10'000'000u);
  CHECK(cfg.model.theta == faction_theta);
}

TEST_CASE("malformed configurations are rejected") {
  CHECK(parse_error(R"({"schema": 1, "sampling": {"chians": 3}})") == ErrorKind::config);
  CHECK(parse_error(R"({"schema": 1, "extra": 0})") == ErrorKind::config);
  CHECK(parse_error(R"({"sampling": {"chains": 3}})") == ErrorKind::config);
  CHECK(parse_error(R"({"schema": 2})") == ErrorKind::config);
  CHECK(parse_error(R"({"schema": 1, "sampling": {"chains": "many"}})") == ErrorKind::config);
  CHECK(parse_error(R"({"schema": 1, )") == ErrorKind::config);
  CHECK(parse_error(R"({"schema": 1, "model": {"n": 65}})") == ErrorKind::config);
  CHECK(parse_error(R"({"schema": 1, "egp": {"kinds": ["lergm", "lergm"]}})") == ErrorKind::config);
  CHECK(parse_error(R"({"schema": 1, "egp": {"kinds": ["stergm"]}})") == ErrorKind::config);
  CHECK(parse_error(R"({"schema": 1, "egp": {"nu": 0}})") == ErrorKind::config);
  CHECK(parse_error(R"({"schema": 1, "analysis": {"window": 4}})") == ErrorKind::config);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), Error);
}

TEST_CASE("the hash tracks results, not where they go") {
  const RunConfig base;
  RunConfig moved = base;
  moved.output = "other";
  moved.threads = 4;
  CHECK(moved.hash() == base.hash());
  RunConfig changed = base;
  changed.egp.seed = 3;
  CHECK(changed.hash() != base.hash());
  changed = base;
  changed.model.theta.twostar = 0.1;
  CHECK(changed.hash() != base.hash());
  changed = base;
  changed.analysis.grid = 101;
  CHECK(changed.hash() != base.hash());
}
