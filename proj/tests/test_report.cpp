#include <doctest.h>
#include <fstream>

#include <cstdlib>

#include "gtorsion/report.hpp"

using namespace gtorsion;

TEST_CASE("configuration is validated before any computation") {
  RunConfig bad;
  bad.scenario_ids = {"no-such-scenario"};
  CHECK_THROWS_AS(run(bad), ConfigError);

  RunConfig step;
  step.scenario_ids = {"flat4-const"};
  step.fd_step = 0.5;  // outside (0, 1e-2]
  CHECK_THROWS_AS(run(step), ConfigError);

  RunConfig tol;
  tol.scenario_ids = {"flat4-const"};
  tol.tol_overrides["bogus_check"] = 1e-3;
  CHECK_THROWS_AS(run(tol), ConfigError);

  RunConfig suites;
  suites.scenario_ids = {"flat4-const"};
  suites.suites.clear();
  CHECK_THROWS_AS(run(suites), ConfigError);

  CHECK_THROWS_AS(suite_from_name("nope"), ConfigError);
  CHECK_THROWS_AS(backend_from_name("nope"), ConfigError);
}

TEST_CASE("reports are byte-stable for identical configurations") {
  setenv("GTORSION_THREADS", "2", 1);
  RunConfig config;
  config.scenario_ids = {"s3-reeb", "torus-skew"};
  config.points = 4;
  config.seed = 42;
  std::string a = run(config).to_json().dump(2);
  std::string b = run(config).to_json().dump(2);
  CHECK(a == b);
  // independent of the worker count
  setenv("GTORSION_THREADS", "1", 1);
  std::string serial = run(config).to_json().dump(2);
  CHECK(a == serial);
  setenv("GTORSION_THREADS", "2", 1);
  // a different seed changes the sampled points
  config.seed = 43;
  std::string c = run(config).to_json().dump(2);
  CHECK(a != c);
}

TEST_CASE("aggregates are the max over per-point entries") {
  RunConfig config;
  config.scenario_ids = {"s3-reeb"};
  config.points = 6;
  config.seed = 9;
  Report report = run(config);
  REQUIRE(report.scenarios.size() == 1);
  const ScenarioReport& sc = report.scenarios.front();
  REQUIRE(sc.point_reports.size() == 6);
  for (const auto& [name, agg] : sc.aggregates) {
    double max_seen = 0.0;
    int found = 0;
    for (const auto& pr : sc.point_reports)
      for (const auto& c : pr.checks)
        if (c.name == name) {
          max_seen = std::max(max_seen, c.value);
          ++found;
        }
    CHECK(found == 6);
    CHECK(agg.max_value == doctest::Approx(max_seen));
  }
  CHECK(report.overall_pass);
}

TEST_CASE("forced tolerance failure flips the verdict but still reports") {
  RunConfig config;
  config.scenario_ids = {"s3-reeb"};
  config.points = 3;
  config.suites = {Suite::Minimality};
  config.tol_overrides["min_residual"] = 1e-300;
  Report report = run(config);
  CHECK_FALSE(report.overall_pass);
  CHECK_FALSE(report.scenarios.front().pass);
  CHECK(report.scenarios.front().point_reports.size() == 3);
  // the failing aggregate is visible
  CHECK_FALSE(report.scenarios.front().aggregates.at("min_residual").pass);
}

TEST_CASE("backend override loosens the gates and still passes") {
  RunConfig config;
  config.scenario_ids = {"s3-reeb"};
  config.points = 2;
  config.suites = {Suite::Minimality};
  config.backend_override = BackendKind::FiniteDiff;
  Report report = run(config);
  CHECK(report.scenarios.front().backend == "fd");
  CHECK(report.scenarios.front().aggregates.at("min_residual").tol ==
        doctest::Approx(1e-4));
  CHECK(report.overall_pass);

  config.backend_override = BackendKind::FiniteDiffRichardson;
  config.fd_step = 1e-3;
  Report rich = run(config);
  CHECK(rich.overall_pass);
}

TEST_CASE("every registry check appears in a full run and explains itself") {
  RunConfig config;
  config.scenario_ids = {"torus-skew"};
  config.points = 2;
  Report report = run(config);
  const auto& aggs = report.scenarios.front().aggregates;
  for (const auto& info : check_registry()) {
    CHECK(aggs.count(info.name) == 1);
    CHECK_FALSE(check_info(info.name).formula.empty());
    CHECK_FALSE(check_info(info.name).description.empty());
  }
}

TEST_CASE("config files override points, seed, backend and tolerances per scenario") {
  const char* path = "/tmp/gtorsion_config_test.json";
  {
    std::ofstream out(path);
    out << R"({"scenarios": {"s3-reeb": {"points": 3, "seed": 5, "backend": "fd",
                "tolerances": {"min_residual": 2e-4}}}})";
  }
  RunConfig config;
  config.scenario_ids = {"s3-reeb", "flat4-const"};
  config.points = 2;
  config.suites = {Suite::Minimality};
  apply_config_file(config, path);
  Report report = run(config);
  REQUIRE(report.scenarios.size() == 2);
  CHECK(report.scenarios[0].points == 3);          // overridden
  CHECK(report.scenarios[0].backend == "fd");      // overridden
  CHECK(report.scenarios[0].aggregates.at("min_residual").tol == doctest::Approx(2e-4));
  CHECK(report.scenarios[1].points == 2);          // untouched scenario
  CHECK(report.scenarios[1].backend == "analytic");
  CHECK(report.overall_pass);

  // unknown scenario ids and checks are rejected up front
  {
    std::ofstream out(path);
    out << R"({"scenarios": {"not-a-scenario": {"points": 3}}})";
  }
  RunConfig bad;
  CHECK_THROWS_AS(apply_config_file(bad, path), ConfigError);
  CHECK_THROWS_AS(apply_config_file(bad, "/tmp/definitely-missing.json"), ConfigError);
}

#ifdef GTORSION_CLI_PATH
namespace {
int cli_status(const std::string& args) {
  std::string cmd = std::string(GTORSION_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int raw = std::system(cmd.c_str());
  return WEXITSTATUS(raw);
}
}  // namespace

TEST_CASE("command-line exit codes follow the contract") {
  CHECK(cli_status("run --scenario flat4-const --points 2") == 0);
  CHECK(cli_status("run --scenario s3-reeb --points 2 --suites minimality "
                   "--tol min_residual=1e-300") == 1);
  CHECK(cli_status("run --scenario no-such-scenario") == 2);
  CHECK(cli_status("run --scenario flat4-const --fd-step 0.5") == 2);
  CHECK(cli_status("list") == 0);
  CHECK(cli_status("explain min_residual") == 0);
  CHECK(cli_status("explain bogus") == 2);
  // comma-separated lists and config files ride through the front end
  CHECK(cli_status("run --scenario flat4-const,product-s2xr --points 2 "
                   "--suites identity,minimality") == 0);
  {
    std::ofstream out("/tmp/gtorsion_cli_config.json");
    out << R"({"scenarios": {"flat4-const": {"points": 2}}})";
  }
  CHECK(cli_status("run --scenario flat4-const --config /tmp/gtorsion_cli_config.json "
                   "--suites minimality") == 0);
  CHECK(cli_status("run --config /tmp/missing-config.json") == 2);
}
#endif
