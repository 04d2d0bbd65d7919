#pragma once

#include <map>
#include <optional>
#include <set>

#include <json.hpp>

#include "gtorsion/scenarios.hpp"

namespace gtorsion {

enum class Suite { Identity, Curvature, Minimality };

std::string suite_name(Suite s);
Suite suite_from_name(const std::string& name);

// A numerical check evaluated per point. `greater_is_pass` flips the gate
// for controls that must exceed a threshold (non-minimal scenarios).
struct CheckInfo {
  std::string name;
  Suite suite;
  std::string formula;
  std::string description;
};

const std::vector<CheckInfo>& check_registry();
const CheckInfo& check_info(const std::string& name);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tol = 0.0;
  bool greater_is_pass = false;
  bool gated = false;  // participates in the scenario verdict
  bool pass = true;
};

struct PointReport {
  int index = 0;
  Eigen::VectorXd coords;
  std::vector<CheckResult> checks;
};

// Scenario verdicts are aggregate-driven: a check passes when its max over
// the sampled points clears the gate (below tolerance, or above it for
// exceed-style controls, where the max is exactly the quantity that must be
// visibly nonzero).
struct CheckAggregate {
  double max_value = 0.0;
  double tol = 0.0;
  bool greater_is_pass = false;
  bool gated = false;
  bool pass = true;
};

struct ScenarioReport {
  std::string id;
  std::string backend;
  int points = 0;
  std::vector<std::string> expectations;
  std::vector<PointReport> point_reports;
  std::map<std::string, CheckAggregate> aggregates;  // name -> max over points
  bool pass = true;
};

// Per-scenario overrides, loadable from a config file. Only catalogue
// scenarios can be addressed; metrics are code-registered closures and a
// config file cannot define new ones.
struct ScenarioOverride {
  std::optional<int> points;
  std::optional<uint64_t> seed;
  std::optional<BackendKind> backend;
  std::map<std::string, double> tol_overrides;
};

struct RunConfig {
  std::vector<std::string> scenario_ids;  // empty -> whole catalogue
  int points = 0;                         // 0 -> per-scenario default
  uint64_t seed = 1;
  std::optional<BackendKind> backend_override;
  double fd_step = 0.0;  // 0 -> backend default; must lie in (0, 1e-2]
  std::map<std::string, double> tol_overrides;
  std::set<Suite> suites = {Suite::Identity, Suite::Curvature, Suite::Minimality};
  std::string out_path;  // empty -> stdout only
  std::map<std::string, ScenarioOverride> scenario_overrides;
};

// Parses a JSON config document of the shape
//   {"scenarios": {"<id>": {"points":.., "seed":.., "backend":"..",
//                           "tolerances": {"<check>": <value>}}}}
// into per-scenario overrides. Unknown ids or checks raise ConfigError.
void apply_config_file(RunConfig& config, const std::string& path);

struct Report {
  int schema_version = 1;
  std::string version;
  uint64_t seed = 0;
  std::string backend;  // "scenario-default" unless overridden
  double fd_step = 0.0;
  std::vector<std::string> suites;
  std::vector<ScenarioReport> scenarios;
  bool overall_pass = true;

  nlohmann::ordered_json to_json() const;
};

// Raised for failures of numerical preconditions during a run; carries the
// scenario and point provenance in the message.
struct NumericalError : Error {
  using Error::Error;
};

// Validates the configuration (throws ConfigError), evaluates the selected
// suites at sampled points and returns the assembled report. Point
// evaluations run concurrently; GTORSION_THREADS caps the worker count.
Report run(const RunConfig& config);

}  // namespace gtorsion
