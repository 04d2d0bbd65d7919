#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "gtorsion/report.hpp"
#include "gtorsion/version.hpp"

using namespace gtorsion;

namespace {

std::vector<std::string> split_commas(const std::vector<std::string>& in) {
  std::vector<std::string> out;
  for (const auto& entry : in) {
    size_t start = 0;
    while (start <= entry.size()) {
      size_t comma = entry.find(',', start);
      if (comma == std::string::npos) {
        if (start < entry.size()) out.push_back(entry.substr(start));
        break;
      }
      if (comma > start) out.push_back(entry.substr(start, comma - start));
      start = comma + 1;
    }
  }
  return out;
}

int cmd_list() {
  for (const auto& sc : catalogue()) {
    std::cout << sc.id << "  (n=" << sc.chart->dim << ", rank=" << sc.m
              << ", backend=" << backend_name(sc.backend.kind)
              << ", points=" << sc.default_points << ")\n    expectations:";
    if (sc.expectations.xi_zero) std::cout << " xi_zero";
    if (sc.expectations.minimal) std::cout << " minimal";
    if (sc.expectations.non_minimal) std::cout << " non_minimal";
    if (sc.expectations.totally_geodesic) std::cout << " totally_geodesic";
    std::cout << "\n";
  }
  return 0;
}

int cmd_explain(const std::string& name) {
  const CheckInfo& info = check_info(name);
  std::cout << info.name << "  [" << suite_name(info.suite) << " suite]\n"
            << "  formula:  " << info.formula << "\n"
            << "  checks:   " << info.description << "\n";
  return 0;
}

int cmd_run(const RunConfig& config) {
  Report report = run(config);
  nlohmann::ordered_json j = report.to_json();
  std::string text = j.dump(2);
  text.push_back('\n');
  if (!config.out_path.empty()) {
    std::ofstream out(config.out_path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output path: " + config.out_path);
    out << text;
  } else {
    std::cout << text;
  }

  for (const auto& sc : report.scenarios) {
    std::cerr << (sc.pass ? "PASS" : "FAIL") << "  " << sc.id << " (" << sc.points
              << " points, " << sc.backend << ")\n";
    if (!sc.pass)
      for (const auto& [name, agg] : sc.aggregates)
        if (agg.gated && !agg.pass)
          std::cerr << "      " << name << ": max " << agg.max_value << " vs tol "
                    << agg.tol << "\n";
  }
  return report.overall_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"almost-product structure geometry checks on the frame bundle"};
  app.set_version_flag("--version", GTORSION_VERSION);
  app.require_subcommand(1);

  auto* list_cmd = app.add_subcommand("list", "list the scenario catalogue");

  std::string check_name;
  auto* explain_cmd = app.add_subcommand("explain", "print formula and meaning of a check");
  explain_cmd->add_option("check", check_name, "check name (see report aggregates)")
      ->required();

  RunConfig config;
  std::vector<std::string> suite_names;
  std::vector<std::string> tol_specs;
  std::string backend_str;
  auto* run_cmd = app.add_subcommand("run", "evaluate check suites at sampled points");
  run_cmd->add_option("--scenario", config.scenario_ids,
                      "scenario ids (repeatable; default: whole catalogue)");
  run_cmd->add_option("--points", config.points, "points per scenario (0 = default)");
  run_cmd->add_option("--seed", config.seed, "sampling and probe seed");
  run_cmd->add_option("--backend", backend_str,
                      "override backend: analytic | fd | fd-richardson");
  run_cmd->add_option("--fd-step", config.fd_step, "finite-difference base step");
  run_cmd->add_option("--tol", tol_specs, "tolerance override, <check>=<value>");
  run_cmd->add_option("--suites", suite_names,
                      "subset of identity,curvature,minimality");
  run_cmd->add_option("--out", config.out_path, "write the JSON report to this path");
  std::string config_path;
  run_cmd->add_option("--config", config_path,
                      "JSON file with per-scenario point/seed/backend/tolerance overrides");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_cmd->parsed()) return cmd_list();
    if (explain_cmd->parsed()) return cmd_explain(check_name);

    if (!backend_str.empty()) config.backend_override = backend_from_name(backend_str);
    config.scenario_ids = split_commas(config.scenario_ids);
    if (!suite_names.empty()) {
      config.suites.clear();
      for (const auto& s : split_commas(suite_names))
        config.suites.insert(suite_from_name(s));
    }
    for (const auto& spec : tol_specs) {
      auto eq = spec.find('=');
      if (eq == std::string::npos)
        throw ConfigError("tolerance override must be <check>=<value>: " + spec);
      config.tol_overrides[spec.substr(0, eq)] = std::stod(spec.substr(eq + 1));
    }
    if (!config_path.empty()) apply_config_file(config, config_path);
    return cmd_run(config);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
