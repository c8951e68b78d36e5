//
// Copyright 2026 The tzsim Authors.
// SPDX-License-Identifier: Apache-2.0
//

// Command-line runner: loads a memory map and app layout, runs attack
// scenarios with or without the mitigation layer, and reports outcomes.
//
// Exit status: 0 when every outcome matches the expected table for the
// chosen mitigation setting, 1 on any mismatch, 2 on usage or config errors.

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tzsim/app_config.hpp"
#include "tzsim/errors.hpp"
#include "tzsim/harness.hpp"
#include "tzsim/map_config.hpp"
#include "tzsim/report.hpp"

namespace {

constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;

struct RunConfig {
  std::string map_path;
  std::string apps_path;
  std::string scenarios = "all";
  std::string mitigation = "off";
  bool no_boundary = false;
  bool no_verifier = false;
  bool no_collector = false;
  std::string report_format = "text";
  std::string out_path;
  std::uint64_t seed = 1;
  bool full_size = false;
};

std::vector<tzsim::ScenarioId> parse_scenarios(const std::string& list) {
  if (list == "all") {
    return {tzsim::kAllScenarios.begin(), tzsim::kAllScenarios.end()};
  }
  std::vector<tzsim::ScenarioId> ids;
  std::stringstream in(list);
  for (std::string item; std::getline(in, item, ',');) {
    int value = -1;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    std::optional<tzsim::ScenarioId> id;
    if (ec == std::errc{} && ptr == item.data() + item.size()) {
      id = tzsim::scenario_from_int(value);
    }
    if (!id) {
      throw CLI::ValidationError("--scenario",
                                 "'" + item + "' is not a scenario id in 0..5");
    }
    ids.push_back(*id);
  }
  if (ids.empty()) throw CLI::ValidationError("--scenario", "no scenario given");
  return ids;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"TrustZone-M isolation simulator and attack harness", "tzsim"};
  app.add_option("--map", cfg.map_path, "Memory-map config (default: built-in map)")
      ->check(CLI::ExistingFile);
  app.add_option("--apps", cfg.apps_path, "App layout config: `app_id payload_hex` lines")
      ->check(CLI::ExistingFile);
  app.add_option("--scenario", cfg.scenarios,
                 "Scenario id 0..5, comma-separated list, or 'all'")
      ->capture_default_str();
  app.add_option("--mitigation", cfg.mitigation, "Mitigation layer")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  app.add_flag("--no-boundary", cfg.no_boundary, "Disable the callable-region boundary verifier");
  app.add_flag("--no-verifier", cfg.no_verifier, "Disable the secure-side response verifier");
  app.add_flag("--no-collector", cfg.no_collector, "Disable the allocation leak collector");
  app.add_option("--report", cfg.report_format, "Report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  app.add_option("--out", cfg.out_path, "Write the report here instead of stdout");
  app.add_option("--seed", cfg.seed, "Seed for generated secrets and app payloads")
      ->capture_default_str();
  app.add_flag("--full-size", cfg.full_size, "Use KiB-scale heartbeat sizes (16 KiB / 128 KiB)");

  std::vector<tzsim::ScenarioId> scenarios;
  try {
    app.parse(argc, argv);
    scenarios = parse_scenarios(cfg.scenarios);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  tzsim::MitigationConfig mitigation;
  if (cfg.mitigation == "on") {
    mitigation = tzsim::MitigationConfig::on();
    mitigation.boundary = !cfg.no_boundary;
    mitigation.verifier = !cfg.no_verifier;
    mitigation.collector = !cfg.no_collector;
  }

  tzsim::ScenarioParams params =
      cfg.full_size ? tzsim::ScenarioParams::full_size() : tzsim::ScenarioParams::desk();
  params.seed = cfg.seed;

  std::optional<tzsim::SimState> state;
  try {
    tzsim::MemoryMap map = cfg.map_path.empty() ? tzsim::MemoryMap::default_map()
                                                : tzsim::load_map_config(cfg.map_path);
    std::optional<tzsim::AppLayout> apps;
    if (!cfg.apps_path.empty()) apps = tzsim::load_app_config(cfg.apps_path);
    state.emplace(tzsim::build_sim_state(std::move(map), params, apps));
  } catch (const tzsim::Error& e) {
    std::cerr << "tzsim: " << e.what() << "\n";
    return kExitUsage;
  }

  tzsim::CampaignReport report = tzsim::run_campaign(*state, scenarios, mitigation);
  const std::string text = cfg.report_format == "json"
                               ? tzsim::report_to_json(report, *state)
                               : tzsim::report_to_text(report, *state);
  if (cfg.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(cfg.out_path, std::ios::binary);
    if (!out) {
      std::cerr << "tzsim: cannot write '" << cfg.out_path << "'\n";
      return kExitUsage;
    }
    out << text;
  }

  bool all_expected = true;
  for (const tzsim::ScenarioResult& r : report.results) {
    all_expected = all_expected && tzsim::matches_expected(*state, r, mitigation);
  }
  return all_expected ? 0 : kExitMismatch;
}
