//
// Copyright 2026 The tzsim Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "tzsim/report.hpp"

#include <cstdio>

#include "json.hpp"

namespace tzsim {
namespace {

using Json = nlohmann::ordered_json;

std::string hex32(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "0x%08llX", static_cast<unsigned long long>(v));
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string report_to_json(const CampaignReport& report, const SimState& state) {
  Json doc;
  doc["seed"] = state.params.seed;
  doc["sizes"] = {{"victim_len", state.params.victim_len},
                  {"claimed_len", state.params.claimed_len},
                  {"protocol_max", state.params.protocol_max}};
  doc["mitigation"] = {{"boundary", report.mitigation.boundary},
                       {"verifier", report.mitigation.verifier},
                       {"collector", report.mitigation.collector}};

  Json results = Json::array();
  for (const ScenarioResult& r : report.results) {
    Json row;
    row["scenario_id"] = static_cast<int>(r.scenario);
    row["scenario"] = std::string(to_string(r.scenario));
    row["outcome"] = std::string(to_string(r.outcome));
    if (r.fault) {
      row["fault_kind"] = std::string(to_string(r.fault->kind()));
      row["fault_source"] = std::string(to_string(r.fault->source()));
      row["fault_address"] = hex32(r.fault->at());
    } else {
      row["fault_kind"] = nullptr;
      row["fault_source"] = nullptr;
      row["fault_address"] = nullptr;
    }
    row["leaked_bytes"] = r.leaked.size();
    row["delta_m"] = r.delta_m();
    row["leak_digest"] = r.leaked.empty() ? Json(nullptr) : Json(hex64(fnv1a64(r.leaked)));
    row["error_id"] = r.blocked ? Json(r.blocked->error_id) : Json(nullptr);
    if (r.outcome == OutcomeKind::kError) row["error"] = r.error;
    row["as_expected"] = matches_expected(state, r, report.mitigation);
    results.push_back(std::move(row));
  }
  doc["results"] = std::move(results);

  Json errors = Json::array();
  for (const ErrorSet::Entry& e : report.errors.entries()) {
    errors.push_back({{"id", e.id}, {"key", e.key}, {"detail", e.detail}});
  }
  doc["errors"] = std::move(errors);

  Json ledger = Json::array();
  for (const LeakRecord& rec : report.ledger.records()) {
    ledger.push_back({{"instruction", rec.instruction},
                      {"R", rec.response_len},
                      {"O", rec.expected_len},
                      {"delta_m", rec.delta_m}});
  }
  doc["ledger"] = std::move(ledger);

  doc["campaign"] = {{"S_N", report.successful_attacks},
                     {"F_m", report.max_leak},
                     {"total_delta", report.total_delta},
                     {"robust", report.robust}};
  return doc.dump(2) + "\n";
}

std::string report_to_text(const CampaignReport& report, const SimState& state) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "mitigation: boundary=%s verifier=%s collector=%s\n",
                report.mitigation.boundary ? "on" : "off",
                report.mitigation.verifier ? "on" : "off",
                report.mitigation.collector ? "on" : "off");
  out += line;
  for (const ScenarioResult& r : report.results) {
    std::string what;
    if (r.fault) {
      what = std::string(to_string(r.fault->kind())) + "/" +
             std::string(to_string(r.fault->source())) + " at " + hex32(r.fault->at());
    } else if (r.blocked) {
      what = "e_" + std::to_string(r.blocked->error_id) + " " + r.blocked->detail;
    } else if (r.outcome == OutcomeKind::kError) {
      what = r.error;
    }
    std::snprintf(line, sizeof(line), "[%d] %-26s %-8s leaked=%llu delta_m=%llu %s",
                  static_cast<int>(r.scenario),
                  std::string(to_string(r.scenario)).c_str(),
                  std::string(to_string(r.outcome)).c_str(),
                  static_cast<unsigned long long>(r.leaked.size()),
                  static_cast<unsigned long long>(r.delta_m()),
                  matches_expected(state, r, report.mitigation) ? "" : "UNEXPECTED ");
    out += line;
    out += what;
    out += '\n';
  }
  std::snprintf(line, sizeof(line), "S_N=%llu F_m=%llu total_delta=%llu robust=%s\n",
                static_cast<unsigned long long>(report.successful_attacks),
                static_cast<unsigned long long>(report.max_leak),
                static_cast<unsigned long long>(report.total_delta),
                report.robust ? "true" : "false");
  out += line;
  return out;
}

}  // namespace tzsim
