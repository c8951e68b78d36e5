//
// Copyright 2026 The tzsim Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef TZSIM_HARNESS_HPP_
#define TZSIM_HARNESS_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tzsim/app_config.hpp"
#include "tzsim/fault.hpp"
#include "tzsim/memory_map.hpp"
#include "tzsim/mitigation.hpp"
#include "tzsim/secure_services.hpp"

namespace tzsim {

// Numbering is that of the original firmware test-case constants.
enum class ScenarioId : int {
  kHeartBleed = 0,
  kInvStoNsTrans = 1,
  kInvSEntry = 2,
  kInvNsDataAccess = 3,
  kInvInputParams = 4,
  kInvNsData2Access = 5,
};

inline constexpr std::array<ScenarioId, 6> kAllScenarios = {
    ScenarioId::kHeartBleed,      ScenarioId::kInvStoNsTrans,
    ScenarioId::kInvSEntry,       ScenarioId::kInvNsDataAccess,
    ScenarioId::kInvInputParams,  ScenarioId::kInvNsData2Access,
};

// FAULT_HEART_BLEED etc.
std::string_view to_string(ScenarioId id);
std::optional<ScenarioId> scenario_from_int(int value);

inline constexpr Address kCodeStartNs = 0x00010000;
inline constexpr Address kSecAddress = 0x10000000;
inline constexpr Address kNonsecAddress = 0x20130000;

// Where the harness seeds non-secure data inside the NS code region.
inline constexpr Address kNsTestStringOffset = 0x200;
inline constexpr Address kNsPayloadOffset = 0x1000;
inline constexpr std::string_view kInvalidTestCaseString = "Invalid Test Case\r\n";
inline constexpr std::size_t kSecretLength = 32;

struct ScenarioParams {
  std::string pool_region = "s_ram";
  std::string victim = "A2";
  std::uint32_t victim_len = 16;    // heartbeat payload actually sent
  std::uint64_t claimed_len = 128;  // length the caller claims
  std::uint32_t neighbor_len = 56;  // each of A1, A3, A5 in the default layout
  std::uint64_t protocol_max = 128;
  std::uint32_t skip_offset = 4;    // bytes past the SG marker in scenario 2
  bool validates_inputs = false;    // printf entry of scenario 4
  std::size_t max_string_length = kMaxStringLength;
  std::uint64_t seed = 1;

  // Byte-scale sizes with the 16:128 heartbeat ratio.
  static ScenarioParams desk() { return {}; }
  // The same ratios in KiB.
  static ScenarioParams full_size();
};

// Everything one scenario runs against. Copyable; every scenario works on
// its own copy.
struct SimState {
  MemoryMap map;
  AppRegistry registry;
  VeneerTable veneers;
  ScenarioParams params;
  Address ns_string_addr = 0;
  Address ns_payload_addr = 0;
  Bytes secret;  // what sits at kSecAddress, NUL not included
};

// Seeds the NS vector table and strings, a secret at kSecAddress, the three
// veneers at the start of the first callable region, and the app pool
// (A1, A2, A3, A5 unless a layout is given). Throws ConfigError when the
// map cannot host the scenarios or the params contradict the layout.
SimState build_sim_state(MemoryMap map, const ScenarioParams& params,
                         const std::optional<AppLayout>& apps = std::nullopt);

// Deterministic pseudo-ciphertext for an app.
Bytes opaque_payload(std::string_view app_id, std::size_t len,
                     std::uint64_t seed);

struct LeakRecord {
  std::string instruction;
  std::uint64_t response_len = 0;  // R
  std::uint64_t expected_len = 0;  // O
  std::uint64_t delta_m = 0;       // R - O

  bool operator==(const LeakRecord&) const = default;
};

class LeakLedger {
 public:
  // Throws AccountingError if R < O.
  const LeakRecord& record(std::string instruction, std::uint64_t response_len,
                           std::uint64_t expected_len);

  std::span<const LeakRecord> records() const { return records_; }
  std::uint64_t total_delta() const;

 private:
  std::vector<LeakRecord> records_;
};

LeakRecord record_leak(LeakLedger& ledger, std::string instruction,
                       std::uint64_t response_len, std::uint64_t expected_len);

enum class OutcomeKind : std::uint8_t {
  kFaulted,
  kLeaked,
  kBlocked,
  kClean,
  kError,  // the scenario threw; only produced by run_campaign
};

std::string_view to_string(OutcomeKind kind);

struct ScenarioResult {
  ScenarioId scenario = ScenarioId::kHeartBleed;
  OutcomeKind outcome = OutcomeKind::kClean;
  std::optional<Fault> fault;
  Bytes leaked;                      // the Δm bytes, when Leaked
  Address leak_source = 0;           // where the leaked bytes came from
  std::optional<Rejection> blocked;
  std::optional<LeakRecord> leak;
  std::string error;

  std::uint64_t delta_m() const { return leak ? leak->delta_m : 0; }
  bool operator==(const ScenarioResult&) const = default;
};

// Pure function of (state, id, mitigation): works on a private copy.
ScenarioResult run_scenario(const SimState& state, ScenarioId id,
                            const MitigationConfig& mitigation);

struct CampaignReport {
  MitigationConfig mitigation;
  std::vector<ScenarioResult> results;  // in requested order
  LeakLedger ledger;                    // x_1..x_n
  ErrorSet errors;                      // campaign-wide error ids
  std::uint64_t successful_attacks = 0; // S_N
  std::uint64_t max_leak = 0;           // F_m
  std::uint64_t total_delta = 0;
  bool robust = true;                   // total_delta == 0
};

// Runs the scenarios concurrently on separate copies of the state and
// merges in list order. A scenario that throws is recorded as kError.
// Throws std::invalid_argument on an empty list.
CampaignReport run_campaign(const SimState& state,
                            std::span<const ScenarioId> scenarios,
                            const MitigationConfig& mitigation);

struct ExpectedOutcome {
  OutcomeKind outcome;
  std::optional<FaultKind> fault;

  bool operator==(const ExpectedOutcome&) const = default;
};

// The outcome table: what each scenario must produce under a given
// mitigation setting.
ExpectedOutcome expected_outcome(const SimState& state, ScenarioId id,
                                 const MitigationConfig& mitigation);
bool matches_expected(const SimState& state, const ScenarioResult& result,
                      const MitigationConfig& mitigation);

}  // namespace tzsim

#endif  // TZSIM_HARNESS_HPP_
