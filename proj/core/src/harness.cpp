//
// Copyright 2026 The tzsim Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "tzsim/harness.hpp"

#include <algorithm>
#include <future>
#include <random>
#include <stdexcept>

#include "tzsim/errors.hpp"
#include "tzsim/execution.hpp"

namespace tzsim {
namespace {

constexpr Address kNsInitialStack = 0x20140000;
constexpr Address kNsResetHandler = kCodeStartNs + 0x101;  // Thumb bit set
constexpr Word kNsCallerReturn = kCodeStartNs + 0x301;
constexpr Address kVeneerStride = 0x20;

constexpr std::string_view kPrintfVeneer = "PrintfNSE";
constexpr std::string_view kDramVeneer = "GetDramDataNSE";
constexpr std::string_view kHeartbeatVeneer = "HeartbeatNSE";

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : text) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

Bytes le_word(Word w) {
  return {static_cast<std::uint8_t>(w), static_cast<std::uint8_t>(w >> 8),
          static_cast<std::uint8_t>(w >> 16), static_cast<std::uint8_t>(w >> 24)};
}

Bytes make_secret(std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5EC12E7ull);
  Bytes secret(kSecretLength);
  for (auto& b : secret) b = static_cast<std::uint8_t>(0x21 + rng() % 0x5E);
  return secret;
}

ExecutionContext non_secure_caller() {
  ExecutionContext ctx(World::kNonSecure);
  ctx.lr = kNsCallerReturn;
  return ctx;
}

ScenarioResult faulted(ScenarioId id, Fault fault) {
  ScenarioResult r;
  r.scenario = id;
  r.outcome = OutcomeKind::kFaulted;
  r.fault = std::move(fault);
  return r;
}

ScenarioResult blocked(ScenarioId id, Rejection why, std::string_view instruction) {
  ScenarioResult r;
  r.scenario = id;
  r.outcome = OutcomeKind::kBlocked;
  r.blocked = std::move(why);
  r.leak = LeakRecord{std::string(instruction), 0, 0, 0};
  return r;
}

Rejection service_rejection(ErrorSet& errors, std::string_view entry,
                            const Error& e, std::string_view kind) {
  std::string key = "service:" + std::string(entry) + ":" + std::string(kind);
  const int id = errors.intern(key, e.what());
  return {"service", std::move(key), e.what(), id};
}

const VeneerEntry& veneer(const SimState& s, std::string_view name) {
  const VeneerEntry* e = s.veneers.find(name);
  if (e == nullptr) throw ConfigError("veneer '" + std::string(name) + "' missing");
  return *e;
}

ScenarioResult run_heart_bleed(SimState& s, GuardedServices& services,
                               ErrorSet& errors) {
  constexpr auto id = ScenarioId::kHeartBleed;
  const ScenarioParams& p = s.params;
  const VeneerEntry& entry = veneer(s, kHeartbeatVeneer);

  Result<ExecutionContext> sec = gateway_enter(non_secure_caller(), s.map, entry, 0);
  if (!sec) return faulted(id, sec.fault());

  std::optional<Guarded<Bytes>> response;
  try {
    response.emplace(services.heartbeat(s.map, s.registry, s.veneers, entry,
                                        p.victim, s.ns_payload_addr,
                                        p.victim_len, p.claimed_len,
                                        p.protocol_max));
  } catch (const ProtocolMaxExceeded& e) {
    return blocked(id, service_rejection(errors, entry.name, e, "ProtocolMaxExceeded"),
                   entry.name);
  }
  if (response->faulted()) return faulted(id, response->fault());
  if (response->rejected()) {
    ExecutionContext back = secure_return(sec.value(),
                                          static_cast<Word>(response->rejection().error_id));
    (void)back;
    return blocked(id, response->rejection(), entry.name);
  }

  const Bytes& bytes = response->value();
  LeakLedger ledger;
  const LeakRecord& rec = ledger.record(entry.name, bytes.size(), p.victim_len);
  ExecutionContext back = secure_return(sec.value(), static_cast<Word>(bytes.size()));
  (void)back;

  ScenarioResult r;
  r.scenario = id;
  r.leak = rec;
  if (rec.delta_m > 0) {
    r.outcome = OutcomeKind::kLeaked;
    r.leaked.assign(bytes.begin() + p.victim_len, bytes.end());
    r.leak_source = s.registry.app(p.victim).base + p.victim_len;
  } else {
    r.outcome = OutcomeKind::kClean;
  }
  return r;
}

ScenarioResult run_invalid_transition(SimState& s) {
  constexpr auto id = ScenarioId::kInvStoNsTrans;
  ExecutionContext ctx(World::kSecure);

  // Secure boot code fetching the NS stack pointer and reset handler.
  Result<Word> msp = read_word(ctx, s.map, kCodeStartNs);
  if (!msp) return faulted(id, msp.fault());
  Result<Word> reset = read_word(ctx, s.map, kCodeStartNs + 4);
  if (!reset) return faulted(id, reset.fault());
  ctx.msp_ns = msp.value();
  ctx.regs[0] = msp.value();
  ctx.regs[1] = kCodeStartNs;  // value written to the NS VTOR
  ctx.regs[2] = reset.value();

  Result<ExecutionContext> ns = bxns_transition(ctx, s.map, reset.value());
  if (!ns) return faulted(id, ns.fault());
  ScenarioResult r;
  r.scenario = id;
  return r;
}

ScenarioResult run_invalid_entry(SimState& s) {
  constexpr auto id = ScenarioId::kInvSEntry;
  const VeneerEntry& entry = veneer(s, kPrintfVeneer);
  ExecutionContext caller = non_secure_caller();
  caller.regs[0] = s.ns_string_addr;
  Result<ExecutionContext> sec =
      gateway_enter(caller, s.map, entry, s.params.skip_offset);
  if (!sec) return faulted(id, sec.fault());
  Result<Bytes> echoed = entry_printf(sec.value(), s.map, entry, s.ns_string_addr,
                                      s.params.max_string_length);
  if (!echoed) return faulted(id, echoed.fault());
  ScenarioResult r;
  r.scenario = id;
  return r;
}

ScenarioResult run_data_access(SimState& s, ScenarioId id, Address target) {
  Result<Word> value = read_word(non_secure_caller(), s.map, target);
  if (!value) return faulted(id, value.fault());
  ScenarioResult r;
  r.scenario = id;
  return r;
}

ScenarioResult run_invalid_input_params(SimState& s, GuardedServices& services,
                                        ErrorSet& errors) {
  constexpr auto id = ScenarioId::kInvInputParams;
  const VeneerEntry& entry = veneer(s, kPrintfVeneer);
  ExecutionContext caller = non_secure_caller();
  caller.regs[0] = kSecAddress;
  Result<ExecutionContext> sec = gateway_enter(caller, s.map, entry, 0);
  if (!sec) return faulted(id, sec.fault());

  std::optional<Guarded<Bytes>> echoed;
  try {
    echoed.emplace(services.entry_printf(sec.value(), s.map, s.veneers, entry,
                                         kSecAddress, s.params.max_string_length));
  } catch (const InputDataError& e) {
    return blocked(id, service_rejection(errors, entry.name, e, "InputDataError"),
                   entry.name);
  }
  if (echoed->faulted()) return faulted(id, echoed->fault());
  if (echoed->rejected()) return blocked(id, echoed->rejection(), entry.name);

  const Bytes& bytes = echoed->value();
  std::uint64_t from_normal_world = 0;
  Bytes secure_bytes;
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const Address at = kSecAddress + static_cast<Address>(i);
    if (s.map.attribute_lookup(at).world == SecurityAttr::kNonSecure) {
      ++from_normal_world;
    } else {
      secure_bytes.push_back(bytes[i]);
    }
  }
  LeakLedger ledger;
  const LeakRecord& rec = ledger.record(entry.name, bytes.size(), from_normal_world);
  ExecutionContext back = secure_return(sec.value(), static_cast<Word>(bytes.size()));
  (void)back;

  ScenarioResult r;
  r.scenario = id;
  r.leak = rec;
  if (rec.delta_m > 0) {
    r.outcome = OutcomeKind::kLeaked;
    r.leaked = std::move(secure_bytes);
    r.leak_source = kSecAddress;
  }
  return r;
}

}  // namespace

std::string_view to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::kHeartBleed:
      return "FAULT_HEART_BLEED";
    case ScenarioId::kInvStoNsTrans:
      return "FAULT_INV_S_TO_NS_TRANS";
    case ScenarioId::kInvSEntry:
      return "FAULT_INV_S_ENTRY";
    case ScenarioId::kInvNsDataAccess:
      return "FAULT_INV_NS_DATA_ACCESS";
    case ScenarioId::kInvInputParams:
      return "FAULT_INV_INPUT_PARAMS";
    case ScenarioId::kInvNsData2Access:
      return "FAULT_INV_NS_DATA2_ACCESS";
  }
  return "?";
}

std::optional<ScenarioId> scenario_from_int(int value) {
  if (value < 0 || value > 5) return std::nullopt;
  return static_cast<ScenarioId>(value);
}

std::string_view to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::kFaulted:
      return "Faulted";
    case OutcomeKind::kLeaked:
      return "Leaked";
    case OutcomeKind::kBlocked:
      return "Blocked";
    case OutcomeKind::kClean:
      return "Clean";
    case OutcomeKind::kError:
      return "Error";
  }
  return "?";
}

ScenarioParams ScenarioParams::full_size() {
  ScenarioParams p;
  p.victim_len *= 1024;
  p.claimed_len *= 1024;
  p.neighbor_len *= 1024;
  p.protocol_max = kDefaultProtocolMax;
  return p;
}

Bytes opaque_payload(std::string_view app_id, std::size_t len,
                     std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ fnv1a(app_id));
  Bytes out(len);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng() >> 56);
  return out;
}

SimState build_sim_state(MemoryMap map, const ScenarioParams& params,
                         const std::optional<AppLayout>& apps) {
  const Region* ns_code = map.find_region(kCodeStartNs);
  if (ns_code == nullptr ||
      combine_attributes(ns_code->sau, ns_code->idau) != SecurityAttr::kNonSecure) {
    throw ConfigError("no non-secure region at the NS code start");
  }
  if (std::uint64_t{kCodeStartNs} + kNsPayloadOffset + params.victim_len >
      ns_code->end()) {
    throw ConfigError("non-secure code region '" + ns_code->name +
                      "' cannot hold a " + std::to_string(params.victim_len) +
                      "-byte heartbeat payload");
  }
  const Region* secret_region = map.find_region(kSecAddress);
  if (secret_region == nullptr ||
      combine_attributes(secret_region->sau, secret_region->idau) !=
          SecurityAttr::kSecure ||
      secret_region->end() < std::uint64_t{kSecAddress} + kSecretLength + 1) {
    throw ConfigError("no secure region able to hold the secret at SEC_ADDRESS");
  }
  const Region* nsc = nullptr;
  for (const Region& r : map.regions()) {
    if (combine_attributes(r.sau, r.idau) == SecurityAttr::kNonSecureCallable) {
      nsc = &r;
      break;
    }
  }
  if (nsc == nullptr || nsc->size < 3 * kVeneerStride) {
    throw ConfigError("map has no non-secure callable region for the veneers");
  }
  const Address veneer_base = nsc->base;

  AppRegistry registry(map, params.pool_region);
  SimState s{.map = std::move(map),
             .registry = std::move(registry),
             .veneers = {},
             .params = params,
             .ns_string_addr = kCodeStartNs + kNsTestStringOffset,
             .ns_payload_addr = kCodeStartNs + kNsPayloadOffset,
             .secret = make_secret(params.seed)};

  // NS vector table: initial MSP then reset handler.
  s.map.load(kCodeStartNs, le_word(kNsInitialStack));
  s.map.load(kCodeStartNs + 4, le_word(kNsResetHandler));

  Bytes test_string(kInvalidTestCaseString.begin(), kInvalidTestCaseString.end());
  test_string.push_back(0);
  s.map.load(s.ns_string_addr, test_string);
  s.map.load(s.ns_payload_addr,
             opaque_payload("ns-heartbeat-payload", params.victim_len, params.seed));

  Bytes secret = s.secret;
  secret.push_back(0);
  s.map.load(kSecAddress, secret);

  s.veneers.add(s.map, {std::string(kPrintfVeneer), veneer_base,
                        params.validates_inputs, EntryHandler::kPrintfNse});
  s.veneers.add(s.map, {std::string(kDramVeneer), veneer_base + kVeneerStride,
                        false, EntryHandler::kGetDramDataNse});
  s.veneers.add(s.map, {std::string(kHeartbeatVeneer),
                        veneer_base + 2 * kVeneerStride, false,
                        EntryHandler::kHeartbeatNse});

  AppLayout layout;
  if (apps) {
    layout = *apps;
  } else {
    for (std::string_view id : {"A1", "A2", "A3", "A5"}) {
      const std::size_t len = id == params.victim ? params.victim_len : params.neighbor_len;
      layout.push_back({std::string(id), opaque_payload(id, len, params.seed)});
    }
  }
  for (const AppSeed& app : layout) {
    try {
      s.registry.allocate(s.map, app.id, app.payload);
    } catch (const Error& e) {
      throw ConfigError(std::string("app layout: ") + e.what());
    }
  }
  const TrustedApp* victim = s.registry.find(params.victim);
  if (victim == nullptr) {
    throw ConfigError("heartbeat victim '" + params.victim + "' is not in the pool");
  }
  if (params.victim_len > victim->len) {
    throw ConfigError("heartbeat payload of " + std::to_string(params.victim_len) +
                      " bytes exceeds app '" + victim->id + "' (" +
                      std::to_string(victim->len) + " bytes)");
  }
  return s;
}

const LeakRecord& LeakLedger::record(std::string instruction,
                                     std::uint64_t response_len,
                                     std::uint64_t expected_len) {
  if (response_len < expected_len) {
    throw AccountingError("response of " + std::to_string(response_len) +
                          " bytes for '" + instruction +
                          "' is shorter than the expected " +
                          std::to_string(expected_len));
  }
  records_.push_back({std::move(instruction), response_len, expected_len,
                      response_len - expected_len});
  return records_.back();
}

std::uint64_t LeakLedger::total_delta() const {
  std::uint64_t total = 0;
  for (const LeakRecord& r : records_) total += r.delta_m;
  return total;
}

LeakRecord record_leak(LeakLedger& ledger, std::string instruction,
                       std::uint64_t response_len, std::uint64_t expected_len) {
  return ledger.record(std::move(instruction), response_len, expected_len);
}

ScenarioResult run_scenario(const SimState& state, ScenarioId id,
                            const MitigationConfig& mitigation) {
  SimState s = state;
  ErrorSet errors;
  GuardedServices services(mitigation, s.registry, errors);
  switch (id) {
    case ScenarioId::kHeartBleed:
      return run_heart_bleed(s, services, errors);
    case ScenarioId::kInvStoNsTrans:
      return run_invalid_transition(s);
    case ScenarioId::kInvSEntry:
      return run_invalid_entry(s);
    case ScenarioId::kInvNsDataAccess:
      return run_data_access(s, id, kSecAddress);
    case ScenarioId::kInvInputParams:
      return run_invalid_input_params(s, services, errors);
    case ScenarioId::kInvNsData2Access:
      return run_data_access(s, id, kNonsecAddress);
  }
  throw std::invalid_argument("unknown scenario id");
}

CampaignReport run_campaign(const SimState& state,
                            std::span<const ScenarioId> scenarios,
                            const MitigationConfig& mitigation) {
  if (scenarios.empty()) {
    throw std::invalid_argument("campaign needs at least one scenario");
  }
  std::vector<std::future<ScenarioResult>> pending;
  pending.reserve(scenarios.size());
  for (ScenarioId id : scenarios) {
    pending.push_back(std::async(std::launch::async, [&state, id, mitigation] {
      return run_scenario(state, id, mitigation);
    }));
  }

  CampaignReport report;
  report.mitigation = mitigation;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    ScenarioResult r;
    try {
      r = pending[i].get();
    } catch (const std::exception& e) {
      r = ScenarioResult{};
      r.scenario = scenarios[i];
      r.outcome = OutcomeKind::kError;
      r.error = e.what();
    }
    if (r.blocked) {
      r.blocked->error_id = report.errors.intern(r.blocked->key, r.blocked->detail);
    }
    if (r.leak) {
      report.ledger.record("x_" + std::to_string(report.ledger.records().size() + 1) +
                               ":" + r.leak->instruction,
                           r.leak->response_len, r.leak->expected_len);
    }
    if (r.outcome == OutcomeKind::kLeaked && r.delta_m() > 0) {
      ++report.successful_attacks;
      report.max_leak = std::max(report.max_leak, r.delta_m());
    }
    report.results.push_back(std::move(r));
  }
  report.total_delta = report.ledger.total_delta();
  report.robust = report.total_delta == 0;
  return report;
}

ExpectedOutcome expected_outcome(const SimState& state, ScenarioId id,
                                 const MitigationConfig& mitigation) {
  const ScenarioParams& p = state.params;
  switch (id) {
    case ScenarioId::kHeartBleed: {
      const TrustedApp& victim = state.registry.app(p.victim);
      if (p.claimed_len > p.protocol_max) return {OutcomeKind::kBlocked, {}};
      if (p.claimed_len < p.victim_len) return {OutcomeKind::kError, {}};
      if (mitigation.verifier && p.claimed_len > victim.len) {
        return {OutcomeKind::kBlocked, {}};
      }
      if (p.claimed_len > p.victim_len) return {OutcomeKind::kLeaked, {}};
      return {OutcomeKind::kClean, {}};
    }
    case ScenarioId::kInvStoNsTrans:
    case ScenarioId::kInvNsDataAccess:
      return {OutcomeKind::kFaulted, FaultKind::kSecureFault};
    case ScenarioId::kInvSEntry:
      if (p.skip_offset == 0) return {OutcomeKind::kClean, {}};
      return {OutcomeKind::kFaulted, FaultKind::kSecureFault};
    case ScenarioId::kInvInputParams:
      if (mitigation.boundary) return {OutcomeKind::kBlocked, {}};
      if (p.validates_inputs) {
        return {OutcomeKind::kFaulted, FaultKind::kAchillesHeelAbort};
      }
      return {OutcomeKind::kLeaked, {}};
    case ScenarioId::kInvNsData2Access:
      return {OutcomeKind::kFaulted, FaultKind::kDataBusError};
  }
  return {OutcomeKind::kError, {}};
}

bool matches_expected(const SimState& state, const ScenarioResult& result,
                      const MitigationConfig& mitigation) {
  ExpectedOutcome want = expected_outcome(state, result.scenario, mitigation);
  if (result.outcome != want.outcome) return false;
  if (want.fault) return result.fault && result.fault->kind() == *want.fault;
  return true;
}

}  // namespace tzsim
