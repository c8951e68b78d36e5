//
// Copyright 2026 The tzsim Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef TZSIM_MITIGATION_HPP_
#define TZSIM_MITIGATION_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tzsim/execution.hpp"
#include "tzsim/memory_map.hpp"
#include "tzsim/secure_services.hpp"

namespace tzsim {

// Three independently switchable mechanisms:
//   boundary   range check on pointer arguments, in the callable region
//   verifier   response-bounds check on the secure side
//   collector  allocation ledger that watches every pool write
struct MitigationConfig {
  bool boundary = false;
  bool verifier = false;
  bool collector = false;

  static MitigationConfig off() { return {}; }
  static MitigationConfig on() { return {true, true, true}; }

  bool any() const { return boundary || verifier || collector; }
  bool all() const { return boundary && verifier && collector; }
  bool operator==(const MitigationConfig&) const = default;
};

struct AddressRange {
  Address base = 0;
  std::uint64_t len = 0;

  std::uint64_t end() const { return std::uint64_t{base} + len; }
  bool operator==(const AddressRange&) const = default;
};

// The error set E{e_1..e_n}: each distinct failure key gets a dense id,
// starting at 1, in order of first occurrence.
class ErrorSet {
 public:
  struct Entry {
    int id;
    std::string key;
    std::string detail;
  };

  int intern(const std::string& key, const std::string& detail);
  const Entry* find(int id) const;
  const Entry* find(std::string_view key) const;
  std::span<const Entry> entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

struct BoundaryRequest {
  std::string entry;
  std::vector<AddressRange> args;
};

struct BoundaryDecision {
  bool allowed = true;
  int error_id = 0;  // 0 when allowed
  std::size_t failing_arg = 0;
  AddressRange checked_range;

  bool operator==(const BoundaryDecision&) const = default;
};

// Allow iff every byte of every argument range is mapped NonSecure. On Deny
// the error id is keyed by entry and argument index. Throws ConfigError for
// an unregistered entry.
BoundaryDecision boundary_verify(const MemoryMap& map,
                                 const VeneerTable& veneers,
                                 const BoundaryRequest& request,
                                 ErrorSet& errors);

struct Allocation {
  Address base = 0;
  std::uint64_t len = 0;

  std::uint64_t end() const { return std::uint64_t{base} + len; }
  bool operator==(const Allocation&) const = default;
};

struct AllocEvent {
  std::string app;
  Address base = 0;
  std::uint64_t len = 0;
};
struct FreeEvent {
  std::string app;
};
struct WriteEvent {
  std::string app;
  AddressRange range;
};
using LedgerEvent = std::variant<AllocEvent, FreeEvent, WriteEvent>;

struct LeakVictim {
  std::string app;
  std::uint64_t overlap = 0;

  bool operator==(const LeakVictim&) const = default;
};

struct LeakAlert {
  std::string writer;
  std::vector<LeakVictim> victims;  // ordered by address
  std::uint64_t overlap = 0;        // bytes written outside the writer's own allocation

  bool operator==(const LeakAlert&) const = default;
};

class AllocationLedger {
 public:
  static AllocationLedger mirror(const AppRegistry& reg);

  const Allocation* find(std::string_view app) const;
  std::size_t live() const { return entries_.size(); }
  const std::map<std::string, Allocation, std::less<>>& entries() const {
    return entries_;
  }

 private:
  friend std::optional<LeakAlert> leak_collect(AllocationLedger&,
                                               const LedgerEvent&);

  std::map<std::string, Allocation, std::less<>> entries_;
  std::set<std::string, std::less<>> freed_;
};

enum class VerifierVerdict : std::uint8_t { kOk, kBlocked };

// kOk iff the response range lies inside the app's own allocation. Throws
// UnknownApp.
VerifierVerdict verifier_check(const AllocationLedger& ledger,
                               std::string_view app, AddressRange response);

// Empty on success. Throws UnknownApp (including writes by freed apps),
// DoubleFree, DuplicateApp, OverlapError.
std::optional<LeakAlert> leak_collect(AllocationLedger& ledger,
                                      const LedgerEvent& event);

// Why a guarded call was refused, with its id in the error set.
struct Rejection {
  std::string mechanism;  // "boundary", "verifier", "collector"
  std::string key;
  std::string detail;
  int error_id = 0;

  bool operator==(const Rejection&) const = default;
};

template <class T>
class Guarded {
 public:
  Guarded(T value) : v_(std::move(value)) {}        // NOLINT
  Guarded(Fault fault) : v_(std::move(fault)) {}    // NOLINT
  Guarded(Rejection r) : v_(std::move(r)) {}        // NOLINT

  bool ok() const { return std::holds_alternative<T>(v_); }
  bool faulted() const { return std::holds_alternative<Fault>(v_); }
  bool rejected() const { return std::holds_alternative<Rejection>(v_); }

  const T& value() const { return std::get<T>(v_); }
  const Fault& fault() const { return std::get<Fault>(v_); }
  const Rejection& rejection() const { return std::get<Rejection>(v_); }

 private:
  std::variant<T, Fault, Rejection> v_;
};

// Secure-service entry points with the enabled mechanisms wrapped around
// them. With every mechanism off each call behaves exactly like the plain
// service.
class GuardedServices {
 public:
  GuardedServices(MitigationConfig config, const AppRegistry& reg,
                  ErrorSet& errors);

  const MitigationConfig& config() const { return config_; }
  const AllocationLedger& ledger() const { return ledger_; }

  // Callable-region screen of pointer arguments, before any secure code
  // runs. Empty when allowed or when the boundary mechanism is off.
  std::optional<Rejection> screen(const MemoryMap& map,
                                  const VeneerTable& veneers,
                                  const BoundaryRequest& request);

  // Screens [str_addr, str_addr+strlen) then calls entry_printf.
  Guarded<Bytes> entry_printf(const ExecutionContext& ctx, const MemoryMap& map,
                              const VeneerTable& veneers,
                              const VeneerEntry& entry, Address str_addr,
                              std::size_t max_len = kMaxStringLength);

  // Heartbeat entry as seen from the gateway: the payload is read from
  // caller memory at payload_addr.
  Guarded<Bytes> heartbeat(MemoryMap& map, const AppRegistry& reg,
                           const VeneerTable& veneers, const VeneerEntry& entry,
                           std::string_view victim, Address payload_addr,
                           std::uint32_t payload_len, std::uint64_t claimed_len,
                           std::uint64_t protocol_max = kDefaultProtocolMax);

  Guarded<Bytes> get_dram_data(const MemoryMap& map, const AppRegistry& reg,
                               std::string_view app,
                               std::uint64_t requested_len);

  Guarded<std::monostate> moflow_overflow(MemoryMap& map,
                                          const AppRegistry& reg,
                                          std::string_view attacker,
                                          std::span<const std::uint8_t> data,
                                          std::uint32_t overflow = kComDramOffset);

 private:
  Rejection reject(std::string mechanism, std::string key, std::string detail);
  std::optional<Rejection> verify_response(std::string_view app,
                                           AddressRange response);
  std::optional<Rejection> collect_write(std::string_view app,
                                         AddressRange range);

  MitigationConfig config_;
  AllocationLedger ledger_;
  ErrorSet* errors_;
};

}  // namespace tzsim

#endif  // TZSIM_MITIGATION_HPP_
