//
// Copyright 2026 The tzsim Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "tzsim/mitigation.hpp"

#include <algorithm>
#include <cstdio>

#include "tzsim/errors.hpp"

namespace tzsim {
namespace {

std::string hex(std::uint64_t addr) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "0x%08llX",
                static_cast<unsigned long long>(addr));
  return buf;
}

std::string describe(AddressRange r) {
  return "[" + hex(r.base) + ", " + hex(r.end()) + ")";
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

int ErrorSet::intern(const std::string& key, const std::string& detail) {
  if (const Entry* e = find(std::string_view(key))) return e->id;
  const int id = static_cast<int>(entries_.size()) + 1;
  entries_.push_back({id, key, detail});
  return id;
}

const ErrorSet::Entry* ErrorSet::find(int id) const {
  if (id < 1 || id > static_cast<int>(entries_.size())) return nullptr;
  return &entries_[static_cast<std::size_t>(id - 1)];
}

const ErrorSet::Entry* ErrorSet::find(std::string_view key) const {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const Entry& e) { return e.key == key; });
  return it == entries_.end() ? nullptr : &*it;
}

BoundaryDecision boundary_verify(const MemoryMap& map,
                                 const VeneerTable& veneers,
                                 const BoundaryRequest& request,
                                 ErrorSet& errors) {
  if (veneers.find(std::string_view(request.entry)) == nullptr) {
    throw ConfigError("boundary check for unregistered entry '" +
                      request.entry + "'");
  }
  BoundaryDecision decision;
  for (std::size_t i = 0; i < request.args.size(); ++i) {
    const AddressRange& arg = request.args[i];
    decision.checked_range = arg;
    if (!range_is_nonsecure(map, arg.base, arg.len)) {
      decision.allowed = false;
      decision.failing_arg = i;
      decision.error_id = errors.intern(
          "boundary:" + request.entry + ":arg" + std::to_string(i),
          "argument " + std::to_string(i) + " of " + request.entry + " " +
              describe(arg) + " is not in non-secure memory");
      return decision;
    }
  }
  return decision;
}

AllocationLedger AllocationLedger::mirror(const AppRegistry& reg) {
  AllocationLedger ledger;
  for (const TrustedApp& app : reg.apps()) {
    leak_collect(ledger, AllocEvent{app.id, app.base, app.len});
  }
  return ledger;
}

const Allocation* AllocationLedger::find(std::string_view app) const {
  auto it = entries_.find(app);
  return it == entries_.end() ? nullptr : &it->second;
}

VerifierVerdict verifier_check(const AllocationLedger& ledger,
                               std::string_view app, AddressRange response) {
  const Allocation* own = ledger.find(app);
  if (own == nullptr) {
    throw UnknownApp("verifier: no allocation for '" + std::string(app) + "'");
  }
  const bool inside = response.base >= own->base && response.end() <= own->end();
  return inside ? VerifierVerdict::kOk : VerifierVerdict::kBlocked;
}

std::optional<LeakAlert> leak_collect(AllocationLedger& ledger,
                                      const LedgerEvent& event) {
  return std::visit(
      Overloaded{
          [&](const AllocEvent& e) -> std::optional<LeakAlert> {
            if (ledger.entries_.contains(e.app)) {
              throw DuplicateApp("collector: '" + e.app + "' is already live");
            }
            const Allocation fresh{e.base, e.len};
            for (const auto& [id, a] : ledger.entries_) {
              if (fresh.base < a.end() && a.base < fresh.end()) {
                throw OverlapError("collector: '" + e.app + "' overlaps '" +
                                   id + "'");
              }
            }
            ledger.entries_.emplace(e.app, fresh);
            ledger.freed_.erase(e.app);
            return std::nullopt;
          },
          [&](const FreeEvent& e) -> std::optional<LeakAlert> {
            auto it = ledger.entries_.find(e.app);
            if (it == ledger.entries_.end()) {
              if (ledger.freed_.contains(e.app)) {
                throw DoubleFree("collector: '" + e.app + "' freed twice");
              }
              throw UnknownApp("collector: free of unknown '" + e.app + "'");
            }
            ledger.entries_.erase(it);
            ledger.freed_.insert(e.app);
            return std::nullopt;
          },
          [&](const WriteEvent& e) -> std::optional<LeakAlert> {
            const Allocation* own = ledger.find(e.app);
            if (own == nullptr) {
              throw UnknownApp("collector: write by unknown '" + e.app + "'");
            }
            const std::uint64_t lo = e.range.base;
            const std::uint64_t hi = e.range.end();
            const std::uint64_t inside =
                std::min(hi, own->end()) > std::max(lo, std::uint64_t{own->base})
                    ? std::min(hi, own->end()) -
                          std::max(lo, std::uint64_t{own->base})
                    : 0;
            const std::uint64_t outside = e.range.len - inside;
            if (outside == 0) return std::nullopt;

            LeakAlert alert{.writer = e.app, .victims = {}, .overlap = outside};
            std::vector<std::pair<Address, LeakVictim>> hits;
            for (const auto& [id, a] : ledger.entries_) {
              if (id == e.app) continue;
              const std::uint64_t from = std::max(lo, std::uint64_t{a.base});
              const std::uint64_t to = std::min(hi, a.end());
              if (to > from) hits.push_back({a.base, {id, to - from}});
            }
            std::sort(hits.begin(), hits.end(),
                      [](const auto& x, const auto& y) { return x.first < y.first; });
            for (auto& [_, v] : hits) alert.victims.push_back(std::move(v));
            return alert;
          },
      },
      event);
}

GuardedServices::GuardedServices(MitigationConfig config,
                                 const AppRegistry& reg, ErrorSet& errors)
    : config_(config), ledger_(AllocationLedger::mirror(reg)), errors_(&errors) {}

Rejection GuardedServices::reject(std::string mechanism, std::string key,
                                  std::string detail) {
  const int id = errors_->intern(key, detail);
  return {std::move(mechanism), std::move(key), std::move(detail), id};
}

std::optional<Rejection> GuardedServices::screen(const MemoryMap& map,
                                                 const VeneerTable& veneers,
                                                 const BoundaryRequest& request) {
  if (!config_.boundary) return std::nullopt;
  BoundaryDecision d = boundary_verify(map, veneers, request, *errors_);
  if (d.allowed) return std::nullopt;
  const ErrorSet::Entry* e = errors_->find(d.error_id);
  return Rejection{"boundary", e->key, e->detail, d.error_id};
}

std::optional<Rejection> GuardedServices::verify_response(
    std::string_view app, AddressRange response) {
  if (!config_.verifier) return std::nullopt;
  if (verifier_check(ledger_, app, response) == VerifierVerdict::kOk) {
    return std::nullopt;
  }
  const Allocation* own = ledger_.find(app);
  return reject("verifier", "verifier:" + std::string(app),
                "response " + describe(response) + " exceeds allocation of '" +
                    std::string(app) + "' " +
                    describe({own->base, own->len}));
}

std::optional<Rejection> GuardedServices::collect_write(std::string_view app,
                                                        AddressRange range) {
  if (!config_.collector) return std::nullopt;
  std::optional<LeakAlert> alert =
      leak_collect(ledger_, WriteEvent{std::string(app), range});
  if (!alert) return std::nullopt;
  std::string victims;
  for (const LeakVictim& v : alert->victims) {
    if (!victims.empty()) victims += ", ";
    victims += v.app + " (" + std::to_string(v.overlap) + " B)";
  }
  return reject("collector", "collector:" + std::string(app),
                "write " + describe(range) + " by '" + std::string(app) +
                    "' spills " + std::to_string(alert->overlap) +
                    " bytes outside its allocation" +
                    (victims.empty() ? std::string() : " into " + victims));
}

Guarded<Bytes> GuardedServices::entry_printf(const ExecutionContext& ctx,
                                             const MemoryMap& map,
                                             const VeneerTable& veneers,
                                             const VeneerEntry& entry,
                                             Address str_addr,
                                             std::size_t max_len) {
  if (config_.boundary) {
    Result<std::size_t> len = secure_strnlen(map, str_addr, max_len);
    if (!len) return len.fault();
    if (auto r = screen(map, veneers, {entry.name, {{str_addr, len.value()}}})) {
      return *r;
    }
  }
  Result<Bytes> out = tzsim::entry_printf(ctx, map, entry, str_addr, max_len);
  if (!out) return out.fault();
  return std::move(out).value();
}

Guarded<Bytes> GuardedServices::heartbeat(
    MemoryMap& map, const AppRegistry& reg, const VeneerTable& veneers,
    const VeneerEntry& entry, std::string_view victim, Address payload_addr,
    std::uint32_t payload_len, std::uint64_t claimed_len,
    std::uint64_t protocol_max) {
  if (auto r = screen(map, veneers, {entry.name, {{payload_addr, payload_len}}})) {
    return *r;
  }
  for (std::uint64_t i = 0; i < payload_len; ++i) {
    const std::uint64_t at = std::uint64_t{payload_addr} + i;
    if (at > 0xFFFFFFFFu || !map.is_mapped(static_cast<Address>(at))) {
      return Fault::unmapped(static_cast<Address>(at));
    }
  }
  const Bytes payload = map.dump(payload_addr, payload_len);
  const TrustedApp& app = reg.app(victim);
  if (auto r = collect_write(victim, {app.base, payload_len})) return *r;
  heartbeat_store(map, reg, victim, payload, claimed_len, protocol_max);
  if (auto r = verify_response(victim, {app.base, claimed_len})) return *r;
  return tzsim::get_dram_data(map, reg, victim, claimed_len);
}

Guarded<Bytes> GuardedServices::get_dram_data(const MemoryMap& map,
                                              const AppRegistry& reg,
                                              std::string_view app,
                                              std::uint64_t requested_len) {
  const TrustedApp& owner = reg.app(app);
  if (auto r = verify_response(app, {owner.base, requested_len})) return *r;
  return tzsim::get_dram_data(map, reg, app, requested_len);
}

Guarded<std::monostate> GuardedServices::moflow_overflow(
    MemoryMap& map, const AppRegistry& reg, std::string_view attacker,
    std::span<const std::uint8_t> data, std::uint32_t overflow) {
  const TrustedApp& app = reg.app(attacker);
  if (auto r = collect_write(attacker,
                             {app.base, std::uint64_t{data.size()} + overflow})) {
    return *r;
  }
  tzsim::moflow_overflow(map, reg, attacker, data, overflow);
  return std::monostate{};
}

}  // namespace tzsim
