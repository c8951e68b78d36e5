//
// Copyright 2026 The tzsim Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "tzsim/secure_services.hpp"

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

}  // namespace

std::string_view to_string(EntryHandler handler) {
  switch (handler) {
    case EntryHandler::kPrintfNse:
      return "PrintfNSE";
    case EntryHandler::kGetDramDataNse:
      return "GetDramDataNSE";
    case EntryHandler::kHeartbeatNse:
      return "HeartbeatNSE";
  }
  return "?";
}

const VeneerEntry& VeneerTable::add(const MemoryMap& map, VeneerEntry entry) {
  if (!map.is_mapped(entry.address) ||
      map.attribute_lookup(entry.address).world !=
          SecurityAttr::kNonSecureCallable) {
    throw ConfigError("veneer '" + entry.name + "' at " + hex(entry.address) +
                      " is not in a non-secure callable region");
  }
  if (find(std::string_view(entry.name)) != nullptr || find(entry.address) != nullptr) {
    throw ConfigError("veneer '" + entry.name + "' is already registered");
  }
  entries_.push_back(std::move(entry));
  return entries_.back();
}

const VeneerEntry* VeneerTable::find(std::string_view name) const {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const VeneerEntry& e) { return e.name == name; });
  return it == entries_.end() ? nullptr : &*it;
}

const VeneerEntry* VeneerTable::find(Address address) const {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const VeneerEntry& e) { return e.address == address; });
  return it == entries_.end() ? nullptr : &*it;
}

AppRegistry::AppRegistry(const MemoryMap& map, std::string pool_region)
    : pool_region_(std::move(pool_region)) {
  const Region* region = map.find_region(std::string_view(pool_region_));
  if (region == nullptr) {
    throw ConfigError("pool region '" + pool_region_ + "' is not in the map");
  }
  if (combine_attributes(region->sau, region->idau) != SecurityAttr::kSecure) {
    throw ConfigError("pool region '" + pool_region_ + "' is not secure");
  }
  pool_base_ = region->base;
  pool_end_ = region->end();
  next_free_ = pool_base_;
}

const TrustedApp& AppRegistry::allocate(MemoryMap& map, std::string id,
                                        std::span<const std::uint8_t> payload) {
  if (find(id) != nullptr) throw DuplicateApp("app '" + id + "' already exists");
  if (payload.size() > free_bytes()) {
    throw PoolExhausted("pool '" + pool_region_ + "' has " +
                        std::to_string(free_bytes()) + " bytes free, app '" +
                        id + "' needs " + std::to_string(payload.size()));
  }
  TrustedApp app{.id = std::move(id),
                 .base = static_cast<Address>(next_free_),
                 .len = static_cast<std::uint32_t>(payload.size())};
  map.load(app.base, payload);
  next_free_ += app.len;
  apps_.push_back(std::move(app));
  return apps_.back();
}

const TrustedApp& AppRegistry::app(std::string_view id) const {
  const TrustedApp* found = find(id);
  if (found == nullptr) throw UnknownApp("no app '" + std::string(id) + "'");
  return *found;
}

const TrustedApp* AppRegistry::find(std::string_view id) const {
  auto it = std::find_if(apps_.begin(), apps_.end(),
                         [&](const TrustedApp& a) { return a.id == id; });
  return it == apps_.end() ? nullptr : &*it;
}

const TrustedApp* AppRegistry::owner_of(Address addr) const {
  auto it = std::find_if(apps_.begin(), apps_.end(), [&](const TrustedApp& a) {
    return addr >= a.base && addr < a.end();
  });
  return it == apps_.end() ? nullptr : &*it;
}

void AppRegistry::require_in_pool(std::uint64_t addr, std::uint64_t len) const {
  if (addr < pool_base_ || addr + len > pool_end_) {
    throw PoolBoundsError("range [" + hex(addr) + ", " + hex(addr + len) +
                          ") leaves pool '" + pool_region_ + "'");
  }
}

Result<std::size_t> secure_strnlen(const MemoryMap& map, Address addr,
                                   std::size_t max_len) {
  for (std::size_t i = 0; i <= max_len; ++i) {
    const std::uint64_t at = std::uint64_t{addr} + i;
    if (at > 0xFFFFFFFFu || !map.is_mapped(static_cast<Address>(at))) {
      return Fault::unmapped(static_cast<Address>(at));
    }
    if (map.peek(static_cast<Address>(at)) == 0) return i;
  }
  throw InputDataError(std::string(kInputDataErrorMessage));
}

bool range_is_nonsecure(const MemoryMap& map, Address addr, std::uint64_t len) {
  std::uint64_t cursor = addr;
  const std::uint64_t stop = cursor + len;
  while (cursor < stop) {
    if (cursor > 0xFFFFFFFFu) return false;
    const Region* region = map.find_region(static_cast<Address>(cursor));
    if (region == nullptr ||
        combine_attributes(region->sau, region->idau) != SecurityAttr::kNonSecure) {
      return false;
    }
    cursor = region->end();
  }
  return true;
}

Result<Bytes> entry_printf(const ExecutionContext& ctx, const MemoryMap& map,
                           const VeneerEntry& entry, Address str_addr,
                           std::size_t max_len) {
  if (ctx.world() != World::kSecure || ctx.gateway() != entry.address) {
    throw StateError("'" + entry.name + "' called without entering through it");
  }
  Result<std::size_t> len = secure_strnlen(map, str_addr, max_len);
  if (!len) return len.fault();
  if (entry.validates_inputs && !range_is_nonsecure(map, str_addr, len.value())) {
    return Fault(FaultKind::kAchillesHeelAbort, str_addr,
                 std::string(kAchillesHeelMessage));
  }
  return map.dump(str_addr, len.value());
}

Bytes get_dram_data(const MemoryMap& map, const AppRegistry& reg,
                    std::string_view app, std::uint64_t requested_len) {
  const TrustedApp& owner = reg.app(app);
  reg.require_in_pool(owner.base, requested_len);
  return map.dump(owner.base, static_cast<std::size_t>(requested_len));
}

void heartbeat_store(MemoryMap& map, const AppRegistry& reg,
                     std::string_view victim,
                     std::span<const std::uint8_t> payload,
                     std::uint64_t claimed_len, std::uint64_t protocol_max) {
  const TrustedApp& app = reg.app(victim);
  if (claimed_len > protocol_max) {
    throw ProtocolMaxExceeded("claimed length " + std::to_string(claimed_len) +
                              " exceeds protocol maximum " +
                              std::to_string(protocol_max));
  }
  if (payload.size() > app.len) {
    throw InputDataError("payload of " + std::to_string(payload.size()) +
                         " bytes does not fit app '" + app.id + "'");
  }
  reg.require_in_pool(app.base, claimed_len);
  map.load(app.base, payload);
}

Bytes heartbeat(MemoryMap& map, const AppRegistry& reg,
                std::string_view victim, std::span<const std::uint8_t> payload,
                std::uint64_t claimed_len, std::uint64_t protocol_max) {
  heartbeat_store(map, reg, victim, payload, claimed_len, protocol_max);
  return get_dram_data(map, reg, victim, claimed_len);
}

Bytes moflow_stream(std::span<const std::uint8_t> data, std::uint32_t overflow) {
  Bytes out(data.begin(), data.end());
  if (data.empty()) {
    out.resize(overflow, 0);
    return out;
  }
  out.reserve(data.size() + overflow);
  for (std::uint32_t i = 0; i < overflow; ++i) {
    out.push_back(data[i % data.size()]);
  }
  return out;
}

void moflow_overflow(MemoryMap& map, const AppRegistry& reg,
                     std::string_view attacker,
                     std::span<const std::uint8_t> data, std::uint32_t overflow) {
  const TrustedApp& app = reg.app(attacker);
  Bytes stream = moflow_stream(data, overflow);
  reg.require_in_pool(app.base, stream.size());
  map.load(app.base, stream);
}

}  // namespace tzsim
