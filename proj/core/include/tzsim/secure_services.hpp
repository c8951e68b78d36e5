//
// Copyright 2026 The tzsim Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef TZSIM_SECURE_SERVICES_HPP_
#define TZSIM_SECURE_SERVICES_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tzsim/execution.hpp"
#include "tzsim/memory_map.hpp"

namespace tzsim {

inline constexpr std::string_view kAchillesHeelMessage =
    "Achilles' Heel exception: String is not located in normal world!";
inline constexpr std::string_view kInputDataErrorMessage =
    "Input data error: String too long or invalid string termination!";

inline constexpr std::size_t kMaxStringLength = 256;
inline constexpr std::uint32_t kDefaultProtocolMax = 128 * 1024;

// Bytes the MOFlow attacker keeps writing past its own data.
inline constexpr std::uint32_t kComDramOffset = 16;
inline constexpr std::string_view kMoflowMarker = "I am malicious. Check my tail";

enum class EntryHandler : std::uint8_t {
  kPrintfNse,
  kGetDramDataNse,
  kHeartbeatNse,
};

std::string_view to_string(EntryHandler handler);

// One non-secure-callable gateway. The SG marker sits at offset 0.
struct VeneerEntry {
  std::string name;
  Address address = 0;
  bool validates_inputs = false;
  EntryHandler handler = EntryHandler::kPrintfNse;
};

class VeneerTable {
 public:
  // Throws ConfigError unless the address is non-secure callable and the
  // name is unused.
  const VeneerEntry& add(const MemoryMap& map, VeneerEntry entry);

  const VeneerEntry* find(std::string_view name) const;
  const VeneerEntry* find(Address address) const;
  std::span<const VeneerEntry> entries() const { return entries_; }

 private:
  std::vector<VeneerEntry> entries_;
};

inline Result<ExecutionContext> gateway_enter(const ExecutionContext& ctx,
                                              const MemoryMap& map,
                                              const VeneerEntry& entry,
                                              std::uint32_t byte_offset) {
  return gateway_enter(ctx, map, entry.address, byte_offset);
}

struct TrustedApp {
  std::string id;
  Address base = 0;
  std::uint32_t len = 0;

  std::uint64_t end() const { return std::uint64_t{base} + len; }
};

// Trusted apps packed back to back, in allocation order and without guard
// bytes, into one shared secure region. Nothing ties a byte of the pool to
// the app that owns it.
class AppRegistry {
 public:
  // Throws ConfigError if the region does not exist or is not secure.
  AppRegistry(const MemoryMap& map, std::string pool_region);

  // Copies the payload into the pool at next_free(). Throws PoolExhausted,
  // DuplicateApp.
  const TrustedApp& allocate(MemoryMap& map, std::string id,
                             std::span<const std::uint8_t> payload);

  // Throws UnknownApp.
  const TrustedApp& app(std::string_view id) const;
  const TrustedApp* find(std::string_view id) const;
  const TrustedApp* owner_of(Address addr) const;

  std::span<const TrustedApp> apps() const { return apps_; }
  const std::string& pool_region() const { return pool_region_; }
  Address pool_base() const { return pool_base_; }
  std::uint64_t pool_end() const { return pool_end_; }
  std::uint64_t pool_size() const { return pool_end_ - pool_base_; }
  std::uint64_t next_free() const { return next_free_; }
  std::uint64_t free_bytes() const { return pool_end_ - next_free_; }

  // Throws PoolBoundsError if [addr, addr+len) leaves the pool.
  void require_in_pool(std::uint64_t addr, std::uint64_t len) const;

 private:
  std::string pool_region_;
  Address pool_base_ = 0;
  std::uint64_t pool_end_ = 0;
  std::uint64_t next_free_ = 0;
  std::vector<TrustedApp> apps_;
};

// strnlen over simulated memory with secure-state access, following the
// entry function's termination rule: a string with no NUL in the first
// max_len bytes is accepted only if the byte at max_len is NUL. Throws
// InputDataError otherwise. Unmapped bytes surface as a fault.
Result<std::size_t> secure_strnlen(const MemoryMap& map, Address addr,
                                   std::size_t max_len);

// True iff every byte of [addr, addr+len) is mapped with world NonSecure.
bool range_is_nonsecure(const MemoryMap& map, Address addr, std::uint64_t len);

// Printf-style entry. Runs in the secure state, so it can read anything.
// With validates_inputs set it refuses strings that are not entirely in
// non-secure memory with an AchillesHeelAbort fault.
Result<Bytes> entry_printf(const ExecutionContext& ctx, const MemoryMap& map,
                           const VeneerEntry& entry, Address str_addr,
                           std::size_t max_len = kMaxStringLength);

// requested_len bytes of the pool starting at the app's base. No check
// against the app's own length. Throws PoolBoundsError, UnknownApp.
Bytes get_dram_data(const MemoryMap& map, const AppRegistry& reg,
                    std::string_view app, std::uint64_t requested_len);

// Stores the payload into the victim's buffer, then echoes claimed_len
// bytes from the buffer start without comparing the claim to the payload.
// Throws ProtocolMaxExceeded, InputDataError (payload larger than the
// buffer), PoolBoundsError, UnknownApp.
Bytes heartbeat(MemoryMap& map, const AppRegistry& reg,
                std::string_view victim, std::span<const std::uint8_t> payload,
                std::uint64_t claimed_len,
                std::uint64_t protocol_max = kDefaultProtocolMax);

// The request half of heartbeat(): validates the request and stores the
// payload, without producing the response.
void heartbeat_store(MemoryMap& map, const AppRegistry& reg,
                     std::string_view victim,
                     std::span<const std::uint8_t> payload,
                     std::uint64_t claimed_len,
                     std::uint64_t protocol_max = kDefaultProtocolMax);

// Bytes a MOFlow write puts in memory: data followed by `overflow` more
// bytes continuing through data cyclically.
Bytes moflow_stream(std::span<const std::uint8_t> data, std::uint32_t overflow);

// Writes moflow_stream(data, overflow) at the attacker's base. Runs in the
// secure state inside the shared pool, so no fault fires. Throws
// PoolBoundsError if the spill leaves the pool, UnknownApp.
void moflow_overflow(MemoryMap& map, const AppRegistry& reg,
                     std::string_view attacker,
                     std::span<const std::uint8_t> data,
                     std::uint32_t overflow = kComDramOffset);

}  // namespace tzsim

#endif  // TZSIM_SECURE_SERVICES_HPP_
