//
// Copyright 2026 The tzsim Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef TZSIM_MEMORY_MAP_HPP_
#define TZSIM_MEMORY_MAP_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tzsim/fault.hpp"

namespace tzsim {

using Bytes = std::vector<std::uint8_t>;

// Ordered by restrictiveness: NonSecure < NonSecureCallable < Secure.
enum class SecurityAttr : std::uint8_t {
  kNonSecure = 0,
  kNonSecureCallable = 1,
  kSecure = 2,
};

enum class BusAttr : std::uint8_t { kNonSecure, kSecure };

// Security state of a requester. Callable is an attribute of memory, never
// of the core.
enum class World : std::uint8_t { kNonSecure, kSecure };

enum class AccessKind : std::uint8_t { kRead, kWrite, kExecute };

std::string_view to_string(SecurityAttr attr);
std::string_view to_string(BusAttr attr);
std::string_view to_string(World world);
std::string_view to_string(AccessKind kind);

struct Region {
  std::string name;
  Address base = 0;
  std::uint32_t size = 0;
  SecurityAttr sau = SecurityAttr::kSecure;
  SecurityAttr idau = SecurityAttr::kSecure;
  BusAttr ahb = BusAttr::kSecure;

  // One past the last byte; may equal 2^32.
  std::uint64_t end() const { return std::uint64_t{base} + size; }
  bool contains(Address addr) const { return addr >= base && addr < end(); }
};

struct EffectiveAttr {
  SecurityAttr world = SecurityAttr::kSecure;
  BusAttr bus = BusAttr::kSecure;

  bool operator==(const EffectiveAttr&) const = default;
};

// Most restrictive of the two, except that an SAU callable carve-out inside
// IDAU-secure space is callable.
constexpr SecurityAttr combine_attributes(SecurityAttr sau, SecurityAttr idau) {
  if (sau == SecurityAttr::kNonSecureCallable && idau == SecurityAttr::kSecure) {
    return SecurityAttr::kNonSecureCallable;
  }
  return sau > idau ? sau : idau;
}

// Flat 32-bit physical address space made of non-overlapping attributed
// regions, each with its own zero-initialized backing store.
//
// Single-owner mutable. Const member functions never mutate and are safe to
// call concurrently on a map nobody is writing to.
class MemoryMap {
 public:
  MemoryMap() = default;

  // Throws BoundsError on size 0 or overflow past 2^32, OverlapError on
  // intersection with an existing region.
  void add_region(Region region);

  std::span<const Region> regions() const { return regions_; }
  const Region* find_region(Address addr) const;
  const Region* find_region(std::string_view name) const;
  bool is_mapped(Address addr) const { return find_region(addr) != nullptr; }

  // Throws UnmappedError.
  EffectiveAttr attribute_lookup(Address addr) const;

  // Attribution check for a single byte access. Secure requesters are never
  // refused; unmapped addresses yield an Unmapped fault.
  Status check_access(World requester, Address addr, AccessKind kind) const;

  // Raw backing-store access, no attribution. Throws UnmappedError if any
  // byte of the range is unmapped.
  std::uint8_t peek(Address addr) const;
  void poke(Address addr, std::uint8_t value);
  Bytes dump(Address addr, std::size_t len) const;
  void load(Address addr, std::span<const std::uint8_t> bytes);

  // The built-in map: NS flash, secure flash, veneer table, AHB-secured
  // NS-attributed RAM, and secure RAM hosting the app pool.
  static MemoryMap default_map();

 private:
  struct Slot {
    std::size_t region;
    std::size_t offset;
  };
  Slot locate(Address addr) const;

  std::vector<Region> regions_;
  std::vector<Bytes> backing_;
};

}  // namespace tzsim

#endif  // TZSIM_MEMORY_MAP_HPP_
