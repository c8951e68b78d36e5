//
// Copyright 2026 The tzsim Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "tzsim/memory_map.hpp"

#include <algorithm>
#include <cstdio>

#include "tzsim/errors.hpp"
#include "tzsim/map_config.hpp"

namespace tzsim {
namespace {

constexpr std::uint64_t kAddressSpaceEnd = std::uint64_t{1} << 32;

std::string hex(Address addr) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "0x%08X", addr);
  return buf;
}

}  // namespace

std::string_view to_string(SecurityAttr attr) {
  switch (attr) {
    case SecurityAttr::kNonSecure:
      return "NonSecure";
    case SecurityAttr::kNonSecureCallable:
      return "NonSecureCallable";
    case SecurityAttr::kSecure:
      return "Secure";
  }
  return "?";
}

std::string_view to_string(BusAttr attr) {
  return attr == BusAttr::kSecure ? "Secure" : "NonSecure";
}

std::string_view to_string(World world) {
  return world == World::kSecure ? "Secure" : "NonSecure";
}

std::string_view to_string(AccessKind kind) {
  switch (kind) {
    case AccessKind::kRead:
      return "read";
    case AccessKind::kWrite:
      return "write";
    case AccessKind::kExecute:
      return "execute";
  }
  return "?";
}

void MemoryMap::add_region(Region region) {
  if (region.size == 0) {
    throw BoundsError("region '" + region.name + "' has zero size");
  }
  if (region.end() > kAddressSpaceEnd) {
    throw BoundsError("region '" + region.name + "' at " + hex(region.base) +
                      " runs past the 32-bit address space");
  }
  for (const Region& other : regions_) {
    if (region.base < other.end() && other.base < region.end()) {
      throw OverlapError("region '" + region.name + "' overlaps '" +
                         other.name + "'");
    }
  }
  auto pos = std::upper_bound(
      regions_.begin(), regions_.end(), region.base,
      [](Address base, const Region& r) { return base < r.base; });
  auto index = pos - regions_.begin();
  backing_.insert(backing_.begin() + index, Bytes(region.size, 0));
  regions_.insert(pos, std::move(region));
}

const Region* MemoryMap::find_region(Address addr) const {
  auto pos = std::upper_bound(
      regions_.begin(), regions_.end(), addr,
      [](Address a, const Region& r) { return a < r.base; });
  if (pos == regions_.begin()) return nullptr;
  --pos;
  return pos->contains(addr) ? &*pos : nullptr;
}

const Region* MemoryMap::find_region(std::string_view name) const {
  for (const Region& r : regions_) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

EffectiveAttr MemoryMap::attribute_lookup(Address addr) const {
  const Region* region = find_region(addr);
  if (region == nullptr) {
    throw UnmappedError("address " + hex(addr) + " is not mapped");
  }
  return {combine_attributes(region->sau, region->idau), region->ahb};
}

Status MemoryMap::check_access(World requester, Address addr,
                               AccessKind kind) const {
  const Region* region = find_region(addr);
  if (region == nullptr) return Fault::unmapped(addr);
  if (requester == World::kSecure) return ok_status();

  const SecurityAttr world = combine_attributes(region->sau, region->idau);
  switch (world) {
    case SecurityAttr::kSecure:
      return Fault::secure_fault(
          addr, "non-secure " + std::string(to_string(kind)) +
                    " of secure address " + hex(addr) + " in '" +
                    region->name + "'");
    case SecurityAttr::kNonSecureCallable:
      if (kind == AccessKind::kExecute) return ok_status();
      return Fault::secure_fault(
          addr, "non-secure data " + std::string(to_string(kind)) +
                    " of callable address " + hex(addr));
    case SecurityAttr::kNonSecure:
      break;
  }
  if (region->ahb == BusAttr::kSecure) {
    return Fault::data_bus_error(
        addr, "non-secure " + std::string(to_string(kind)) + " of " +
                  hex(addr) + " refused by AHB secure controller");
  }
  return ok_status();
}

MemoryMap::Slot MemoryMap::locate(Address addr) const {
  const Region* region = find_region(addr);
  if (region == nullptr) {
    throw UnmappedError("address " + hex(addr) + " is not mapped");
  }
  return {static_cast<std::size_t>(region - regions_.data()),
          static_cast<std::size_t>(addr - region->base)};
}

std::uint8_t MemoryMap::peek(Address addr) const {
  Slot slot = locate(addr);
  return backing_[slot.region][slot.offset];
}

void MemoryMap::poke(Address addr, std::uint8_t value) {
  Slot slot = locate(addr);
  backing_[slot.region][slot.offset] = value;
}

Bytes MemoryMap::dump(Address addr, std::size_t len) const {
  Bytes out;
  out.reserve(len);
  std::uint64_t cursor = addr;
  const std::uint64_t stop = cursor + len;
  if (stop > kAddressSpaceEnd) {
    throw UnmappedError("dump runs past the 32-bit address space");
  }
  while (cursor < stop) {
    Slot slot = locate(static_cast<Address>(cursor));
    const Bytes& store = backing_[slot.region];
    const std::size_t chunk = static_cast<std::size_t>(std::min<std::uint64_t>(
        store.size() - slot.offset, stop - cursor));
    out.insert(out.end(), store.begin() + slot.offset,
               store.begin() + slot.offset + chunk);
    cursor += chunk;
  }
  return out;
}

void MemoryMap::load(Address addr, std::span<const std::uint8_t> bytes) {
  std::uint64_t cursor = addr;
  const std::uint64_t stop = cursor + bytes.size();
  if (stop > kAddressSpaceEnd) {
    throw UnmappedError("load runs past the 32-bit address space");
  }
  // Validate before mutating so a failed load leaves the map untouched.
  for (std::uint64_t probe = cursor; probe < stop;) {
    Slot slot = locate(static_cast<Address>(probe));
    probe += backing_[slot.region].size() - slot.offset;
  }
  std::size_t consumed = 0;
  while (cursor < stop) {
    Slot slot = locate(static_cast<Address>(cursor));
    Bytes& store = backing_[slot.region];
    const std::size_t chunk = static_cast<std::size_t>(std::min<std::uint64_t>(
        store.size() - slot.offset, stop - cursor));
    std::copy_n(bytes.begin() + consumed, chunk, store.begin() + slot.offset);
    consumed += chunk;
    cursor += chunk;
  }
}

MemoryMap MemoryMap::default_map() {
  return parse_map_config(default_map_config());
}

}  // namespace tzsim
