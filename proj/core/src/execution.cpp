//
// Copyright 2026 The tzsim Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "tzsim/execution.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

#include "tzsim/errors.hpp"

namespace tzsim {
namespace {

std::string hex(Address addr) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "0x%08X", addr);
  return buf;
}

Status check_word(World world, const MemoryMap& map, Address addr,
                  AccessKind kind) {
  for (std::uint32_t i = 0; i < 4; ++i) {
    const std::uint64_t byte = std::uint64_t{addr} + i;
    if (byte > 0xFFFFFFFFu) return Fault::unmapped(addr);
    Status s = map.check_access(world, static_cast<Address>(byte), kind);
    if (!s) return s;
  }
  return ok_status();
}

}  // namespace

bool ExecutionContext::scrubbed() const {
  return std::all_of(regs.begin(), regs.end(), [](Word w) { return w == 0; });
}

Result<ExecutionContext> bxns_transition(const ExecutionContext& ctx,
                                         const MemoryMap& map, Address target) {
  if (ctx.world() != World::kSecure) {
    throw StateError("BXNS issued from the non-secure state");
  }
  const Region* region = map.find_region(target);
  if (region == nullptr) return Fault::unmapped(target);

  if (!ctx.scrubbed()) {
    return Fault::secure_fault(
        target, "BXNS with live register contents: registers not cleared");
  }
  if ((target & 1u) != 0) {
    return Fault::secure_fault(
        target, "BXNS target " + hex(target) + " has its LSB set");
  }
  if (combine_attributes(region->sau, region->idau) != SecurityAttr::kNonSecure) {
    return Fault::secure_fault(
        target, "BXNS target " + hex(target) + " is not non-secure");
  }
  ExecutionContext next = ctx;
  next.world_ = World::kNonSecure;
  next.pc = target;
  next.gateway_.reset();
  return next;
}

Result<ExecutionContext> gateway_enter(const ExecutionContext& ctx,
                                       const MemoryMap& map, Address entry,
                                       std::uint32_t byte_offset) {
  if (ctx.world() != World::kNonSecure) {
    throw StateError("gateway entry attempted from the secure state");
  }
  const std::uint64_t landing64 = std::uint64_t{entry} + byte_offset;
  if (landing64 > 0xFFFFFFFFu) return Fault::unmapped(entry);
  const auto landing = static_cast<Address>(landing64);
  if (!map.is_mapped(entry)) return Fault::unmapped(entry);

  Status exec = map.check_access(World::kNonSecure, landing, AccessKind::kExecute);
  if (!exec) return exec.fault();

  if (map.attribute_lookup(landing).world != SecurityAttr::kNonSecureCallable) {
    return Fault::secure_fault(
        landing, "branch target " + hex(landing) +
                     " is not in a non-secure callable region");
  }
  if (byte_offset != 0) {
    return Fault::secure_fault(
        landing, "entry at " + hex(landing) + " skips the SG instruction at " +
                     hex(entry));
  }
  ExecutionContext next = ctx;
  next.world_ = World::kSecure;
  next.gateway_ = entry;
  next.return_address_ = ctx.lr;
  next.lr = kFunctionReturnMarker;
  next.pc = landing;
  return next;
}

ExecutionContext secure_return(const ExecutionContext& ctx, Word retval) {
  if (ctx.world() != World::kSecure || !ctx.gateway_) {
    throw StateError("secure return without a matching gateway entry");
  }
  ExecutionContext next = ctx;
  next.regs.fill(0);
  next.regs[0] = retval;
  next.world_ = World::kNonSecure;
  next.pc = ctx.return_address_ & ~Word{1};
  next.lr = ctx.return_address_;
  next.gateway_.reset();
  next.return_address_ = 0;
  return next;
}

TtResponse tt_query(const ExecutionContext& ctx, const MemoryMap& map,
                    Address addr) {
  EffectiveAttr attr = map.attribute_lookup(addr);
  TtResponse out{.world = attr.world, .bus = std::nullopt};
  if (ctx.world() == World::kSecure) out.bus = attr.bus;
  return out;
}

Result<Word> read_word(const ExecutionContext& ctx, const MemoryMap& map,
                       Address addr) {
  Status s = check_word(ctx.world(), map, addr, AccessKind::kRead);
  if (!s) return s.fault();
  Bytes raw = map.dump(addr, 4);
  return Word{raw[0]} | (Word{raw[1]} << 8) | (Word{raw[2]} << 16) |
         (Word{raw[3]} << 24);
}

Status write_word(const ExecutionContext& ctx, MemoryMap& map, Address addr,
                  Word value) {
  Status s = check_word(ctx.world(), map, addr, AccessKind::kWrite);
  if (!s) return s;
  const std::uint8_t raw[4] = {
      static_cast<std::uint8_t>(value), static_cast<std::uint8_t>(value >> 8),
      static_cast<std::uint8_t>(value >> 16),
      static_cast<std::uint8_t>(value >> 24)};
  map.load(addr, raw);
  return ok_status();
}

}  // namespace tzsim
