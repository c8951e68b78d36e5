//
// Copyright 2026 The tzsim Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef TZSIM_EXECUTION_HPP_
#define TZSIM_EXECUTION_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>

#include "tzsim/fault.hpp"
#include "tzsim/memory_map.hpp"

namespace tzsim {

enum class Mode : std::uint8_t { kThread, kHandler };

inline constexpr std::size_t kGeneralRegisterCount = 13;  // r0..r12

// Value placed in lr on secure entry, standing in for FNC_RETURN.
inline constexpr Word kFunctionReturnMarker = 0xFEFFFFFF;

class ExecutionContext;

Result<ExecutionContext> bxns_transition(const ExecutionContext& ctx,
                                         const MemoryMap& map, Address target);
Result<ExecutionContext> gateway_enter(const ExecutionContext& ctx,
                                       const MemoryMap& map, Address entry,
                                       std::uint32_t byte_offset);
ExecutionContext secure_return(const ExecutionContext& ctx, Word retval);

// Core state of one simulated Cortex-M33. Out of reset the core is Secure,
// Thread mode, privileged, with every register zero.
//
// The security state is private: only the three transition functions above
// can change it. Mode is carried state; no exception entry is simulated.
class ExecutionContext {
 public:
  using Registers = std::array<Word, kGeneralRegisterCount>;

  explicit ExecutionContext(World world = World::kSecure) : world_(world) {}

  World world() const { return world_; }

  Mode mode = Mode::kThread;
  bool privileged = true;
  Registers regs{};
  Word lr = 0;
  Word pc = 0;
  Address msp_s = 0;
  Address msp_ns = 0;

  // True iff r0..r12 are all zero.
  bool scrubbed() const;

  // Veneer address of the gateway this secure call came through, if any.
  std::optional<Address> gateway() const { return gateway_; }

  bool operator==(const ExecutionContext&) const = default;

 private:
  friend Result<ExecutionContext> bxns_transition(const ExecutionContext&,
                                                  const MemoryMap&, Address);
  friend Result<ExecutionContext> gateway_enter(const ExecutionContext&,
                                                const MemoryMap&, Address,
                                                std::uint32_t);
  friend ExecutionContext secure_return(const ExecutionContext&, Word);

  World world_;
  std::optional<Address> gateway_;
  Word return_address_ = 0;
};

// What a TT instruction reports. Non-secure callers do not get to see the
// bus attribute.
struct TtResponse {
  SecurityAttr world = SecurityAttr::kSecure;
  std::optional<BusAttr> bus;

  bool operator==(const TtResponse&) const = default;
};

// Throws UnmappedError.
TtResponse tt_query(const ExecutionContext& ctx, const MemoryMap& map,
                    Address addr);

// Little-endian 32-bit accesses, checked byte by byte against the
// requester's security state. The first faulting byte wins.
Result<Word> read_word(const ExecutionContext& ctx, const MemoryMap& map,
                       Address addr);
Status write_word(const ExecutionContext& ctx, MemoryMap& map, Address addr,
                  Word value);

}  // namespace tzsim

#endif  // TZSIM_EXECUTION_HPP_
