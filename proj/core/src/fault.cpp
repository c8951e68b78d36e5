//
// Copyright 2026 The tzsim Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "tzsim/fault.hpp"

#include <cstdio>

namespace tzsim {

std::string_view to_string(FaultKind kind) {
  switch (kind) {
    case FaultKind::kSecureFault:
      return "SecureFault";
    case FaultKind::kDataBusError:
      return "DataBusError";
    case FaultKind::kAchillesHeelAbort:
      return "AchillesHeelAbort";
    case FaultKind::kUnmapped:
      return "UnmappedError";
  }
  return "?";
}

std::string_view to_string(FaultSource source) {
  switch (source) {
    case FaultSource::kSau:
      return "SAU";
    case FaultSource::kAhb:
      return "AHB";
    case FaultSource::kEntryCheck:
      return "EntryCheck";
    case FaultSource::kSimulator:
      return "Simulator";
  }
  return "?";
}

Fault Fault::unmapped(Address at) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "address 0x%08X is not mapped", at);
  return {FaultKind::kUnmapped, at, buf};
}

}  // namespace tzsim
