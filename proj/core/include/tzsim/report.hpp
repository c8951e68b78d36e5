//
// Copyright 2026 The tzsim Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef TZSIM_REPORT_HPP_
#define TZSIM_REPORT_HPP_

#include <cstdint>
#include <span>
#include <string>

#include "tzsim/harness.hpp"

namespace tzsim {

// 64-bit FNV-1a, used to fingerprint leaked bytes in reports.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

// Structured report. Per scenario: scenario_id, outcome, fault_kind,
// fault_source, leaked_bytes, delta_m (plus a few descriptive fields);
// campaign totals under "campaign": S_N, F_m, total_delta, robust. Output
// is a pure function of its inputs.
std::string report_to_json(const CampaignReport& report, const SimState& state);

// One line per scenario plus a totals line; same values as the JSON.
std::string report_to_text(const CampaignReport& report, const SimState& state);

}  // namespace tzsim

#endif  // TZSIM_REPORT_HPP_
