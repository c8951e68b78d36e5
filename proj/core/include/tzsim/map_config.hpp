//
// Copyright 2026 The tzsim Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef TZSIM_MAP_CONFIG_HPP_
#define TZSIM_MAP_CONFIG_HPP_

#include <filesystem>
#include <string>
#include <string_view>

#include "tzsim/memory_map.hpp"

namespace tzsim {

// Line format: `name base_hex size_hex sau idau ahb`, with sau/idau in
// {S, NS, NSC} and ahb in {S, NS}. `#` starts a comment. Errors are
// ConfigError with a "line N:" prefix; overlap and bounds violations are
// reported the same way.
MemoryMap parse_map_config(std::string_view text);
MemoryMap load_map_config(const std::filesystem::path& path);

std::string format_map_config(const MemoryMap& map);

// Text of the built-in default map.
std::string_view default_map_config();

}  // namespace tzsim

#endif  // TZSIM_MAP_CONFIG_HPP_
