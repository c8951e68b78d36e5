//
// Copyright 2026 The tzsim Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef TZSIM_APP_CONFIG_HPP_
#define TZSIM_APP_CONFIG_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tzsim/memory_map.hpp"

namespace tzsim {

struct AppSeed {
  std::string id;
  Bytes payload;

  bool operator==(const AppSeed&) const = default;
};

// Pool contents in allocation order.
using AppLayout = std::vector<AppSeed>;

// Lines of `app_id payload_hex`; `#` starts a comment. ConfigError carries
// the line number.
AppLayout parse_app_config(std::string_view text);
AppLayout load_app_config(const std::filesystem::path& path);

}  // namespace tzsim

#endif  // TZSIM_APP_CONFIG_HPP_
