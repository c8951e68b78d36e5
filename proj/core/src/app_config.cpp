//
// Copyright 2026 The tzsim Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "tzsim/app_config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "tzsim/errors.hpp"

namespace tzsim {
namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw ConfigError("line " + std::to_string(line) + ": " + what);
}

int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

AppLayout parse_app_config(std::string_view text) {
  AppLayout layout;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream fields(raw);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (tokens.size() != 2) {
      fail(line_no, "expected `app_id payload_hex`");
    }
    std::string_view hex = tokens[1];
    if (hex.size() > 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) {
      hex.remove_prefix(2);
    }
    if (hex.empty() || hex.size() % 2 != 0) {
      fail(line_no, "payload for '" + tokens[0] + "' must be a non-empty, "
                    "even-length hex string");
    }
    AppSeed seed{.id = tokens[0], .payload = {}};
    seed.payload.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
      const int hi = nibble(hex[i]);
      const int lo = nibble(hex[i + 1]);
      if (hi < 0 || lo < 0) {
        fail(line_no, "payload for '" + tokens[0] + "' is not hex");
      }
      seed.payload.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
    }
    if (std::any_of(layout.begin(), layout.end(),
                    [&](const AppSeed& s) { return s.id == seed.id; })) {
      fail(line_no, "duplicate app '" + seed.id + "'");
    }
    layout.push_back(std::move(seed));
  }
  return layout;
}

AppLayout load_app_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open app config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_app_config(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace tzsim
