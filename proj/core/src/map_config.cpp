//
// Copyright 2026 The tzsim Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "tzsim/map_config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "tzsim/errors.hpp"

namespace tzsim {
namespace {

constexpr std::string_view kDefaultMap =
    "# Default LPC55S69-style memory map.\n"
    "# name     base       size       sau idau ahb\n"
    "ns_flash   0x00010000 0x00010000 NS  NS  NS\n"
    "s_flash    0x10000000 0x000FE000 S   S   S\n"
    "veneer     0x100FE000 0x00002000 NSC S   S\n"
    "ns_ram     0x20130000 0x00010000 NS  NS  S\n"
    "s_ram      0x30000000 0x00040000 S   S   S\n";

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw ConfigError("line " + std::to_string(line) + ": " + what);
}

std::uint32_t parse_hex(std::string_view token, std::size_t line,
                        const char* field) {
  if (token.size() > 2 && token[0] == '0' && (token[1] == 'x' || token[1] == 'X')) {
    token.remove_prefix(2);
  }
  std::uint32_t value = 0;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value, 16);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    fail(line, std::string("bad ") + field + " '" + std::string(token) + "'");
  }
  return value;
}

SecurityAttr parse_security(std::string_view token, std::size_t line,
                            const char* field) {
  if (token == "S") return SecurityAttr::kSecure;
  if (token == "NS") return SecurityAttr::kNonSecure;
  if (token == "NSC") return SecurityAttr::kNonSecureCallable;
  fail(line, std::string("bad ") + field + " attribute '" + std::string(token) +
                 "' (expected S, NS or NSC)");
}

BusAttr parse_bus(std::string_view token, std::size_t line) {
  if (token == "S") return BusAttr::kSecure;
  if (token == "NS") return BusAttr::kNonSecure;
  fail(line, "bad ahb attribute '" + std::string(token) + "' (expected S or NS)");
}

std::string_view short_name(SecurityAttr attr) {
  switch (attr) {
    case SecurityAttr::kSecure:
      return "S";
    case SecurityAttr::kNonSecure:
      return "NS";
    case SecurityAttr::kNonSecureCallable:
      return "NSC";
  }
  return "?";
}

}  // namespace

MemoryMap parse_map_config(std::string_view text) {
  MemoryMap map;
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
    if (tokens.size() != 6) {
      fail(line_no, "expected 6 fields (name base size sau idau ahb), got " +
                        std::to_string(tokens.size()));
    }
    Region region{
        .name = tokens[0],
        .base = parse_hex(tokens[1], line_no, "base"),
        .size = parse_hex(tokens[2], line_no, "size"),
        .sau = parse_security(tokens[3], line_no, "sau"),
        .idau = parse_security(tokens[4], line_no, "idau"),
        .ahb = parse_bus(tokens[5], line_no),
    };
    if (map.find_region(std::string_view(region.name)) != nullptr) {
      fail(line_no, "duplicate region name '" + region.name + "'");
    }
    try {
      map.add_region(std::move(region));
    } catch (const Error& e) {
      fail(line_no, e.what());
    }
  }
  if (map.regions().empty()) throw ConfigError("memory map has no regions");
  return map;
}

MemoryMap load_map_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open map config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_map_config(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string format_map_config(const MemoryMap& map) {
  std::string out;
  char buf[128];
  for (const Region& r : map.regions()) {
    std::snprintf(buf, sizeof(buf), "%-10s 0x%08X 0x%08X %-3s %-3s %s\n",
                  r.name.c_str(), r.base, r.size,
                  std::string(short_name(r.sau)).c_str(),
                  std::string(short_name(r.idau)).c_str(),
                  r.ahb == BusAttr::kSecure ? "S" : "NS");
    out += buf;
  }
  return out;
}

std::string_view default_map_config() { return kDefaultMap; }

}  // namespace tzsim
