//
// Copyright 2026 The tzsim Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "tzsim/map_config.hpp"

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "tzsim/app_config.hpp"
#include "tzsim/errors.hpp"

namespace tzsim {
namespace {

std::string config_error(std::string_view text) {
  try {
    parse_map_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(MapConfigTest, ShippedFileMatchesBuiltIn) {
  std::ifstream in(TZSIM_DEFAULT_MAP_FILE);
  ASSERT_TRUE(in);
  std::ostringstream text;
  text << in.rdbuf();
  EXPECT_EQ(text.str(), default_map_config());
}

TEST(MapConfigTest, ParsesDefault) {
  MemoryMap map = parse_map_config(default_map_config());
  ASSERT_EQ(map.regions().size(), 5u);
  const Region* veneer = map.find_region("veneer");
  ASSERT_NE(veneer, nullptr);
  EXPECT_EQ(veneer->base, 0x100FE000u);
  EXPECT_EQ(veneer->sau, SecurityAttr::kNonSecureCallable);
  EXPECT_EQ(veneer->idau, SecurityAttr::kSecure);
}

TEST(MapConfigTest, FormatParsesBackToTheSameMap) {
  MemoryMap a = MemoryMap::default_map();
  MemoryMap b = parse_map_config(format_map_config(a));
  ASSERT_EQ(a.regions().size(), b.regions().size());
  for (std::size_t i = 0; i < a.regions().size(); ++i) {
    const Region& x = a.regions()[i];
    const Region& y = b.regions()[i];
    EXPECT_EQ(std::tie(x.name, x.base, x.size, x.sau, x.idau, x.ahb),
              std::tie(y.name, y.base, y.size, y.sau, y.idau, y.ahb));
  }
}

TEST(MapConfigTest, CommentsAndBlankLines) {
  MemoryMap map = parse_map_config(
      "\n# header\n  \nr 0x100 0x10 NS NS NS   # trailing\n");
  ASSERT_EQ(map.regions().size(), 1u);
  EXPECT_EQ(map.regions()[0].base, 0x100u);
}

TEST(MapConfigTest, ErrorsCarryLineNumbers) {
  EXPECT_EQ(config_error("a 0x0 0x10 NS NS NS\n\nb 0x100 0x10 XX NS NS\n"),
            "line 3: bad sau attribute 'XX' (expected S, NS or NSC)");
  EXPECT_EQ(config_error("a 0x0 0x10 NS NS\n"),
            "line 1: expected 6 fields (name base size sau idau ahb), got 5");
  EXPECT_EQ(config_error("a zz 0x10 NS NS NS\n"), "line 1: bad base 'zz'");
  EXPECT_EQ(config_error("a 0x0 0x10 NS NS NSC\n"),
            "line 1: bad ahb attribute 'NSC' (expected S or NS)");
  EXPECT_NE(config_error("a 0x0 0x10 NS NS NS\nb 0x8 0x10 S S S\n").find("line 2:"),
            std::string::npos);
  EXPECT_NE(config_error("a 0xFFFFFFF0 0x20 NS NS NS\n").find("line 1:"),
            std::string::npos);
  EXPECT_NE(config_error("a 0x0 0x10 NS NS NS\na 0x100 0x10 NS NS NS\n")
                .find("line 2: duplicate"),
            std::string::npos);
  EXPECT_EQ(config_error("# nothing\n"), "memory map has no regions");
}

TEST(AppConfigTest, ParsesLayoutInOrder) {
  AppLayout layout = parse_app_config("# apps\nA1 0a0B\nA2 0xff  # tail\n");
  ASSERT_EQ(layout.size(), 2u);
  EXPECT_EQ(layout[0], (AppSeed{"A1", {0x0A, 0x0B}}));
  EXPECT_EQ(layout[1], (AppSeed{"A2", {0xFF}}));
}

TEST(AppConfigTest, Errors) {
  EXPECT_THROW(parse_app_config("A1\n"), ConfigError);
  EXPECT_THROW(parse_app_config("A1 abc\n"), ConfigError);
  EXPECT_THROW(parse_app_config("A1 zz\n"), ConfigError);
  try {
    parse_app_config("A1 00\nA1 01\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(std::string(e.what()), "line 2: duplicate app 'A1'");
  }
}

}  // namespace
}  // namespace tzsim
