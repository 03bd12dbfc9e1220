#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "eikonal/config.hpp"

using namespace eikonal;

TEST(ConfigDoc, SectionsAndComments) {
  const ConfigDoc d = ConfigDoc::parse_string(
      "top = 1\n"
      "# comment\n"
      "[run]\n"
      "m = 101, 201 ; trailing\n"
      "  lambda=0.5\n"
      "[instance]\n"
      "name = sin2d\n");
  EXPECT_EQ(d.get("top"), "1");
  EXPECT_EQ(d.get_list_or("run.m", {}), (std::vector<std::string>{"101", "201"}));
  EXPECT_DOUBLE_EQ(d.get_double("run.lambda"), 0.5);
  EXPECT_EQ(d.get("instance.name"), "sin2d");
  EXPECT_EQ(d.keys(), (std::vector<std::string>{"instance.name", "run.lambda", "run.m", "top"}));
}

TEST(ConfigDoc, MalformedLinesName) {
  EXPECT_THROW(ConfigDoc::parse_string("[run\n"), ConfigError);
  EXPECT_THROW(ConfigDoc::parse_string("novalue\n"), ConfigError);
  EXPECT_THROW(ConfigDoc::parse_string("=3\n"), ConfigError);
  EXPECT_THROW(ConfigDoc::load("/nonexistent/file.cfg"), ConfigError);
}

TEST(ConfigDoc, MissingKeyReportsIt) {
  const ConfigDoc d;
  try {
    d.get("run.m");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "run.m");
  }
  EXPECT_EQ(d.get_or("x", "y"), "y");
  EXPECT_EQ(d.get_int_or("x", 3), 3);
  EXPECT_TRUE(d.get_bool_or("x", true));
}

TEST(ConfigDoc, OverridesReplaceValues) {
  ConfigDoc d = ConfigDoc::parse_string("[run]\nm = 5\n");
  d.apply_override("run.m=7");
  d.apply_override("run.new = x");
  EXPECT_EQ(d.get_int("run.m"), 7);
  EXPECT_EQ(d.get("run.new"), "x");
  EXPECT_THROW(d.apply_override("nothing"), ConfigError);
  d.erase("run.new");
  EXPECT_FALSE(d.has("run.new"));
}

TEST(ConfigDoc, SerializeIsCanonical) {
  const ConfigDoc a = ConfigDoc::parse_string("[run]\nm=1\nlambda = 2\n[instance]\nname=x\n");
  const ConfigDoc b = ConfigDoc::parse_string("[instance]\nname = x\n[run]\nlambda=2\nm = 1\n");
  EXPECT_EQ(a.serialize(), b.serialize());
  EXPECT_EQ(ConfigDoc::parse_string(a.serialize()).serialize(), a.serialize());
}

TEST(ConfigValues, Parsers) {
  EXPECT_EQ(parse_double("k", "inf"), std::numeric_limits<double>::infinity());
  EXPECT_EQ(parse_double("k", "1e-3"), 1e-3);
  EXPECT_THROW(parse_double("k", "1.0x"), ConfigError);
  EXPECT_EQ(parse_int("k", "-12"), -12);
  EXPECT_THROW(parse_int("k", "1.5"), ConfigError);
  EXPECT_TRUE(parse_bool("k", "yes"));
  EXPECT_FALSE(parse_bool("k", "false"));
  EXPECT_THROW(parse_bool("k", "maybe"), ConfigError);
  EXPECT_EQ(split_list(" a, b ,c "), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(ConfigValues, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5}) EXPECT_EQ(parse_double("k", format_double(v)), v);
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(ConfigValues, Fnv1aReferenceVectors) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}
