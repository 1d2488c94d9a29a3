#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "linksim/csv.hpp"
#include "linksim/toml.hpp"

using namespace linksim;

TEST_CASE("toml: tables, scalars, arrays, comments") {
  const std::string text =
      "# experiment\n"
      "title = \"demo\"\n"
      "[modem]\n"
      "order = 16       # inline comment\n"
      "[sweep]\n"
      "ebn0_db = [1.0, 2.5, 10]\n"
      "noiseless = false\n"
      "ratio = 0.5\n"
      "limit = inf\n"
      "names = [\"a\", \"b\"]\n";
  const auto doc = toml::Document::parse(text);
  CHECK(doc.get_string("title") == "demo");
  CHECK(doc.get_int("modem.order") == 16);
  const auto arr = doc.get_double_array("sweep.ebn0_db");
  REQUIRE(arr.size() == 3);
  CHECK(arr[2] == doctest::Approx(10.0));
  CHECK(doc.get_bool("sweep.noiseless", true) == false);
  CHECK(doc.get_double("sweep.ratio") == doctest::Approx(0.5));
  CHECK(std::isinf(doc.get_double("sweep.limit")));
  CHECK(doc.get_string_array("sweep.names") == std::vector<std::string>{"a", "b"});
}

TEST_CASE("toml: defaults and missing fields") {
  const auto doc = toml::Document::parse("[a]\nx = 1\n");
  CHECK(doc.get_int("a.x", 7) == 1);
  CHECK(doc.get_int("a.y", 7) == 7);
  CHECK_THROWS_AS(doc.get_int("a.y"), ConfigError);
  CHECK_THROWS_AS(doc.get_string("a.x"), ConfigError);
}

TEST_CASE("toml: parse errors carry line numbers") {
  CHECK_THROWS_AS(toml::Document::parse("x 1\n"), ConfigError);
  CHECK_THROWS_AS(toml::Document::parse("[t]\nx = \n"), ConfigError);
  CHECK_THROWS_AS(toml::Document::parse("x = 1\nx = 2\n"), ConfigError);
  CHECK_THROWS_AS(toml::Document::parse("[[t]]\n"), ConfigError);
}

TEST_CASE("csv: shortest round-trip float formatting") {
  CHECK(csv::format_double(0.1) == "0.1");
  CHECK(csv::format_double(1.0) == "1");
  CHECK(csv::format_double(1e-7) == "1e-07");
  const double v = 0.1234567890123456789;
  CHECK(std::strtod(csv::format_double(v).c_str(), nullptr) == v);
}

TEST_CASE("csv: table layout") {
  csv::Table t({"a", "b"});
  t.begin_row().col(1).col(2.5);
  const std::string s = t.str();
  CHECK(s == "a,b\n1,2.5\n");
}
