#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pwc/io.hpp"

using namespace pwc;

namespace {

std::string error_of(const std::string& text) {
  try {
    spec_from_json(nlohmann::json::parse(text));
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("doubles round-trip at 17 digits") {
  for (double x : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, std::numbers::pi})
    CHECK(parse_double(format_double(x)) == x);
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(std::isnan(parse_double(format_double(std::nan("")))));
  CHECK(parse_double("-inf") == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(parse_double("1.5x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_double(""), std::invalid_argument);
}

TEST_CASE("leaf sets") {
  CHECK(format_leaf_set(LeafSet(3, {2, 5})) == "[2,5]");
  CHECK(parse_leaf_set(3, "[5,2]") == LeafSet(3, {2, 5}));
  CHECK(parse_leaf_set(3, "[]").empty());
  CHECK_THROWS_AS(parse_leaf_set(3, "2,5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_leaf_set(3, "[8]"), std::invalid_argument);
}

TEST_CASE("tables round-trip, including quoted fields") {
  Table t;
  t.columns = {"set", "size", "cap"};
  t.rows = {{"[0,1]", "2", "0.40000000000000002"}, {"[]", "0", "0"}, {"say \"hi\"", "1", "1"}};
  std::stringstream ss;
  write_table(ss, t);
  CHECK(ss.str().substr(0, 13) == "set,size,cap\n");
  const Table back = read_table(ss);
  CHECK(back.columns == t.columns);
  CHECK(back.rows == t.rows);
  CHECK(back.number(0, "cap") == 0.4);
  CHECK_THROWS_AS(back.column("missing"), std::out_of_range);

  std::stringstream ragged("a,b\n1,2\n3\n");
  CHECK_THROWS_AS(read_table(ragged), std::invalid_argument);
}

TEST_CASE("grids") {
  const auto g = parse_grid("-3:3:0.5");
  REQUIRE(g.size() == 13);
  CHECK(g.front() == -3.0);
  CHECK(g.back() == 3.0);
  CHECK(parse_grid("0.5,0.25,0.125") == std::vector<double>{0.5, 0.25, 0.125});
  CHECK_THROWS_AS(parse_grid("1:0:0.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("0:1:0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("0:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("1,inf"), std::invalid_argument);
  CHECK(parse_int_list("8,12,16") == std::vector<int>{8, 12, 16});
  CHECK_THROWS(parse_int_list("8,x"));
}

TEST_CASE("presets") {
  CHECK(std::holds_alternative<ZeroSpec>(preset("zero")));
  const auto lin = std::get<FirstOrderSpec>(preset("first:linear3ln2"));
  CHECK(lin.h(5) == doctest::Approx(15 * std::numbers::ln2));
  CHECK(std::get<FirstOrderSpec>(preset("first:linear:ln2")).h(3) == doctest::Approx(3 * std::numbers::ln2));
  CHECK(std::get<FirstOrderSpec>(preset("first:linear:0.5ln2")).h(2) == doctest::Approx(std::numbers::ln2));
  CHECK(std::get<FirstOrderSpec>(preset("first:linear:2.5")).h(2) == 5.0);
  CHECK(std::holds_alternative<FirstOrderSpec>(preset("first:logcorrected")));
  CHECK(std::holds_alternative<SecondOrderSpec>(preset("dgff")));
  CHECK(std::get<CapacitySpec>(preset("capacity:uniform")).conductance(7) == 1.0);
  CHECK_THROWS_AS(preset("first:quadratic"), std::invalid_argument);
  CHECK_THROWS_AS(preset("first:linear:abc"), std::invalid_argument);
}

TEST_CASE("spec documents") {
  const auto f = spec_from_json(nlohmann::json::parse(R"({"variant":"first_order","h":[0,1,2],"h_const":0.5})"));
  CHECK(std::get<FirstOrderSpec>(f).h(2) == 2.0);
  CHECK(std::get<FirstOrderSpec>(f).h_const == 0.5);
  const auto s = spec_from_json(nlohmann::json::parse(R"({"variant":"second_order","h":[[0],[1,2]]})"));
  CHECK(std::get<SecondOrderSpec>(s).h(2, 1) == 2.0);
  const auto c = spec_from_json(nlohmann::json::parse(R"({"variant":"capacity","preset":"uniform","c":2})"));
  CHECK(std::get<CapacitySpec>(c).conductance(3) == 2.0);
  CHECK(std::holds_alternative<FirstOrderSpec>(
      spec_from_json(nlohmann::json::parse(R"({"variant":"first_order","preset":"linear","c":1.5})"))));
  CHECK(std::holds_alternative<ZeroSpec>(spec_from_json(nlohmann::json::parse(R"({"variant":"zero"})"))));
}

TEST_CASE("spec errors cite the offending key") {
  CHECK(error_of(R"({"h":[1]})").find("'variant'") != std::string::npos);
  CHECK(error_of(R"({"variant":"fourth_order"})").find("'variant'") != std::string::npos);
  CHECK(error_of(R"({"variant":"first_order","h":[0,"x"]})").find("'h'") != std::string::npos);
  CHECK(error_of(R"({"variant":"first_order","h":[0],"bogus":1})").find("'bogus'") != std::string::npos);
  CHECK(error_of(R"({"variant":"first_order","h":[0],"h_const":"big"})").find("'h_const'") != std::string::npos);
  CHECK(error_of(R"({"variant":"second_order","h":[[0],[1]]})").find("'h'") != std::string::npos);
  CHECK(error_of(R"({"variant":"capacity","conductances":[1,-1]})").find("'conductances'") != std::string::npos);
  CHECK(error_of(R"({"variant":"first_order","preset":"linear"})").find("'c'") != std::string::npos);
  CHECK_THROWS_AS(load_spec_file("/nonexistent/spec.json"), std::invalid_argument);
}
