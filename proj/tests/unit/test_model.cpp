#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lcpsim/error.hpp"
#include "lcpsim/model.hpp"
#include "lcpsim/rational.hpp"
#include "support.hpp"

using namespace lcpsim;
using lcpsim::testing::make_model;

TEST_CASE("parse_rational accepts integers, fractions and finite decimals exactly") {
  CHECK(parse_rational("7") == 7);
  CHECK(parse_rational("-3/10") == Rational(-3, 10));
  CHECK(parse_rational("+2/4") == Rational(1, 2));
  CHECK(parse_rational("1.5") == Rational(3, 2));
  CHECK(parse_rational("0.3") == Rational(3, 10));
  CHECK(parse_rational(".25") == Rational(1, 4));
  CHECK(to_string(parse_rational("6/4")) == "3/2");
  CHECK(to_string(parse_rational("10/5")) == "2");
}

TEST_CASE("parse_rational rejects malformed text") {
  for (const char* bad : {"", "1/0", "abc", "1e3", "3/", "/4", "1.2.3", "--1", "0x10"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_rational(bad), std::invalid_argument);
  }
}

TEST_CASE("ratio is canonical") {
  CHECK(to_string(ratio(27, 480)) == "9/160");
  CHECK(ratio(-4, 8) == Rational(-1, 2));
}

TEST_CASE("exact linear algebra") {
  RationalMatrix m(2, 2);
  m(0, 0) = 1;
  m(0, 1) = Rational(-1, 2);
  m(1, 0) = Rational(-1, 2);
  m(1, 1) = 1;
  const auto x = solve_exact(m, {Rational(1), Rational(1)});
  CHECK(x[0] == 2);
  CHECK(x[1] == 2);
  CHECK(determinant(m) == Rational(3, 4));
  CHECK(leading_minors_positive(m));

  RationalMatrix singular(2, 2);
  singular(0, 0) = 1;
  singular(0, 1) = -1;
  singular(1, 0) = -1;
  singular(1, 1) = 1;
  CHECK(determinant(singular) == 0);
  CHECK_FALSE(leading_minors_positive(singular));
  CHECK_THROWS_AS(solve_exact(singular, {Rational(1), Rational(1)}), PreconditionError);
}

TEST_CASE("validate_model reports each documented violation") {
  CHECK(validate_model(make_model("1", {{"0", "1"}, {"1", "0"}})).ok());

  const auto diag = validate_model(make_model("1", {{"1", "0"}, {"0", "0"}}));
  REQUIRE(diag.violations.size() == 1);
  CHECK(diag.violations[0] == "nonzero diagonal at (1,1)");

  const auto alpha = validate_model(make_model("0", {{"0", "1"}, {"1", "0"}}, Mode::LcpCtmc));
  REQUIRE(alpha.violations.size() == 1);
  CHECK(alpha.violations[0] == "alpha must be positive");

  CHECK(validate_model(make_model("0", {{"0", "1"}, {"1", "0"}}, Mode::UrnRemovals)).ok());

  const auto neg = validate_model(make_model("1", {{"0", "-1"}, {"1", "0"}}));
  REQUIRE_FALSE(neg.ok());
  CHECK(neg.violations[0] == "negative entry at (1,2)");

  const auto urn = validate_model(make_model("1/2", {{"0", "1/2"}, {"1", "0"}}, Mode::UrnRemovals));
  CHECK(urn.violations.size() == 2);

  ModelSpec ragged;
  ragged.alpha = 1;
  ragged.matrix = InteractionMatrix({{Rational(0), Rational(1)}, {Rational(0)}});
  const auto dims = validate_model(ragged);
  REQUIRE_FALSE(dims.ok());
  CHECK(dims.violations[0].rfind("bad dimensions", 0) == 0);

  auto imm = make_model("1", {{"0", "1"}, {"1", "0"}});
  imm.immigration = std::vector<Rational>{Rational(1)};
  CHECK_FALSE(validate_model(imm).ok());
  imm.immigration = std::vector<Rational>{Rational(1), Rational(-1)};
  CHECK_FALSE(validate_model(imm).ok());
  imm.immigration = std::vector<Rational>{Rational(1), Rational(0)};
  CHECK(validate_model(imm).ok());
  CHECK(imm.has_immigration());
  imm.mode = Mode::UrnRemovals;
  CHECK_FALSE(imm.has_immigration());
}

TEST_CASE("parse_model reads the documented format") {
  const auto spec = parse_model(R"({"alpha":"1","matrix":[["0","3/10"],["3/10","0"]]})");
  CHECK(spec.alpha == 1);
  CHECK(spec.matrix(0, 1) == Rational(3, 10));
  CHECK(spec.matrix(1, 0) == Rational(3, 10));
  CHECK(spec.mode == Mode::EmbeddedDtmc);

  const auto urn = parse_model(R"({"alpha":"0","mode":"urn","matrix":[["0","1"],["1","0"]]})");
  CHECK(urn.mode == Mode::UrnRemovals);
  CHECK(urn.alpha == 0);

  const auto full = parse_model(
      R"({"alpha":"2","mode":"lcp","matrix":[["0",1],["1/2","0"]],"immigration":["1/3","0"],"initial":[4,5]})");
  CHECK(full.mode == Mode::LcpCtmc);
  CHECK(full.matrix(0, 1) == 1);
  REQUIRE(full.immigration);
  CHECK((*full.immigration)[0] == Rational(1, 3));
  REQUIRE(full.initial);
  CHECK(full.initial->counts == std::vector<std::int64_t>{4, 5});
}

TEST_CASE("parse_model errors name the field or line") {
  try {
    parse_model(R"({"alpha":"1"})");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.field() == "matrix");
  }
  try {
    parse_model(R"({"matrix":[["0"]]})");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.field() == "alpha");
  }
  try {
    parse_model("{\n\"alpha\": \"1\",\n\"matrix\": [[\"0\"],\n}");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
  try {
    parse_model(R"({"alpha":0.3,"matrix":[["0"]]})");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.field() == "alpha");
  }
  try {
    parse_model(R"({"alpha":"1","matrix":[["0"]],"colour":"red"})");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.field() == "colour");
  }
  CHECK_THROWS_AS(parse_model(R"({"alpha":"1","matrix":[["2"]]})"), ValidationError);
  CHECK_THROWS_AS(parse_model(R"({"alpha":"1","matrix":[["0"]],"mode":"ode"})"), ParseError);
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), ParseError);
}

TEST_CASE("serialize_model round-trips") {
  const auto spec = parse_model(
      R"({"alpha":"7/3","mode":"lcp","matrix":[["0","1","0"],["1/2","0","3"],["0","0","0"]],"immigration":["0","1","1/7"],"initial":[1,2,3]})");
  CHECK(parse_model(serialize_model(spec)) == spec);
  const auto urn = parse_model(R"({"alpha":"0","mode":"urn","matrix":[["0","1"],["1","0"]]})");
  CHECK(parse_model(serialize_model(urn)) == urn);
}

TEST_CASE("sample model files load and round-trip") {
  for (const auto& entry : std::filesystem::directory_iterator(LCPSIM_MODELS_DIR)) {
    CAPTURE(entry.path().string());
    const auto spec = load_model(entry.path());
    CHECK(validate_model(spec).ok());
    CHECK(parse_model(serialize_model(spec)) == spec);
  }
}

TEST_CASE("parse_state") {
  CHECK(parse_state("50,50").counts == std::vector<std::int64_t>{50, 50});
  CHECK(parse_state(" 1, 2 ,3").counts == std::vector<std::int64_t>{1, 2, 3});
  CHECK_THROWS(parse_state("1,,2"));
  CHECK_THROWS(parse_state("1,-2"));
  CHECK_THROWS(parse_state("a"));
}

TEST_CASE("states and survivor sets") {
  const PopulationState s{{3, 0, 2}};
  CHECK_FALSE(s.all_positive());
  CHECK_FALSE(s.all_zero());
  CHECK(s.min() == 0);
  CHECK(PopulationState{{0, 0}}.all_zero());

  const auto set = SurvivorSet::from_mask(0b101);
  CHECK(set.members == std::vector<std::size_t>{0, 2});
  CHECK(set.mask() == 0b101);
  CHECK(set.to_string() == "{1,3}");
  CHECK(set.contains(2));
  CHECK_FALSE(set.contains(1));

  const auto line = make_model("1", {{"0", "1", "0"}, {"1", "0", "1"}, {"0", "1", "0"}});
  CHECK(set.pairwise_non_interacting(line.matrix));
  CHECK_FALSE(SurvivorSet::from_mask(0b011).pairwise_non_interacting(line.matrix));

  CHECK(validate_state(line, PopulationState{{1, 2}}).violations.size() == 1);
  CHECK(validate_state(line, PopulationState{{1, -2, 0}}).violations.size() == 1);
}

TEST_CASE("matrix relabeling and restriction helpers") {
  const auto a = make_model("1", {{"0", "1", "2"}, {"3", "0", "4"}, {"5", "6", "0"}}).matrix;
  const auto p = a.permuted({2, 0, 1});
  CHECK(p(0, 1) == a(2, 0));
  CHECK(p(1, 2) == a(0, 1));
  const auto sub = a.submatrix({0, 2});
  CHECK(sub.size() == 2);
  CHECK(sub(0, 1) == 2);
  CHECK(sub(1, 0) == 5);
  CHECK(a.transposed()(0, 1) == 3);
  CHECK(a.scaled(Rational(1, 2))(2, 1) == 3);
  CHECK(InteractionMatrix::zero(3).is_zero());
}

TEST_CASE("mode names") {
  CHECK(mode_name(Mode::LcpCtmc) == "lcp");
  CHECK(parse_mode("dtmc") == Mode::EmbeddedDtmc);
  CHECK(parse_mode("urn") == Mode::UrnRemovals);
  CHECK_THROWS(parse_mode("pde"));
}
