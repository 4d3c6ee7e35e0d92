#include <doctest.h>

#include <cmath>

#include "pm/types.hpp"

using namespace pm;
using Rows = std::vector<std::vector<double>>;

TEST_CASE("population validates weights and labels") {
  CHECK_NOTHROW(UserPopulation({"a", "b"}, {0.25, 0.75}));
  CHECK_THROWS_AS(UserPopulation({"a", "b"}, {0.5, 0.6}), InvalidInputError);
  CHECK_THROWS_AS(UserPopulation({"a", "b"}, {1.5, -0.5}), InvalidInputError);
  CHECK_THROWS_AS(UserPopulation({"a", "a"}, {0.5, 0.5}), InvalidInputError);
  CHECK_THROWS_AS(UserPopulation({}, {}), InvalidInputError);
  const auto u = UserPopulation::uniform(4);
  CHECK(u.labels() == std::vector<std::string>{"t1", "t2", "t3", "t4"});
  CHECK(u.weight(2) == doctest::Approx(0.25));
}

TEST_CASE("score matrix rejects ragged, negative and non-finite input") {
  CHECK_THROWS_AS(ScoreMatrix(Rows{{0.1, 0.2}, {0.3}}), InvalidInputError);
  CHECK_THROWS_AS(ScoreMatrix(Rows{{0.1, -0.2}}), InvalidInputError);
  CHECK_THROWS_AS(ScoreMatrix(Rows{{0.1, std::nan("")}}), InvalidInputError);
  const ScoreMatrix s({{0.1, 0.2}, {0.3, 0.4}});
  CHECK(s.labels() == std::vector<std::string>{"g1", "g2"});
  CHECK(s.scaled(2.0)(1, 1) == doctest::Approx(0.8));
  CHECK(s.prefix(1).models() == 1);
  CHECK(s.with_row({0.5, 0.6}, "new")(2, 0) == doctest::Approx(0.5));
}

TEST_CASE("softmax temperature must be positive") {
  CHECK_THROWS_AS(ChoiceRule::softmax(0.0), InvalidParameterError);
  CHECK_THROWS_AS(ChoiceRule::softmax(-1.0), InvalidParameterError);
  CHECK(ChoiceRule::softmax(0.1).is_softmax());
}

TEST_CASE("profiles") {
  const auto p = StrategyProfile::from_one_based({3, 1, 3});
  CHECK(p.choices == std::vector<ModelIndex>{2, 0, 2});
  CHECK(p.multiset() == std::vector<ModelIndex>{0, 2, 2});
  CHECK(p.distinct_count() == 2);
  CHECK(to_string(p) == "(g3,g1,g3)");
  CHECK(p.with(1, 1).choices == std::vector<ModelIndex>{2, 1, 2});
  CHECK_THROWS(StrategyProfile::from_one_based({0, 1}));
}

TEST_CASE("game spec checks profiles") {
  const GameSpec g(ScoreMatrix(Rows{{0.1, 0.2}, {0.3, 0.4}}), UserPopulation::uniform(2), 2);
  CHECK_NOTHROW(g.check_profile({0, 1}));
  CHECK_THROWS_AS(g.check_profile({0, 2}), InvalidProfileError);
  CHECK_THROWS_AS(g.check_profile({0}), InvalidProfileError);
  CHECK_THROWS_AS(GameSpec(ScoreMatrix(Rows{{0.1, 0.2}}), UserPopulation::uniform(3), 2), InvalidInputError);
  CHECK_THROWS(GameSpec(ScoreMatrix(Rows{{0.1, 0.2}}), UserPopulation::uniform(2), 0));
}
