#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "pm/equilibrium.hpp"
#include "pm/fixtures.hpp"
#include "pm/game.hpp"
#include "test_util.hpp"

using namespace pm;
using Rows = std::vector<std::vector<double>>;

namespace {

// Brute-force oracle: no platform has a strictly better model.
bool is_pne_brute(const GameSpec& g, const StrategyProfile& p) {
  const auto u = platform_utilities(g, p);
  for (PlatformIndex i = 0; i < g.n_platforms; ++i)
    for (ModelIndex m = 0; m < g.models(); ++m)
      if (platform_utilities(g, p.with(i, m))[i] > u[i] + kImprovementTol) return false;
  return true;
}

std::vector<StrategyProfile> all_profiles(const GameSpec& g) {
  std::vector<StrategyProfile> out;
  StrategyProfile p(std::vector<ModelIndex>(g.n_platforms, 0));
  while (true) {
    out.push_back(p);
    std::size_t i = g.n_platforms;
    while (i > 0 && p[i - 1] + 1 == g.models()) p[--i] = 0;
    if (i == 0) break;
    ++p[i - 1];
  }
  return out;
}

std::vector<StrategyProfile> profiles_of(const std::vector<PneEntry>& es) {
  std::vector<StrategyProfile> out;
  for (const auto& e : es) out.push_back(e.profile);
  return out;
}

}  // namespace

TEST_CASE("verify_pne on the reference games") {
  CHECK(verify_pne(builtin_instance("fig2_a"), {0, 1}).is_pne);
  const auto c1 = builtin_instance("c1_rps");
  for (const auto& p : all_profiles(c1)) {
    const auto r = verify_pne(c1, p);
    CHECK_FALSE(r.is_pne);
    REQUIRE(r.witness);
    CHECK(r.witness->gain > 0.0);
  }
  const GameSpec single(ScoreMatrix(Rows{{0.2, 0.9}}), UserPopulation::uniform(2), 3);
  CHECK(verify_pne(single, {0, 0, 0}).is_pne);
}

TEST_CASE("enumerate_pne on the reference games") {
  const auto b = enumerate_pne(builtin_instance("fig2_b"));
  REQUIRE(b.size() == 1);
  CHECK(b[0].profile == StrategyProfile{1, 1});
  CHECK(b[0].classification.label == EquilibriumLabel::homogeneous);
  CHECK(enumerate_pne(builtin_instance("c1_rps")).empty());
  const auto f3 = enumerate_pne(builtin_instance("fig3_b"));
  CHECK(profiles_of(f3) == std::vector<StrategyProfile>{{2, 2}});
  const auto a = enumerate_pne(builtin_instance("fig2_a"));
  CHECK(profiles_of(a) == std::vector<StrategyProfile>{{0, 1}, {1, 0}});
  CHECK(a[0].classification.label == EquilibriumLabel::fully_differentiated);
}

TEST_CASE("enumerate_pne respects the budget") {
  const auto g = builtin_instance("c8_players_3");
  CHECK(profile_count(6, 3) == 216);
  try {
    enumerate_pne(g, {100, 1});
    FAIL("expected BudgetExceededError");
  } catch (const BudgetExceededError& e) {
    CHECK(e.required == 216);
    CHECK(e.budget == 100);
  }
  CHECK(profile_count(10, 40) == UINT64_MAX);
}

TEST_CASE("enumerate_pne matches brute force, threaded or not") {
  std::mt19937_64 rng(17);
  for (int r = 0; r < 200; ++r) {
    const auto g = test::random_game(rng, 6, 4, 6, r % 3 == 0);
    std::vector<StrategyProfile> expected;
    for (const auto& p : all_profiles(g))
      if (is_pne_brute(g, p)) expected.push_back(p);
    CHECK(profiles_of(enumerate_pne(g)) == expected);
    if (r % 20 == 0) CHECK(profiles_of(enumerate_pne(g, {10'000'000, 3})) == expected);
  }
}

TEST_CASE("threaded enumeration on a larger game equals the serial result") {
  std::mt19937_64 rng(3);
  auto g = test::random_game(rng, 6, 4, 6).with_platforms(4);
  while (g.models() < 6) g = test::random_game(rng, 6, 4, 6).with_platforms(4);
  CHECK(profiles_of(enumerate_pne(g, {10'000'000, 1})) == profiles_of(enumerate_pne(g, {10'000'000, 4})));
}

TEST_CASE("hardmax PNE set is invariant to score scaling") {
  std::mt19937_64 rng(23);
  for (int r = 0; r < 200; ++r) {
    const auto g = test::random_game(rng, 5, 3, 5);
    const auto base = profiles_of(enumerate_pne(g));
    for (double c : {0.5, 2.0, 10.0})
      CHECK(profiles_of(enumerate_pne(g.with_scores(g.scores.scaled(c)))) == base);
  }
}

TEST_CASE("best response") {
  const auto c1 = builtin_instance("c1_rps");
  CHECK(best_response(c1, {0, 0}, 0) == 2);
  const GameSpec same(ScoreMatrix(Rows{{0.4, 0.6}, {0.4, 0.6}, {0.4, 0.6}}), UserPopulation::uniform(2), 2);
  for (ModelIndex m = 0; m < 3; ++m) CHECK(best_response(same, {m, 0}, 0) == m);
  const auto fa = builtin_instance("fig2_a");
  CHECK(best_response(fa, {0, 1}, 0) == 0);
}

TEST_CASE("dynamics on C.1 cycle through the off-diagonal profiles") {
  const auto c1 = builtin_instance("c1_rps");
  const auto out = run_dynamics(c1, {0, 0});
  REQUIRE(out.kind == OutcomeKind::cycle);
  const auto cyc = out.cycle_profiles();
  std::set<StrategyProfile> seen(cyc.begin(), cyc.end());
  const std::set<StrategyProfile> off = {{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}};
  CHECK(seen == off);
  // stepwise oracle: every changing move is a strict improvement for the mover
  StrategyProfile prev = out.start;
  for (const auto& st : out.trajectory) {
    if (st.changed)
      CHECK(platform_utilities(c1, st.profile)[st.mover] > platform_utilities(c1, prev)[st.mover]);
    else
      CHECK(st.profile == prev);
    prev = st.profile;
  }
}

TEST_CASE("dynamics from a PNE stop after one silent pass") {
  const auto g = builtin_instance("c7_welfare_gap");
  const auto out = run_dynamics(g, {1, 2});
  CHECK(out.kind == OutcomeKind::equilibrium);
  CHECK(out.trajectory.size() == 2);
  CHECK(*out.equilibrium_profile == StrategyProfile{1, 2});
}

TEST_CASE("C.8 three-platform dynamics visit the reference multisets") {
  const auto out = run_dynamics(builtin_instance("c8_players_3"), {0, 0, 0});
  REQUIRE(out.kind == OutcomeKind::cycle);
  const auto ms = out.cycle_multisets();
  for (std::vector<ModelIndex> want : {std::vector<ModelIndex>{0, 2, 2}, {2, 2, 5}, {0, 2, 5}})
    CHECK(std::find(ms.begin(), ms.end(), want) != ms.end());
}

TEST_CASE("dynamics options are validated and timeouts are reported") {
  const auto c1 = builtin_instance("c1_rps");
  CHECK_THROWS_AS(run_dynamics(c1, {0, 0}, {{}, 0}), InvalidParameterError);
  CHECK_THROWS(run_dynamics(c1, {0, 0}, {{0}, 10}));
  CHECK_THROWS_AS(run_dynamics(c1, {0, 5}), InvalidProfileError);
  const auto out = run_dynamics(c1, {0, 0}, {{}, 3});
  CHECK(out.kind == OutcomeKind::timeout);
  CHECK(out.trajectory.size() == 3);
}

TEST_CASE("equilibrium outcomes of dynamics are verified PNE") {
  std::mt19937_64 rng(41);
  for (int r = 0; r < 300; ++r) {
    const auto g = test::random_game(rng);
    const auto out = run_dynamics(g, test::random_profile(rng, g));
    CHECK(out.kind != OutcomeKind::timeout);
    if (out.kind == OutcomeKind::equilibrium) CHECK(is_pne_brute(g, *out.equilibrium_profile));
  }
}

TEST_CASE("Lemma conditions on the Fig. 2 scenarios") {
  const auto a = builtin_instance("fig2_a");
  const auto b = builtin_instance("fig2_b");
  CHECK(check_differentiated_condition(a, {0, 1}).holds);
  CHECK_FALSE(check_differentiated_condition(b, {0, 1}).holds);
  CHECK(check_homogeneous_condition(b, 1).holds);
  CHECK(check_homogeneous_condition(builtin_instance("fig3_b"), 2).holds);
  CHECK_THROWS(check_differentiated_condition(a.with_platforms(1), {0}));
  const GameSpec single(ScoreMatrix(Rows{{0.2, 0.9}}), UserPopulation::uniform(2), 2);
  CHECK(check_homogeneous_condition(single, 0).holds);

  const auto ta = two_player_conditions(a, 0, 1);
  CHECK(ta.differentiated);
  const auto tb = two_player_conditions(b, 0, 1);
  CHECK_FALSE(tb.differentiated);
  CHECK(tb.homogeneous_j);
  CHECK_THROWS(two_player_conditions(a, 1, 1));
}

TEST_CASE("Lemma conditions agree with verify_pne on random instances") {
  std::mt19937_64 rng(8);
  for (int r = 0; r < 500; ++r) {
    const auto g = test::random_game(rng, 6, 4, 6);
    if (g.n_platforms >= 2 && g.models() >= g.n_platforms) {
      std::vector<ModelIndex> ids(g.models());
      std::iota(ids.begin(), ids.end(), 0);
      std::shuffle(ids.begin(), ids.end(), rng);
      ids.resize(g.n_platforms);
      const StrategyProfile p(ids);
      CHECK(check_differentiated_condition(g, p).holds == verify_pne(g, p).is_pne);
    }
    std::uniform_int_distribution<ModelIndex> d(0, g.models() - 1);
    const ModelIndex m = d(rng);
    CHECK(check_homogeneous_condition(g, m).holds ==
          verify_pne(g, StrategyProfile(std::vector<ModelIndex>(g.n_platforms, m))).is_pne);
  }
}

TEST_CASE("centralization threshold") {
  CHECK(centralization_threshold(1.0, 0.0) == 0.0);
  CHECK(centralization_threshold(0.3, 0.3) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("softmax scan") {
  const auto c9 = builtin_instance("c9_softmax");
  CHECK(softmax_pne_scan(c9, {0.1})[0].pne_count == 0);
  const auto c1 = builtin_instance("c1_rps");
  for (const auto& row : softmax_pne_scan(c1, {1e-3, 1e-2})) CHECK(row.pne_count == 0);
  std::mt19937_64 rng(31);
  for (int r = 0; r < 50; ++r) {
    const auto g = test::random_game(rng, 5, 3, 5);
    CHECK(softmax_pne_scan(g, {1e9})[0].pne_count >= 1);
  }
}

TEST_CASE("centralization check") {
  // identical minority scores: any weight on the dominant type suffices
  const GameSpec flat(ScoreMatrix(Rows{{0.6, 0.3}, {0.2, 0.3}}), UserPopulation({}, {0.3, 0.7}), 3);
  const auto r = centralization_check(flat, {0, 0, 0.4, 0.0, 0.3});
  CHECK(r.threshold == 0.0);
  CHECK(r.satisfied);
  CHECK(r.pne_confirmed);

  CHECK_THROWS_AS(centralization_check(flat, {0, 0, 0.5, 0.0, 0.3}), InvalidInputError);
  CHECK_THROWS_AS(centralization_check(flat, {0, 0, 0.4, 0.0, 0.5}), InvalidInputError);
  const GameSpec wide(ScoreMatrix(Rows{{0.6, 0.3}, {0.2, 0.9}}), UserPopulation({}, {0.3, 0.7}), 3);
  try {
    centralization_check(wide, {0, 0, 0.4, 0.1, 0.3});
    FAIL("expected InvalidInputError");
  } catch (const InvalidInputError& e) {
    CHECK(std::string(e.what()).find("minority variation") != std::string::npos);
  }

  // above the threshold, yet a deviator takes the whole minority type
  const GameSpec g(ScoreMatrix(Rows{{0.1, 0.0}, {0.0, 0.1}}), UserPopulation({}, {0.7, 0.3}), 3);
  const auto c = centralization_check(g, {0, 0, 0.1, 0.1, 0.7});
  CHECK(c.threshold == doctest::Approx(2.0 / 3.0));
  CHECK(c.satisfied);
  CHECK_FALSE(c.pne_confirmed);
  CHECK(platform_utility(g, {1, 0, 0}, 0) == doctest::Approx(0.03));
  CHECK(platform_utility(g, {0, 0, 0}, 0) == doctest::Approx(0.07 / 3));
}
