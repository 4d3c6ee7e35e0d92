#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pm/equilibrium.hpp"
#include "pm/fixtures.hpp"
#include "pm/game.hpp"
#include "pm/metrics.hpp"
#include "test_util.hpp"

using namespace pm;
using Rows = std::vector<std::vector<double>>;

namespace {

double brute_coverage(const GameSpec& g, const StrategyProfile& p) {
  double v = 0.0;
  for (TypeIndex k = 0; k < g.types(); ++k) {
    double best = 0.0;
    for (auto m : p.choices) best = std::max(best, g.scores(m, k));
    v += g.population.weight(k) * best;
  }
  return v;
}

double brute_optimum(const GameSpec& g) {
  double best = 0.0;
  StrategyProfile p(std::vector<ModelIndex>(g.n_platforms, 0));
  while (true) {
    best = std::max(best, brute_coverage(g, p));
    std::size_t i = g.n_platforms;
    while (i > 0 && p[i - 1] + 1 == g.models()) p[--i] = 0;
    if (i == 0) break;
    ++p[i - 1];
  }
  return best;
}

}  // namespace

TEST_CASE("coverage on the reference games") {
  const auto c7 = builtin_instance("c7_welfare_gap");
  CHECK(std::abs(coverage_value(c7, {0, 1}) - 0.7526) < 1e-4);
  CHECK(std::abs(coverage_value(c7, {1, 2}) - 0.7389) < 1e-4);
  CHECK(coverage_value(builtin_instance("fig3_b"), {2, 2}) == doctest::Approx(0.84).epsilon(1e-12));
  std::mt19937_64 rng(1);
  for (int r = 0; r < 300; ++r) {
    const auto g = test::random_game(rng);
    const auto p = test::random_profile(rng, g);
    CHECK(std::abs(coverage_value(g, p) - brute_coverage(g, p)) < 1e-12);
    const ModelIndex m = p[0];
    CHECK(std::abs(coverage_value(g, StrategyProfile(std::vector<ModelIndex>(g.n_platforms, m))) -
                   average_scores(g)[m]) < 1e-12);
  }
}

TEST_CASE("market shares") {
  const auto p1 = builtin_instance("llm_pool1");
  const auto s = market_shares(p1, {3, 3, 3});
  CHECK(s.hhi == doctest::Approx(1.0 / 3.0));
  CHECK(s.support == 1);
  for (double x : s.shares) CHECK(x == doctest::Approx(1.0 / 3.0));
  const GameSpec dom(ScoreMatrix(Rows{{0.9, 0.9}, {0.1, 0.2}}), UserPopulation::uniform(2), 2);
  CHECK(market_shares(dom, {0, 1}).hhi == doctest::Approx(1.0));
}

TEST_CASE("social optimum") {
  const auto c7 = builtin_instance("c7_welfare_gap");
  const auto o = social_optimum(c7);
  CHECK(std::abs(o.value - 0.7526) < 1e-4);
  CHECK(o.profile == StrategyProfile{0, 1});
  CHECK(std::abs(social_optimum(builtin_instance("c9_softmax")).value - 0.9345) < 1e-9);
  const GameSpec single(ScoreMatrix(Rows{{0.2, 0.6}}), UserPopulation::uniform(2), 3);
  CHECK(social_optimum(single).value == doctest::Approx(0.4));
  CHECK(multiset_count(6, 3) == 56);
  CHECK_THROWS_AS(social_optimum(builtin_instance("c8_players_3"), 10), BudgetExceededError);
  std::mt19937_64 rng(4);
  for (int r = 0; r < 200; ++r) {
    const auto g = test::random_game(rng);
    CHECK(std::abs(social_optimum(g).value - brute_optimum(g)) < 1e-12);
  }
}

TEST_CASE("user welfare conventions") {
  const auto a = builtin_instance("fig2_a");
  const auto eq = run_dynamics(a, {0, 0});
  REQUIRE(eq.kind == OutcomeKind::equilibrium);
  const auto w = user_welfare(a, eq);
  CHECK(w.welfare == doctest::Approx(0.85));
  CHECK(w.cycle_length == 1);

  const auto c1 = builtin_instance("c1_rps");
  const auto cyc = run_dynamics(c1, {0, 0});
  const auto wc = user_welfare(c1, cyc);
  double mean = 0.0;
  for (const auto& p : cyc.cycle_profiles()) mean += coverage_value(c1, p);
  mean /= static_cast<double>(cyc.cycle_profiles().size());
  CHECK(wc.welfare == doctest::Approx(mean).epsilon(1e-14));
  CHECK(wc.cycle_length == cyc.cycle_profiles().size());

  const auto to = run_dynamics(c1, {0, 0}, {{}, 2});
  CHECK_THROWS_AS(user_welfare(c1, to), MarketError);
}

TEST_CASE("C.8 welfare values") {
  const auto g2 = builtin_instance("c8_players_2");
  const auto out = run_dynamics(g2, {2, 5});
  CHECK(out.kind == OutcomeKind::equilibrium);
  CHECK(std::abs(user_welfare(g2, out).welfare - 0.199576) < 5e-6);
  CHECK(std::abs(coverage_value(g2, {0, 2}) - 0.2148) < 5e-4);
}

TEST_CASE("welfare bound") {
  const auto c7 = builtin_instance("c7_welfare_gap");
  const auto b = welfare_bound_check(c7, run_dynamics(c7, {1, 2}));
  CHECK(b.holds);
  CHECK(std::abs(b.slack - 0.0137) < 2e-4);
  const GameSpec single(ScoreMatrix(Rows{{0.2, 0.6}}), UserPopulation::uniform(2), 2);
  CHECK(welfare_bound_check(single, run_dynamics(single, {0, 0})).slack == doctest::Approx(0.0));
  std::mt19937_64 rng(77);
  for (int r = 0; r < 1000; ++r) {
    const auto g = test::random_game(rng, 6, 4, 6, r % 4 == 0);
    const auto out = run_dynamics(g, test::random_profile(rng, g));
    if (out.kind == OutcomeKind::timeout) continue;
    const auto wb = welfare_bound_check(g, out);
    CHECK(wb.holds);
    CHECK(wb.welfare <= wb.social_optimum + 1e-12);
  }
}

TEST_CASE("platform entry check") {
  // duplicating the incumbent model at a homogeneous PNE that stays a PNE
  const auto b = builtin_instance("fig2_b");
  const auto dup = platform_entry_check(b, {1, 1}, 1);
  CHECK(dup.is_equilibrium);
  CHECK(dup.welfare_delta == doctest::Approx(0.0));
  CHECK(dup.support_delta == 0);

  std::mt19937_64 rng(13);
  int both = 0, violated = 0;
  for (int r = 0; r < 400; ++r) {
    const auto g = test::random_game(rng, 5, 3, 5);
    const auto pne = enumerate_pne(g);
    if (pne.empty()) continue;
    for (ModelIndex m = 0; m < g.models(); ++m) {
      const auto e = platform_entry_check(g, pne[0].profile, m);
      StrategyProfile ext = pne[0].profile;
      ext.choices.push_back(m);
      CHECK(e.is_equilibrium == verify_pne(g.with_platforms(g.n_platforms + 1), ext).is_pne);
      if (e.entrant_best_response && e.incumbents_stable) {
        ++both;
        REQUIRE(e.monotone);
        CHECK(e.welfare_after >= e.welfare_before - 1e-12);
        CHECK(e.support_delta >= 0);
      } else {
        ++violated;
        CHECK_FALSE(e.monotone.has_value());
      }
    }
  }
  CHECK(both > 0);
  CHECK(violated > 0);
}

TEST_CASE("metrics record") {
  const auto c1 = builtin_instance("c1_rps");
  const auto out = run_dynamics(c1, {0, 0});
  const auto m = metrics_for_outcome(c1, out);
  CHECK(m.profile == out.trajectory.back().profile);
  CHECK(m.welfare <= m.social_optimum + 1e-12);
  const auto a = builtin_instance("fig2_a");
  const auto ma = metrics_for_outcome(a, run_dynamics(a, {0, 0}));
  CHECK(ma.support == 2);
  CHECK(ma.coverage == doctest::Approx(0.85));
}
