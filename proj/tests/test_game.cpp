#include <doctest.h>

#include <cmath>
#include <numeric>

#include "pm/fixtures.hpp"
#include "pm/game.hpp"
#include "pm/metrics.hpp"
#include "test_util.hpp"

using namespace pm;
using Rows = std::vector<std::vector<double>>;

TEST_CASE("hardmax allocation") {
  const auto c1 = builtin_instance("c1_rps");
  const auto a = allocate_hardmax(c1, {0, 1});
  // type A scores g1 at 0.2 and g2 at 0.1
  CHECK(a(0, 0) == 1.0);
  CHECK(a(1, 0) == 0.0);

  const auto one = c1.with_platforms(1);
  for (ModelIndex g = 0; g < 3; ++g)
    for (TypeIndex k = 0; k < 3; ++k) CHECK(allocate_hardmax(one, {g})(0, k) == 1.0);

  const auto three = c1.with_platforms(3);
  const auto t = allocate_hardmax(three, {1, 1, 1});
  for (PlatformIndex i = 0; i < 3; ++i)
    for (TypeIndex k = 0; k < 3; ++k) CHECK(t(i, k) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("softmax allocation") {
  const GameSpec eq(ScoreMatrix(Rows{{0.4}, {0.4}}), UserPopulation::uniform(1), 2, ChoiceRule::softmax(0.37));
  const auto a = allocate_softmax(eq, {0, 1});
  CHECK(a(0, 0) == doctest::Approx(0.5));
  CHECK(a(1, 0) == doctest::Approx(0.5));

  const auto c9 = builtin_instance("c9_softmax");
  const auto u = platform_utilities(c9, {0, 0});
  const auto t = average_scores(c9);
  CHECK(u[0] == doctest::Approx(t[0] / 2).epsilon(1e-15));
  CHECK(u[0] == doctest::Approx(0.39175).epsilon(1e-12));

  CHECK_THROWS_AS(allocate_softmax(builtin_instance("c1_rps"), {0, 1}), InvalidParameterError);
}

TEST_CASE("softmax at tiny temperature matches hardmax on tie-free instances") {
  std::mt19937_64 rng(5);
  int checked = 0;
  while (checked < 200) {
    auto g = test::random_game(rng);
    const auto p = test::random_profile(rng, g);
    // require a unique best platform per type by a margin that dominates 1e-6
    bool tie_free = true;
    for (TypeIndex k = 0; k < g.types(); ++k) {
      std::vector<double> s;
      for (auto m : p.choices) s.push_back(g.scores(m, k));
      std::sort(s.rbegin(), s.rend());
      if (s.size() > 1 && s[0] - s[1] < 1e-3) tie_free = false;
    }
    if (!tie_free || p.distinct_count() != p.size()) continue;
    const auto h = allocate_hardmax(g, p);
    const auto s = allocate_softmax(g.with_choice(ChoiceRule::softmax(1e-6)), p);
    for (PlatformIndex i = 0; i < g.n_platforms; ++i)
      for (TypeIndex k = 0; k < g.types(); ++k) CHECK(std::abs(h(i, k) - s(i, k)) <= 1e-6);
    ++checked;
  }
}

TEST_CASE("C.1 payoffs equal the closed-form fractions") {
  const auto c1 = builtin_instance("c1_rps");
  // diagonal 1/20, winner 1/10, loser 1/15
  const double diag = 1.0 / 20, win = 1.0 / 10, lose = 1.0 / 15;
  for (ModelIndex a = 0; a < 3; ++a)
    for (ModelIndex b = 0; b < 3; ++b) {
      const auto u = platform_utilities(c1, {a, b});
      if (a == b) {
        CHECK(std::abs(u[0] - diag) < 1e-15);
        CHECK(std::abs(u[1] - diag) < 1e-15);
      } else {
        const bool a_wins = (a + 1) % 3 == b;  // g1 beats g2, g2 beats g3, g3 beats g1
        CHECK(std::abs(u[0] - (a_wins ? win : lose)) < 1e-15);
        CHECK(std::abs(u[1] - (a_wins ? lose : win)) < 1e-15);
      }
    }
  const auto u21 = platform_utilities(c1, {1, 0});
  CHECK(u21[0] == doctest::Approx(0.0667).epsilon(5e-3));
}

TEST_CASE("Fig. 2 scenario A utilities and decomposition") {
  const auto g = builtin_instance("fig2_a");
  const auto u = platform_utilities(g, {0, 1});
  CHECK(u[0] == doctest::Approx(0.45).epsilon(1e-12));
  CHECK(u[1] == doctest::Approx(0.40).epsilon(1e-12));
  const auto t = average_scores(g);
  CHECK(t[0] == doctest::Approx(0.625));
  CHECK(t[1] == doctest::Approx(0.825));
  CHECK(deviation_advantage(g, {0, 1}, 0) == doctest::Approx(0.275));
  CHECK(deviation_advantage(g, {0, 1}, 1) == doctest::Approx(-0.025));
}

TEST_CASE("C.7 averages and deviation advantage") {
  const auto g = builtin_instance("c7_welfare_gap");
  const auto t = average_scores(g);
  CHECK(std::abs(t[0] - 0.534) < 1e-4);
  CHECK(std::abs(t[1] - 0.7079) < 1e-4);
  CHECK(std::abs(t[2] - 0.6223) < 1e-4);
  CHECK(std::abs(deviation_advantage(g, {0, 1}, 0) - (-0.0372)) < 1e-4);
}

TEST_CASE("C.1 decomposed utility of (g2,g1)") {
  const auto c1 = builtin_instance("c1_rps");
  const double t2 = average_scores(c1)[1];
  const double d21 = deviation_advantage(c1, {1, 0}, 0);
  CHECK(t2 == doctest::Approx(0.1));
  CHECK(d21 == doctest::Approx(1.0 / 30.0));
  CHECK(decomposed_utility(c1, {1, 0}, 0) == doctest::Approx(1.0 / 15.0).epsilon(1e-14));
}

TEST_CASE("homogeneous profiles split the average evenly") {
  std::mt19937_64 rng(11);
  for (int r = 0; r < 100; ++r) {
    const auto g = test::random_game(rng, 6, 4, 6, r % 2 == 1);
    std::uniform_int_distribution<ModelIndex> d(0, g.models() - 1);
    const ModelIndex m = d(rng);
    const StrategyProfile p(std::vector<ModelIndex>(g.n_platforms, m));
    const double tm = average_scores(g)[m];
    for (PlatformIndex i = 0; i < g.n_platforms; ++i) {
      CHECK(std::abs(platform_utility(g, p, i) - tm / g.n_platforms) < 1e-12);
      const double d_ = g.choice.is_softmax() ? deviation_advantage_soft(g, p, i)
                                              : deviation_advantage(g, p, i);
      CHECK(std::abs(d_) < 1e-12);
    }
  }
}

TEST_CASE("uniform scores average to the constant") {
  const GameSpec g(ScoreMatrix(Rows{{0.3, 0.3, 0.3}, {0.7, 0.7, 0.7}}), UserPopulation({}, {0.2, 0.3, 0.5}), 2);
  const auto t = average_scores(g);
  CHECK(t[0] == doctest::Approx(0.3));
  CHECK(t[1] == doctest::Approx(0.7));
}

TEST_CASE("C.9 softmax deviation advantage reproduces the printed utility") {
  const auto g = builtin_instance("c9_softmax");
  const auto t = average_scores(g);
  const double d = deviation_advantage_soft(g, {0, 1}, 0);
  const double u = platform_utility(g, {0, 1}, 0);
  CHECK(std::abs(2 * u - t[0] - d) < 1e-12);
  CHECK(std::abs(u - 0.47634) < 5e-5);
}

TEST_CASE("decomposition identity and allocation sums on random instances") {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int r = 0; r < 1000; ++r) {
    const auto g = test::random_game(rng, 6, 4, 6, r % 2 == 1);
    const auto p = test::random_profile(rng, g);
    const auto a = allocate(g, p);
    for (TypeIndex k = 0; k < g.types(); ++k) {
      double col = 0.0;
      for (PlatformIndex i = 0; i < g.n_platforms; ++i) col += a(i, k);
      CHECK(std::abs(col - 1.0) < 1e-12);
    }
    const auto u = platform_utilities(g, p);
    for (PlatformIndex i = 0; i < g.n_platforms; ++i) {
      worst = std::max(worst, std::abs(decomposed_utility(g, p, i) - u[i]));
      CHECK(std::abs(platform_utility(g, p, i) - u[i]) < 1e-15);
    }
    const double total = std::accumulate(u.begin(), u.end(), 0.0);
    const double v = coverage_value(g, p);
    if (g.choice.is_softmax())
      CHECK(total <= v + 1e-12);
    else
      CHECK(std::abs(total - v) < 1e-12);
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("two-player identity delta_ij + delta_ji") {
  std::mt19937_64 rng(99);
  for (int r = 0; r < 500; ++r) {
    auto g = test::random_game(rng).with_platforms(2);
    if (g.models() < 2) continue;
    std::uniform_int_distribution<ModelIndex> d(0, g.models() - 1);
    const ModelIndex i = d(rng);
    ModelIndex j = d(rng);
    if (i == j) j = (i + 1) % g.models();
    double expected = 0.0;
    for (TypeIndex k = 0; k < g.types(); ++k)
      expected += g.population.weight(k) * std::abs(g.scores(i, k) - g.scores(j, k));
    const double sum = deviation_advantage(g, {i, j}, 0) + deviation_advantage(g, {j, i}, 0);
    CHECK(std::abs(sum - expected) < 1e-12);
  }
}
