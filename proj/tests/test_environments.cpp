#include <doctest.h>

#include <cmath>

#include "pm/environments.hpp"

using namespace pm;

TEST_CASE("rbf scores") {
  const std::vector<RbfModelSpec> one{{0.1, {{{1.0, 2.0}, 0.5, 0.3}}}};
  CHECK(rbf_scores(one, {{1.0, 2.0}})(0, 0) == doctest::Approx(0.6));
  CHECK(rbf_scores(one, {{1e6, 0.0}})(0, 0) == doctest::Approx(0.1));
  const std::vector<RbfModelSpec> big{{0.9, {{{0.0}, 0.5, 1.0}}}};
  CHECK(rbf_scores(big, {{0.0}})(0, 0) == 1.0);
  const auto models = synthetic_rbf_models();
  REQUIRE(models.size() == 6);
  CHECK(rbf_scores(models, {{0.0, 0.0}})(1, 0) == 1.0);
  // off-center: b + A exp(-d^2 / (2 s^2))
  const double d2 = 0.25;
  CHECK(rbf_scores(models, {{0.5, 0.0}})(1, 0) ==
        doctest::Approx(0.05 + 1.30 * std::exp(-d2 / (2 * 0.35 * 0.35))));
}

TEST_CASE("gmm population") {
  GmmPopulationSpec single;
  single.components = {{1.0, {0.0, 0.0}, {{1.0, 0.0}, {0.0, 1.0}}}};
  single.k_types = 1;
  const auto p1 = gmm_population(single);
  REQUIRE(p1.population.size() == 1);
  CHECK(p1.population.weight(0) == doctest::Approx(1.0));

  GmmPopulationSpec two;
  two.components = {{0.6, {0.0, 0.0}, {{0.25, 0.0}, {0.0, 0.25}}},
                    {0.4, {10.0, 0.0}, {{0.25, 0.0}, {0.0, 0.25}}}};
  two.k_types = 2;
  two.seed = 3;
  const auto p2 = gmm_population(two);
  const std::size_t left = p2.anchors[0][0] < p2.anchors[1][0] ? 0 : 1;
  CHECK(std::abs(p2.population.weight(left) - 0.6) <= 0.02);
  CHECK(std::abs(p2.population.weight(1 - left) - 0.4) <= 0.02);
}

TEST_CASE("shift translates every anchor under a fixed seed") {
  const auto base = gmm_population(synthetic_gmm_spec(0.0, 0.6, 7));
  const auto moved = gmm_population(synthetic_gmm_spec(1.5, 0.6, 7));
  REQUIRE(base.anchors.size() == moved.anchors.size());
  for (std::size_t k = 0; k < base.anchors.size(); ++k) {
    CHECK(moved.anchors[k][0] - base.anchors[k][0] == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(moved.anchors[k][1] == doctest::Approx(base.anchors[k][1]).epsilon(1e-9));
    CHECK(moved.population.weight(k) == base.population.weight(k));
  }
}

TEST_CASE("gmm population is deterministic per seed") {
  const auto a = gmm_population(synthetic_gmm_spec(0.0, 0.6, 7));
  const auto b = gmm_population(synthetic_gmm_spec(0.0, 0.6, 7));
  CHECK(a.anchors == b.anchors);
  CHECK(a.population.weights() == b.population.weights());
  const auto c = gmm_population(synthetic_gmm_spec(0.0, 0.6, 8));
  CHECK(a.anchors != c.anchors);
}

TEST_CASE("gmm spec validation") {
  GmmPopulationSpec bad;
  bad.components = {{0.5, {0.0}, {{1.0}}}};
  CHECK_THROWS(gmm_population(bad));
  GmmPopulationSpec zero_k;
  zero_k.components = {{1.0, {0.0}, {{1.0}}}};
  zero_k.k_types = 0;
  CHECK_THROWS(gmm_population(zero_k));
}

TEST_CASE("scores from preferences") {
  const std::vector<std::vector<double>> perf{{0.8320, 0.5, 0.3989, 0.4955, 0.7265}};
  PreferenceTable prefs{{"HEval", "Multi", "Overall", "Math", "IFEval"},
                        {"A", "E", "Z"},
                        {{0.6, 0.0, 0.2, 0.0, 0.2}, {0.0, 0.0, 0.0, 1.0, 0.0}, {0, 0, 0, 0, 0}}};
  const auto s = scores_from_preferences(perf, prefs, false);
  CHECK(s(0, 0) == doctest::Approx(0.6 * 0.8320 + 0.2 * 0.3989 + 0.2 * 0.7265).epsilon(1e-12));
  CHECK(s(0, 0) == doctest::Approx(0.72428).epsilon(1e-12));
  CHECK(s(0, 1) == doctest::Approx(0.4955));
  CHECK(s(0, 2) == 0.0);
  PreferenceTable dbl{{"a", "b"}, {"t"}, {{1.0, 1.0}}};
  CHECK(scores_from_preferences({{0.4, 0.6}}, dbl, true)(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("synthetic instance") {
  const auto g = synthetic_instance();
  CHECK(g.models() == 6);
  CHECK(g.types() == 12);
  CHECK(g.n_platforms == 3);
  for (const auto& row : g.scores.rows())
    for (double v : row) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
}
