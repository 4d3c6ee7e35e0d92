#include "pm/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "pm/environments.hpp"
#include "pm/equilibrium.hpp"
#include "pm/format.hpp"
#include "pm/game.hpp"
#include "pm/metrics.hpp"

namespace pm {

using nlohmann::json;

namespace {

// Transposes a types-by-models table into model rows.
std::vector<std::vector<double>> model_rows(const std::vector<std::vector<double>>& by_type) {
  std::vector<std::vector<double>> rows(by_type.front().size(),
                                        std::vector<double>(by_type.size()));
  for (std::size_t k = 0; k < by_type.size(); ++k)
    for (std::size_t j = 0; j < by_type[k].size(); ++j) rows[j][k] = by_type[k][j];
  return rows;
}

FixtureCheck check(std::string kind, json args, double tol = 0.0, bool reproducible = true,
                   std::string note = {}) {
  return {std::move(kind), std::move(args), tol, reproducible, std::move(note)};
}

FixtureCheck payoff(std::vector<int> f, std::vector<double> expected, double tol,
                    bool reproducible = true, std::string note = {}) {
  return check("payoff", {{"profile", f}, {"expected", expected}}, tol, reproducible,
               std::move(note));
}

Fixture c1_rps() {
  Fixture fx;
  fx.name = "c1_rps";
  fx.description = "Three models in a rock-paper-scissors arrangement over three equal types; no pure equilibrium.";
  fx.spec = GameSpec(ScoreMatrix(model_rows({{0.2, 0.1, 0.0}, {0.0, 0.2, 0.1}, {0.1, 0.0, 0.2}})),
                     UserPopulation({"A", "B", "C"}, {1.0 / 3, 1.0 / 3, 1.0 / 3}), 2);
  const double tol = 5e-4;
  for (int a = 1; a <= 3; ++a) {
    for (int b = 1; b <= 3; ++b) {
      std::vector<double> e{0.05, 0.05};
      if (b == a % 3 + 1) e = {0.1, 0.067};
      if (a == b % 3 + 1) e = {0.067, 0.1};
      fx.checks.push_back(payoff({a, b}, e, tol));
    }
  }
  fx.checks.push_back(check("pne_set", {{"expected", json::array()}}));
  fx.checks.push_back(check("dynamics", {{"start", {1, 1}}, {"outcome", "cycle"},
                                         {"multisets", {{1, 2}, {1, 3}, {2, 3}}}}));
  return fx;
}

const std::vector<std::vector<double>> kFig2A{{0.90, 0.85}, {0.35, 0.80}};

Fixture fig2_a() {
  Fixture fx;
  fx.name = "fig2_a";
  fx.description = "Two models, two equal types; the weaker-average model survives through differentiation.";
  fx.spec = GameSpec(ScoreMatrix(model_rows(kFig2A)), UserPopulation({"A", "B"}, {0.5, 0.5}), 2);
  const double tol = 1e-9;
  fx.checks = {
      payoff({1, 1}, {0.3125, 0.3125}, tol),
      payoff({1, 2}, {0.45, 0.40}, tol),
      payoff({2, 1}, {0.40, 0.45}, tol),
      payoff({2, 2}, {0.4125, 0.4125}, tol),
      check("average_scores", {{"expected", {0.625, 0.825}}}, tol),
      check("deviation_advantage", {{"profile", {1, 2}}, {"platform", 1}, {"expected", 0.275}}, tol),
      check("deviation_advantage", {{"profile", {1, 2}}, {"platform", 2}, {"expected", -0.025}}, tol),
      check("pne_set", {{"expected", {{1, 2}, {2, 1}}}}),
      check("differentiated_condition", {{"profile", {1, 2}}, {"expected", true}}),
      check("two_player", {{"i", 1}, {"j", 2}, {"differentiated", true},
                           {"homogeneous_i", false}, {"homogeneous_j", false}}),
      check("coverage", {{"profile", {1, 2}}, {"expected", 0.85}}, tol),
      check("equilibrium_welfare", {{"start", {1, 1}}, {"expected", 0.85}}, tol),
  };
  return fx;
}

Fixture fig2_b() {
  Fixture fx;
  fx.name = "fig2_b";
  fx.description = "Same averages as fig2_a, but the stronger model wins both types; the market consolidates.";
  fx.spec = GameSpec(ScoreMatrix(model_rows({{0.60, 0.70}, {0.65, 0.95}})),
                     UserPopulation({"A", "B"}, {0.5, 0.5}), 2);
  const double tol = 1e-9;
  fx.checks = {
      payoff({1, 1}, {0.3125, 0.3125}, tol),
      payoff({1, 2}, {0.0, 0.825}, tol),
      payoff({2, 1}, {0.825, 0.0}, tol),
      payoff({2, 2}, {0.4125, 0.4125}, tol),
      check("average_scores", {{"expected", {0.625, 0.825}}}, tol),
      check("deviation_advantage", {{"profile", {1, 2}}, {"platform", 1}, {"expected", -0.625}}, tol),
      check("deviation_advantage", {{"profile", {1, 2}}, {"platform", 2}, {"expected", 0.825}}, tol),
      check("pne_set", {{"expected", {{2, 2}}}}),
      check("differentiated_condition", {{"profile", {1, 2}}, {"expected", false}}),
      check("homogeneous_condition", {{"model", 2}, {"expected", true}}),
      check("two_player", {{"i", 1}, {"j", 2}, {"differentiated", false},
                           {"homogeneous_i", false}, {"homogeneous_j", true}}),
  };
  return fx;
}

Fixture fig3_b() {
  Fixture fx;
  fx.name = "fig3_b";
  fx.description = "fig2_a plus a uniformly strong third model; the unique equilibrium becomes homogeneous and welfare drops.";
  auto table = kFig2A;
  table[0].push_back(0.91);
  table[1].push_back(0.77);
  fx.spec = GameSpec(ScoreMatrix(model_rows(table)), UserPopulation({"A", "B"}, {0.5, 0.5}), 2);
  const double tol = 1e-9;
  fx.checks = {
      payoff({1, 3}, {0.0, 0.84}, tol),
      payoff({2, 3}, {0.40, 0.455}, tol),
      payoff({3, 2}, {0.455, 0.40}, tol),
      payoff({3, 3}, {0.42, 0.42}, tol),
      payoff({2, 1}, {0.45, 0.40}, tol, false,
             "reference lists the (g1,g2) entry here; the scores give (0.40, 0.45)"),
      check("average_scores", {{"expected", {0.625, 0.825, 0.84}}}, tol),
      check("deviation_advantage", {{"profile", {1, 3}}, {"platform", 1}, {"expected", -0.625}}, tol),
      check("deviation_advantage", {{"profile", {2, 3}}, {"platform", 1}, {"expected", -0.025}}, tol),
      check("deviation_advantage", {{"profile", {3, 2}}, {"platform", 1}, {"expected", 0.07}}, tol),
      check("deviation_advantage", {{"profile", {3, 1}}, {"platform", 1}, {"expected", 1.68}}, tol,
            false, "reference halves a sum of 1.68 but reports 1.68; the value is 0.84"),
      check("pne_set", {{"expected", {{3, 3}}}}),
      check("homogeneous_condition", {{"model", 3}, {"expected", true}}),
      check("coverage", {{"profile", {3, 3}}, {"expected", 0.84}}, tol),
      check("equilibrium_welfare", {{"start", {1, 1}}, {"expected", 0.84}}, tol),
  };
  return fx;
}

Fixture c7_welfare_gap() {
  Fixture fx;
  fx.name = "c7_welfare_gap";
  fx.description = "Three models, three unequal types; the differentiated equilibrium falls short of the best pair.";
  fx.spec = GameSpec(ScoreMatrix(model_rows({{0.434, 0.698, 0.760},
                                             {0.828, 0.679, 0.431},
                                             {0.343, 0.776, 0.565}})),
                     UserPopulation({"A", "B", "C"}, {0.5, 0.3, 0.2}), 2);
  const double tol = 1e-4;
  auto delta = [&](int a, int b, double v) {
    return check("deviation_advantage", {{"profile", {a, b}}, {"platform", 1}, {"expected", v}}, tol);
  };
  fx.checks = {
      check("average_scores", {{"expected", {0.534, 0.7079, 0.6223}}}, tol),
      delta(1, 2, -0.0372), delta(2, 1, 0.3005), delta(1, 3, -0.0372),
      delta(3, 1, 0.3637), delta(2, 3, 0.0099), delta(3, 2, 0.1377),
      payoff({1, 1}, {0.267, 0.267}, tol),
      payoff({1, 2}, {0.2484, 0.5042}, tol),
      payoff({2, 2}, {0.35395, 0.35395}, tol),
      payoff({2, 3}, {0.3589, 0.38}, tol),
      payoff({3, 3}, {0.31115, 0.31115}, tol),
      payoff({1, 3}, {0.2484, 0.5112}, tol, false,
             "second entry is not reproducible; the scores give 0.493"),
      check("coverage", {{"profile", {1, 2}}, {"expected", 0.7526}}, tol),
      check("coverage", {{"profile", {1, 3}}, {"expected", 0.7414}}, tol),
      check("coverage", {{"profile", {2, 3}}, {"expected", 0.7389}}, tol),
      check("pne_contains", {{"profile", {2, 3}}}),
      check("pne_set", {{"expected", {{2, 3}, {3, 2}}}}),
      check("differentiated_condition", {{"profile", {2, 3}}, {"expected", true}}),
      check("equilibrium_welfare", {{"start", {2, 3}}, {"expected", 0.7389}}, 1e-3),
      check("social_optimum", {{"expected", 0.7526}, {"profile", {1, 2}}}, 1e-3),
  };
  return fx;
}

GameSpec c8_game(std::size_t n) {
  return GameSpec(
      ScoreMatrix(model_rows({
          {0.030658748, 0.208093837, 0.32744655, 0.298774868, 0.154842913, 0.020151094},
          {0.021978186, 0.149636775, 0.298145086, 0.274754494, 0.092761844, 0.014372437},
          {0.266589463, 0.035725005, 0.019578686, 0.029395873, 0.04788997, 0.182804301},
          {0.171553999, 0.007992042, 0.007932614, 0.019235272, 0.067757338, 0.160182327},
          {0.039888468, 0.145473659, 0.077957489, 0.078738138, 0.110034101, 0.019024562},
          {0.131100401, 0.089481771, 0.136355415, 0.132456332, 0.095638528, 0.136379898},
      })),
      UserPopulation({"A", "B", "C", "D", "E", "F"}, {0.18, 0.17, 0.16, 0.16, 0.17, 0.16}), n);
}

Fixture c8_players_2() {
  Fixture fx;
  fx.name = "c8_players_2";
  fx.description = "Six models, six types, two platforms; a differentiated equilibrium exists.";
  fx.spec = c8_game(2);
  fx.checks = {
      check("pne_set", {{"expected", {{3, 6}, {6, 3}}}}),
      check("coverage", {{"profile", {3, 6}}, {"expected", 0.2148}}, 5e-4, false,
            "the equilibrium (g3,g6) covers 0.199576; 0.2148 is the coverage of (g1,g3)"),
      check("coverage", {{"profile", {1, 3}}, {"expected", 0.2148}}, 5e-4),
      check("coverage", {{"profile", {3, 6}}, {"expected", 0.199576}}, 5e-6),
  };
  return fx;
}

Fixture c8_players_3() {
  Fixture fx;
  fx.name = "c8_players_3";
  fx.description = "The c8_players_2 market with a third platform; best responses cycle.";
  fx.spec = c8_game(3);
  fx.checks = {
      check("pne_set", {{"expected", json::array()}}),
      check("dynamics", {{"start", {1, 1, 1}}, {"outcome", "cycle"},
                         {"multisets", {{1, 3, 3}, {3, 3, 6}, {1, 3, 6}}}}),
      check("cycle_welfare_range", {{"start", {1, 1, 1}}, {"lo", 0.209}, {"hi", 0.212}}),
      check("coverage", {{"profile", {3, 3, 1}}, {"expected", 0.2147}}, 5e-4),
      check("coverage", {{"profile", {3, 3, 6}}, {"expected", 0.2148}}, 5e-4, false,
            "(g3,g3,g6) covers 0.199576; the reference swaps it with (g1,g3,g6)"),
      check("coverage", {{"profile", {1, 3, 6}}, {"expected", 0.199571}}, 5e-4, false,
            "(g1,g3,g6) covers 0.2148; the reference swaps it with (g3,g3,g6)"),
  };
  return fx;
}

Fixture c9_softmax() {
  Fixture fx;
  fx.name = "c9_softmax";
  fx.description = "Three models, two equal types, softmax choice at temperature 0.1; no pure equilibrium.";
  fx.spec = GameSpec(ScoreMatrix(model_rows({{0.734, 0.148, 0.934}, {0.833, 0.935, 0.543}})),
                     UserPopulation({"A", "B"}, {0.5, 0.5}), 2, ChoiceRule::softmax(0.1));
  fx.notes.push_back(
      "S_3(B) is stored as 0.543; the reference score table reads 0.534, but only 0.543 "
      "reproduces the reference payoff matrix (T_3 = 0.7385 gives 0.36925 on the diagonal)");
  fx.extra = {{"reference_score_g3_B", 0.534}};
  const double tol = 5e-5;
  fx.checks = {
      payoff({1, 1}, {0.39175, 0.39175}, tol),
      payoff({1, 2}, {0.47634, 0.34381}, tol),
      payoff({1, 3}, {0.43853, 0.42549}, tol),
      payoff({2, 1}, {0.34381, 0.4763}, tol),
      payoff({2, 2}, {0.27075, 0.27075}, tol),
      payoff({2, 3}, {0.45843, 0.47210}, tol),
      payoff({3, 1}, {0.42549, 0.43853}, tol),
      payoff({3, 2}, {0.47210, 0.45843}, tol),
      payoff({3, 3}, {0.36925, 0.36925}, tol),
      check("pne_set", {{"expected", json::array()}}),
      check("social_optimum", {{"expected", 0.9345}, {"profile", {2, 3}}}, 1e-9),
      check("dynamics", {{"start", {3, 1}}, {"outcome", "cycle"},
                         {"multisets", {{1, 3}, {2, 3}, {1, 2}}}}),
      check("cycle_welfare", {{"start", {3, 1}}, {"expected", 0.87067}}, tol, false,
            "reference averages 0.8835, 0.9345 and 0.835 to 0.87067; the mean of the visited "
            "coverages is 0.8842"),
  };
  return fx;
}

const std::vector<std::vector<double>> kLlmPerformance{
    {0.5079, 0.4297, 0.1721, 0.0413, 0.4604},
    {0.5710, 0.6497, 0.3326, 0.3089, 0.4363},
    {0.8723, 0.6688, 0.1237, 0.4007, 0.4007},
    {0.8320, 0.7723, 0.3989, 0.4955, 0.7265},
};

PreferenceTable llm_preferences() {
  return {{"HEval", "Multi", "Overall", "Math", "IFEval"},
          {"A", "B", "C", "D", "E"},
          {{0.6, 0.0, 0.2, 0.0, 0.2},
           {0.0, 0.0, 0.8, 0.0, 0.2},
           {0.8, 0.0, 0.0, 0.0, 0.2},
           {0.5, 0.5, 0.0, 0.0, 0.0},
           {0.0, 0.0, 0.0, 1.0, 0.0}}};
}

Fixture llm_pool(const std::string& name, std::vector<double> raw_weights) {
  Fixture fx;
  fx.name = name;
  const double sum = [&] {
    double s = 0.0;
    for (double w : raw_weights) s += w;
    return s;
  }();
  std::vector<double> weights = raw_weights;
  for (double& w : weights) w /= sum;
  auto scores = scores_from_preferences(kLlmPerformance, llm_preferences(), false,
                                        {"M0", "M1", "M2", "M3"});
  fx.spec = GameSpec(std::move(scores), UserPopulation({"A", "B", "C", "D", "E"}, weights), 3);
  fx.notes.push_back(
      "type D preferences are stored as HEval 0.5, Multi 0.5; the reference lists (0.6, 0.5), "
      "which does not sum to 1 and does not reproduce the reference welfare of pool 1");
  fx.extra = {{"performance", kLlmPerformance},
              {"criteria", llm_preferences().criteria},
              {"preferences", llm_preferences().weights},
              {"reference_type_d", {0.6, 0.5}},
              {"raw_pool_weights", raw_weights}};
  return fx;
}

Fixture llm_pool1() {
  auto fx = llm_pool("llm_pool1", {0.2, 0.2, 0.2, 0.2, 0.2});
  fx.description = "Four coding models scored by five preference types, uniform pool, three platforms.";
  fx.checks = {
      check("score", {{"model", 4}, {"type", 1}, {"expected", 0.72428}}, 1e-9),
      check("score", {{"model", 4}, {"type", 5}, {"expected", 0.4955}}, 1e-9),
      check("pne_set", {{"expected", {{4, 4, 4}}}}),
      check("shares", {{"profile", {4, 4, 4}}, {"hhi", 1.0 / 3.0}, {"support", 1}}, 1e-4),
      check("coverage", {{"profile", {4, 4, 4}}, {"expected", 0.65945}}, 1e-4),
      check("equilibrium_welfare", {{"start", {1, 1, 1}}, {"expected", 0.65945}}, 1e-4),
  };
  return fx;
}

Fixture llm_pool2() {
  auto fx = llm_pool("llm_pool2", {0.1, 0.1, 0.2, 0.5, 0.1});
  fx.description = "llm_pool1 models with a pool weighted toward type D.";
  const std::string dominated =
      "M3 scores above M2 for every type, so no platform holding M2 is at a best response";
  fx.checks = {
      check("pne_set", {{"expected", {{4, 4, 4}}}}),
      check("pne_contains", {{"profile", {4, 3, 3}}}, 0.0, false, dominated),
      check("shares", {{"profile", {4, 3, 3}}, {"hhi", 0.375}, {"support", 2}}, 1e-4, false,
            "M3 wins every type at (M3,M2,M2), so its platform holds the whole market"),
      check("coverage", {{"profile", {4, 3, 3}}, {"expected", 0.75949}}, 1e-4, false,
            "coverage at (M3,M2,M2) equals T(M3) = 0.731675"),
  };
  return fx;
}

Fixture llm_pool3() {
  auto fx = llm_pool("llm_pool3", {0.35, 0.2, 0.2, 0.35, 0.2});
  fx.description = "llm_pool1 models with the reference pool weights (sum 1.3) normalized.";
  fx.notes.push_back("pool weights are normalized by their sum 1.3; raw_pool_weights keeps the originals");
  const std::string dominated =
      "M3 scores above M2 for every type, so no platform holding M2 is at a best response";
  fx.checks = {
      check("pne_set", {{"expected", {{4, 4, 4}}}}),
      check("coverage", {{"profile", {4, 4, 4}}, {"expected", 0.6834}}, 1e-4),
      check("pne_contains", {{"profile", {4, 4, 3}}}, 0.0, false, dominated),
      check("shares", {{"profile", {4, 4, 3}}, {"hhi", 0.33375}, {"support", 2}}, 1e-4, false,
            "M3 wins every type at (M3,M3,M2); shares are (0.5, 0.5, 0)"),
      check("coverage", {{"profile", {4, 4, 3}}, {"expected", 0.7308}}, 1e-4, false,
            "coverage at (M3,M3,M2) equals T(M3) under either weight reading"),
  };
  return fx;
}

Fixture simu_appendix_d() {
  Fixture fx;
  fx.name = "simu_appendix_d";
  fx.description = "Six RBF score functions over 12 types discretized from a two-component mixture (shift 0, weights 0.6/0.4, seed 7), three platforms.";
  fx.spec = synthetic_instance(0.0, 0.6, 7, 3);
  fx.extra = {{"shift", 0.0}, {"major_weight", 0.6}, {"seed", 7}, {"k_types", 12}};
  fx.checks = {
      check("score_range", {{"lo", 0.0}, {"hi", 1.0}}),
      check("dynamics", {{"start", {1, 1, 1}}, {"outcome", "any"}}),
      check("welfare_bound", {{"start", {1, 1, 1}}}),
  };
  return fx;
}

const std::map<std::string, std::function<Fixture()>>& registry() {
  static const std::map<std::string, std::function<Fixture()>> r{
      {"c1_rps", c1_rps},
      {"fig2_a", fig2_a},
      {"fig2_b", fig2_b},
      {"fig3_b", fig3_b},
      {"c7_welfare_gap", c7_welfare_gap},
      {"c8_players_2", c8_players_2},
      {"c8_players_3", c8_players_3},
      {"c9_softmax", c9_softmax},
      {"llm_pool1", llm_pool1},
      {"llm_pool2", llm_pool2},
      {"llm_pool3", llm_pool3},
      {"simu_appendix_d", simu_appendix_d},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names{
      "c1_rps",       "fig2_a",       "fig2_b",     "fig3_b",    "c7_welfare_gap", "c8_players_2",
      "c8_players_3", "c9_softmax",   "llm_pool1",  "llm_pool2", "llm_pool3",      "simu_appendix_d"};
  return names;
}

Fixture builtin_fixture(const std::string& name) {
  const auto& r = registry();
  auto it = r.find(name);
  if (it == r.end()) throw UnknownFixtureError("unknown fixture '" + name + "'");
  return it->second();
}

GameSpec builtin_instance(const std::string& name) { return builtin_fixture(name).spec; }

json game_to_json(const GameSpec& spec) {
  json j;
  j["models"] = spec.scores.labels();
  j["types"] = spec.population.labels();
  j["weights"] = spec.population.weights();
  j["scores"] = spec.scores.rows();
  j["n_platforms"] = spec.n_platforms;
  j["choice"] = {{"kind", spec.choice.is_softmax() ? "softmax" : "hardmax"},
                 {"tau", spec.choice.tau}};
  return j;
}

GameSpec game_from_json(const json& j) {
  try {
    ChoiceRule rule = ChoiceRule::hardmax();
    if (j.contains("choice")) {
      const std::string kind = j.at("choice").value("kind", "hardmax");
      if (kind == "softmax")
        rule = ChoiceRule::softmax(j.at("choice").at("tau").get<double>());
      else if (kind != "hardmax")
        throw InvalidInputError("choice kind must be hardmax or softmax, got '" + kind + "'");
    }
    std::vector<std::string> models = j.value("models", std::vector<std::string>{});
    std::vector<std::string> types = j.value("types", std::vector<std::string>{});
    return GameSpec(ScoreMatrix(j.at("scores").get<std::vector<std::vector<double>>>(), models),
                    UserPopulation(types, j.at("weights").get<std::vector<double>>()),
                    j.at("n_platforms").get<std::size_t>(), rule);
  } catch (const json::exception& e) {
    throw InvalidInputError(std::string("malformed game description: ") + e.what());
  }
}

json fixture_to_json(const Fixture& fixture) {
  json j;
  j["name"] = fixture.name;
  j["description"] = fixture.description;
  j["game"] = game_to_json(fixture.spec);
  j["checks"] = json::array();
  for (const auto& c : fixture.checks) {
    json cj = c.args;
    cj["kind"] = c.kind;
    cj["tolerance"] = c.tolerance;
    cj["reproducible"] = c.reproducible;
    if (!c.note.empty()) cj["note"] = c.note;
    j["checks"].push_back(cj);
  }
  j["notes"] = fixture.notes;
  j["extra"] = fixture.extra;
  return j;
}

Fixture fixture_from_json(const json& j) {
  try {
    Fixture fx;
    fx.name = j.at("name").get<std::string>();
    fx.description = j.value("description", "");
    fx.spec = game_from_json(j.at("game"));
    for (const auto& cj : j.at("checks")) {
      FixtureCheck c;
      c.kind = cj.at("kind").get<std::string>();
      c.tolerance = cj.value("tolerance", 0.0);
      c.reproducible = cj.value("reproducible", true);
      c.note = cj.value("note", "");
      c.args = cj;
      for (const char* key : {"kind", "tolerance", "reproducible", "note"}) c.args.erase(key);
      fx.checks.push_back(std::move(c));
    }
    fx.notes = j.value("notes", std::vector<std::string>{});
    fx.extra = j.value("extra", json::object());
    return fx;
  } catch (const json::exception& e) {
    throw InvalidInputError(std::string("malformed fixture: ") + e.what());
  }
}

std::string to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::pass: return "PASS";
    case CheckStatus::fail: return "FAIL";
    case CheckStatus::known_discrepancy: return "KNOWN-DISCREPANCY";
    case CheckStatus::unexpected_match: return "UNEXPECTED-MATCH";
  }
  return "FAIL";
}

namespace {

StrategyProfile profile_arg(const json& v) {
  return StrategyProfile::from_one_based(v.get<std::vector<std::size_t>>());
}

std::string profiles_str(const std::vector<StrategyProfile>& ps) {
  std::string out = "{";
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i) out += ",";
    out += to_string(ps[i]);
  }
  return out + "}";
}

std::string multisets_str(const std::vector<std::vector<ModelIndex>>& ms) {
  std::vector<StrategyProfile> ps;
  for (const auto& m : ms) ps.emplace_back(m);
  return profiles_str(ps);
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

struct Outcome {
  bool passed = false;
  std::string expected;
  std::string actual;
};

DynamicsOutcome dynamics_from(const GameSpec& spec, const json& args) {
  return run_dynamics(spec, profile_arg(args.at("start")));
}

Outcome evaluate(const GameSpec& spec, const FixtureCheck& c) {
  const json& a = c.args;
  const double tol = c.tolerance;
  Outcome o;
  if (c.kind == "payoff") {
    const auto u = platform_utilities(spec, profile_arg(a.at("profile")));
    const auto e = a.at("expected").get<std::vector<double>>();
    o.passed = u.size() == e.size();
    for (std::size_t i = 0; o.passed && i < u.size(); ++i) o.passed = close(u[i], e[i], tol);
    o.expected = fmt_vec(e);
    o.actual = fmt_vec(u);
  } else if (c.kind == "average_scores") {
    const auto t = average_scores(spec);
    const auto e = a.at("expected").get<std::vector<double>>();
    o.passed = t.size() == e.size();
    for (std::size_t i = 0; o.passed && i < t.size(); ++i) o.passed = close(t[i], e[i], tol);
    o.expected = fmt_vec(e);
    o.actual = fmt_vec(t);
  } else if (c.kind == "deviation_advantage") {
    const auto f = profile_arg(a.at("profile"));
    const std::size_t i = a.at("platform").get<std::size_t>() - 1;
    const double d = spec.choice.is_softmax() ? deviation_advantage_soft(spec, f, i)
                                              : deviation_advantage(spec, f, i);
    const double e = a.at("expected").get<double>();
    o.passed = close(d, e, tol);
    o.expected = fmt_num(e);
    o.actual = fmt_num(d);
  } else if (c.kind == "pne_set") {
    std::vector<StrategyProfile> expected;
    for (const auto& p : a.at("expected")) expected.push_back(profile_arg(p));
    std::sort(expected.begin(), expected.end());
    std::vector<StrategyProfile> got;
    for (const auto& e : enumerate_pne(spec)) got.push_back(e.profile);
    o.passed = got == expected;
    o.expected = profiles_str(expected);
    o.actual = profiles_str(got);
  } else if (c.kind == "pne_contains") {
    const auto f = profile_arg(a.at("profile"));
    const auto chk = verify_pne(spec, f);
    o.passed = chk.is_pne;
    o.expected = to_string(f) + " is a PNE";
    o.actual = chk.is_pne ? "PNE"
                          : "not a PNE: platform " + std::to_string(chk.witness->platform + 1) +
                                " gains " + fmt_num(chk.witness->gain) + " by switching to g" +
                                std::to_string(chk.witness->model + 1);
  } else if (c.kind == "coverage") {
    const double v = coverage_value(spec, profile_arg(a.at("profile")));
    const double e = a.at("expected").get<double>();
    o.passed = close(v, e, tol);
    o.expected = fmt_num(e);
    o.actual = fmt_num(v);
  } else if (c.kind == "social_optimum") {
    const auto opt = social_optimum(spec);
    const double e = a.at("expected").get<double>();
    o.passed = close(opt.value, e, tol);
    o.expected = fmt_num(e);
    o.actual = fmt_num(opt.value) + " at " + to_string(opt.profile);
    if (a.contains("profile")) {
      const auto ep = profile_arg(a.at("profile"));
      o.passed = o.passed && opt.profile.multiset() == ep.multiset();
      o.expected += " at " + to_string(ep);
    }
  } else if (c.kind == "equilibrium_welfare") {
    const auto out = dynamics_from(spec, a);
    const double e = a.at("expected").get<double>();
    o.expected = "equilibrium with W=" + fmt_num(e);
    if (out.kind != OutcomeKind::equilibrium) {
      o.actual = to_string(out.kind);
    } else {
      const double w = user_welfare(spec, out).welfare;
      o.passed = close(w, e, tol);
      o.actual = "equilibrium " + to_string(*out.equilibrium_profile) + " with W=" + fmt_num(w);
    }
  } else if (c.kind == "dynamics") {
    const auto out = dynamics_from(spec, a);
    const std::string kind = a.at("outcome").get<std::string>();
    o.passed = kind == "any" ? out.kind != OutcomeKind::timeout : to_string(out.kind) == kind;
    o.expected = kind;
    o.actual = to_string(out.kind);
    if (a.contains("multisets")) {
      std::vector<std::vector<ModelIndex>> want;
      for (const auto& m : a.at("multisets")) want.push_back(profile_arg(m).multiset());
      const auto have = out.cycle_multisets();
      for (const auto& m : want)
        if (std::find(have.begin(), have.end(), m) == have.end()) o.passed = false;
      o.expected += " visiting " + multisets_str(want);
      o.actual += " visiting " + multisets_str(have);
    }
  } else if (c.kind == "cycle_welfare_range") {
    const auto out = dynamics_from(spec, a);
    const double lo = a.at("lo").get<double>();
    const double hi = a.at("hi").get<double>();
    o.expected = "cycle welfare in [" + fmt_num(lo) + "," + fmt_num(hi) + "] under both averages";
    if (out.kind != OutcomeKind::cycle) {
      o.actual = to_string(out.kind);
    } else {
      const auto w = user_welfare(spec, out);
      o.passed = w.welfare >= lo && w.welfare <= hi && w.multiset_average >= lo &&
                 w.multiset_average <= hi;
      o.actual = "profile mean " + fmt_num(w.welfare) + ", multiset mean " +
                 fmt_num(w.multiset_average);
    }
  } else if (c.kind == "cycle_welfare") {
    const auto out = dynamics_from(spec, a);
    const double e = a.at("expected").get<double>();
    o.expected = "cycle welfare " + fmt_num(e);
    if (out.kind != OutcomeKind::cycle) {
      o.actual = to_string(out.kind);
    } else {
      const auto w = user_welfare(spec, out);
      o.passed = close(w.welfare, e, tol);
      o.actual = "profile mean " + fmt_num(w.welfare) + ", multiset mean " +
                 fmt_num(w.multiset_average);
    }
  } else if (c.kind == "shares") {
    const auto m = market_shares(spec, profile_arg(a.at("profile")));
    const double hhi = a.at("hhi").get<double>();
    const auto support = a.at("support").get<std::size_t>();
    o.passed = close(m.hhi, hhi, tol) && m.support == support;
    o.expected = "hhi " + fmt_num(hhi) + ", support " + std::to_string(support);
    o.actual = "hhi " + fmt_num(m.hhi) + ", support " + std::to_string(m.support) + ", shares " +
               fmt_vec(m.shares);
  } else if (c.kind == "differentiated_condition") {
    const bool got = check_differentiated_condition(spec, profile_arg(a.at("profile"))).holds;
    const bool e = a.at("expected").get<bool>();
    const bool direct = verify_pne(spec, profile_arg(a.at("profile"))).is_pne;
    o.passed = got == e && got == direct;
    o.expected = e ? "holds" : "fails";
    o.actual = std::string(got ? "holds" : "fails") + ", verify_pne " + (direct ? "true" : "false");
  } else if (c.kind == "homogeneous_condition") {
    const std::size_t m = a.at("model").get<std::size_t>() - 1;
    const bool got = check_homogeneous_condition(spec, m).holds;
    const bool e = a.at("expected").get<bool>();
    const bool direct =
        verify_pne(spec, StrategyProfile(std::vector<ModelIndex>(spec.n_platforms, m))).is_pne;
    o.passed = got == e && got == direct;
    o.expected = e ? "holds" : "fails";
    o.actual = std::string(got ? "holds" : "fails") + ", verify_pne " + (direct ? "true" : "false");
  } else if (c.kind == "two_player") {
    const auto r = two_player_conditions(spec, a.at("i").get<std::size_t>() - 1,
                                         a.at("j").get<std::size_t>() - 1);
    auto render = [](bool d, bool hi, bool hj) {
      return std::string("differentiated=") + (d ? "1" : "0") + " homogeneous_i=" + (hi ? "1" : "0") +
             " homogeneous_j=" + (hj ? "1" : "0");
    };
    const bool d = a.at("differentiated").get<bool>();
    const bool hi = a.at("homogeneous_i").get<bool>();
    const bool hj = a.at("homogeneous_j").get<bool>();
    o.passed = r.differentiated == d && r.homogeneous_i == hi && r.homogeneous_j == hj;
    o.expected = render(d, hi, hj);
    o.actual = render(r.differentiated, r.homogeneous_i, r.homogeneous_j);
  } else if (c.kind == "score") {
    const double s = spec.scores(a.at("model").get<std::size_t>() - 1, a.at("type").get<std::size_t>() - 1);
    const double e = a.at("expected").get<double>();
    o.passed = close(s, e, tol);
    o.expected = fmt_num(e);
    o.actual = fmt_num(s);
  } else if (c.kind == "score_range") {
    const double lo = a.at("lo").get<double>();
    const double hi = a.at("hi").get<double>();
    double mn = spec.scores(0, 0), mx = mn;
    for (const auto& row : spec.scores.rows())
      for (double s : row) {
        mn = std::min(mn, s);
        mx = std::max(mx, s);
      }
    o.passed = mn >= lo && mx <= hi;
    o.expected = "[" + fmt_num(lo) + "," + fmt_num(hi) + "]";
    o.actual = "[" + fmt_num(mn) + "," + fmt_num(mx) + "]";
  } else if (c.kind == "welfare_bound") {
    const auto b = welfare_bound_check(spec, dynamics_from(spec, a));
    o.passed = b.holds;
    o.expected = "W <= W_opt";
    o.actual = "W=" + fmt_num(b.welfare) + ", W_opt=" + fmt_num(b.social_optimum);
  } else {
    throw InvalidInputError("unknown check kind '" + c.kind + "'");
  }
  return o;
}

std::string label_of(const FixtureCheck& c) {
  std::string label = c.kind;
  for (const char* key : {"profile", "start", "platform", "model", "type", "i", "j"}) {
    if (c.args.contains(key)) label += " " + std::string(key) + "=" + c.args.at(key).dump();
  }
  return label;
}

}  // namespace

std::vector<CheckResult> verify_fixture(const Fixture& fixture) {
  std::vector<CheckResult> results;
  for (const auto& c : fixture.checks) {
    CheckResult r;
    r.fixture = fixture.name;
    r.label = label_of(c);
    r.tolerance = c.tolerance;
    r.note = c.note;
    try {
      const auto o = evaluate(fixture.spec, c);
      r.expected = o.expected;
      r.actual = o.actual;
      if (c.reproducible)
        r.status = o.passed ? CheckStatus::pass : CheckStatus::fail;
      else
        r.status = o.passed ? CheckStatus::unexpected_match : CheckStatus::known_discrepancy;
    } catch (const MarketError& e) {
      r.status = CheckStatus::fail;
      r.actual = std::string("error: ") + e.what();
    } catch (const nlohmann::json::exception& e) {
      r.status = CheckStatus::fail;
      r.actual = std::string("malformed check: ") + e.what();
    }
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace pm
