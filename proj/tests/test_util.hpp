#pragma once

#include <cmath>
#include <random>

#include "pm/types.hpp"

namespace pm::test {

// Random game with M, N, K drawn up to the given caps and scores in [0, 1].
inline GameSpec random_game(std::mt19937_64& rng, std::size_t max_m = 6, std::size_t max_n = 4,
                            std::size_t max_k = 6, bool softmax = false) {
  std::uniform_int_distribution<std::size_t> dm(1, max_m), dn(1, max_n), dk(1, max_k);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t m = dm(rng), n = dn(rng), k = dk(rng);
  std::vector<std::vector<double>> rows(m, std::vector<double>(k));
  for (auto& r : rows)
    for (auto& v : r) v = u(rng);
  std::vector<double> w(k);
  double total = 0.0;
  for (auto& v : w) total += (v = 0.05 + u(rng));
  for (auto& v : w) v /= total;
  ChoiceRule rule = ChoiceRule::hardmax();
  if (softmax) rule = ChoiceRule::softmax(std::exp(std::uniform_real_distribution<double>(-4, 1)(rng)));
  return GameSpec(ScoreMatrix(rows), UserPopulation({}, w), n, rule);
}

inline StrategyProfile random_profile(std::mt19937_64& rng, const GameSpec& spec) {
  std::uniform_int_distribution<ModelIndex> d(0, spec.models() - 1);
  StrategyProfile p;
  for (std::size_t i = 0; i < spec.n_platforms; ++i) p.choices.push_back(d(rng));
  return p;
}

}  // namespace pm::test
