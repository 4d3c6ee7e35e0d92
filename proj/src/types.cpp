#include "pm/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace pm {

UserPopulation::UserPopulation(std::vector<std::string> labels,
                               std::vector<double> weights)
    : labels_(std::move(labels)), weights_(std::move(weights)) {
  if (weights_.empty()) throw InvalidInputError("population needs at least one type");
  if (labels_.empty()) {
    for (std::size_t k = 0; k < weights_.size(); ++k)
      labels_.push_back("t" + std::to_string(k + 1));
  }
  if (labels_.size() != weights_.size())
    throw InvalidInputError("population labels and weights differ in length");
  if (std::set<std::string>(labels_.begin(), labels_.end()).size() != labels_.size())
    throw InvalidInputError("population type labels must be unique");
  double total = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0)
      throw InvalidInputError("population weights must be finite and non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "population weights must sum to 1 (got " << total << ")";
    throw InvalidInputError(msg.str());
  }
}

UserPopulation UserPopulation::uniform(std::size_t count) {
  return UserPopulation({}, std::vector<double>(count, 1.0 / static_cast<double>(count)));
}

ScoreMatrix::ScoreMatrix(std::vector<std::vector<double>> rows,
                         std::vector<std::string> model_labels)
    : rows_(std::move(rows)), labels_(std::move(model_labels)) {
  if (rows_.empty()) throw InvalidInputError("score matrix needs at least one model");
  const std::size_t k = rows_.front().size();
  if (k == 0) throw InvalidInputError("score matrix needs at least one type column");
  for (const auto& r : rows_) {
    if (r.size() != k) throw InvalidInputError("score matrix rows differ in length");
    for (double s : r)
      if (!std::isfinite(s) || s < 0.0)
        throw InvalidInputError("scores must be finite and non-negative");
  }
  if (labels_.empty()) {
    for (std::size_t j = 0; j < rows_.size(); ++j) labels_.push_back("g" + std::to_string(j + 1));
  }
  if (labels_.size() != rows_.size())
    throw InvalidInputError("score matrix labels and rows differ in length");
}

ScoreMatrix ScoreMatrix::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidParameterError("scale factor must be positive");
  auto rows = rows_;
  for (auto& r : rows)
    for (double& s : r) s *= factor;
  return ScoreMatrix(std::move(rows), labels_);
}

ScoreMatrix ScoreMatrix::prefix(std::size_t count) const {
  if (count == 0 || count > rows_.size())
    throw InvalidParameterError("model prefix size out of range");
  return ScoreMatrix({rows_.begin(), rows_.begin() + static_cast<std::ptrdiff_t>(count)},
                     {labels_.begin(), labels_.begin() + static_cast<std::ptrdiff_t>(count)});
}

ScoreMatrix ScoreMatrix::with_row(std::vector<double> row, std::string label) const {
  auto rows = rows_;
  auto labels = labels_;
  rows.push_back(std::move(row));
  labels.push_back(std::move(label));
  return ScoreMatrix(std::move(rows), std::move(labels));
}

ChoiceRule ChoiceRule::softmax(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw InvalidParameterError("softmax temperature must be positive and finite");
  return {Kind::softmax, tau};
}

StrategyProfile StrategyProfile::from_one_based(const std::vector<std::size_t>& c) {
  StrategyProfile p;
  for (std::size_t v : c) {
    if (v == 0) throw InvalidProfileError("1-based model index must be >= 1");
    p.choices.push_back(v - 1);
  }
  return p;
}

StrategyProfile StrategyProfile::with(PlatformIndex i, ModelIndex g) const {
  StrategyProfile out = *this;
  out.choices.at(i) = g;
  return out;
}

std::vector<ModelIndex> StrategyProfile::multiset() const {
  auto m = choices;
  std::sort(m.begin(), m.end());
  return m;
}

std::size_t StrategyProfile::distinct_count() const {
  auto m = multiset();
  return static_cast<std::size_t>(std::unique(m.begin(), m.end()) - m.begin());
}

std::string to_string(const StrategyProfile& profile) {
  std::string out = "(";
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (i) out += ",";
    out += "g" + std::to_string(profile[i] + 1);
  }
  return out + ")";
}

GameSpec::GameSpec(ScoreMatrix s, UserPopulation pop, std::size_t n, ChoiceRule rule)
    : scores(std::move(s)), population(std::move(pop)), n_platforms(n), choice(rule) {
  if (n_platforms < 1) throw InvalidInputError("game needs at least one platform");
  if (scores.types() != population.size())
    throw InvalidInputError("score matrix type count does not match population");
  if (choice.is_softmax() && !(choice.tau > 0.0))
    throw InvalidParameterError("softmax temperature must be positive");
}

GameSpec GameSpec::with_platforms(std::size_t n) const {
  return GameSpec(scores, population, n, choice);
}

GameSpec GameSpec::with_choice(ChoiceRule rule) const {
  return GameSpec(scores, population, n_platforms, rule);
}

GameSpec GameSpec::with_scores(ScoreMatrix s) const {
  return GameSpec(std::move(s), population, n_platforms, choice);
}

void GameSpec::check_profile(const StrategyProfile& profile) const {
  if (profile.size() != n_platforms) {
    throw InvalidProfileError("profile has " + std::to_string(profile.size()) +
                              " entries, game has " + std::to_string(n_platforms) +
                              " platforms");
  }
  for (ModelIndex g : profile.choices) {
    if (g >= models())
      throw InvalidProfileError("model index " + std::to_string(g + 1) +
                                " out of range (M=" + std::to_string(models()) + ")");
  }
}

}  // namespace pm
