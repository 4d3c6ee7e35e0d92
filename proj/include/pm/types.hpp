#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace pm {

using ModelIndex = std::size_t;
using PlatformIndex = std::size_t;
using TypeIndex = std::size_t;

// Error hierarchy. Every library failure derives from MarketError so callers
// can catch one type at the boundary.
struct MarketError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidProfileError : MarketError {
  using MarketError::MarketError;
};
struct InvalidParameterError : MarketError {
  using MarketError::MarketError;
};
struct InvalidInputError : MarketError {
  using MarketError::MarketError;
};
struct BudgetExceededError : MarketError {
  BudgetExceededError(const std::string& what, std::uint64_t required,
                      std::uint64_t budget)
      : MarketError(what), required(required), budget(budget) {}
  std::uint64_t required;
  std::uint64_t budget;
};

/// Finite population of user types with probabilities.
class UserPopulation {
 public:
  UserPopulation() = default;
  UserPopulation(std::vector<std::string> labels, std::vector<double> weights);

  /// Uniform weights over `count` types labelled t1..tK.
  static UserPopulation uniform(std::size_t count);

  std::size_t size() const { return weights_.size(); }
  double weight(TypeIndex k) const { return weights_[k]; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<std::string> labels_;
  std::vector<double> weights_;
};

/// Per-model, per-type expected quality S_j(theta). Rows are models.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  ScoreMatrix(std::vector<std::vector<double>> rows,
              std::vector<std::string> model_labels = {});

  std::size_t models() const { return rows_.size(); }
  std::size_t types() const { return rows_.empty() ? 0 : rows_.front().size(); }
  double operator()(ModelIndex j, TypeIndex k) const { return rows_[j][k]; }
  const std::vector<double>& row(ModelIndex j) const { return rows_[j]; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Copy with every score multiplied by `factor` (> 0).
  ScoreMatrix scaled(double factor) const;
  /// Copy keeping only the first `count` models.
  ScoreMatrix prefix(std::size_t count) const;
  /// Copy with one extra model row appended.
  ScoreMatrix with_row(std::vector<double> row, std::string label) const;

 private:
  std::vector<std::vector<double>> rows_;
  std::vector<std::string> labels_;
};

struct ChoiceRule {
  enum class Kind { hardmax, softmax };
  Kind kind = Kind::hardmax;
  double tau = 0.0;  // softmax temperature, in score units

  static ChoiceRule hardmax() { return {Kind::hardmax, 0.0}; }
  static ChoiceRule softmax(double tau);
  bool is_softmax() const { return kind == Kind::softmax; }
};

/// One platform choice per platform, 0-based model indices.
struct StrategyProfile {
  std::vector<ModelIndex> choices;

  StrategyProfile() = default;
  explicit StrategyProfile(std::vector<ModelIndex> c) : choices(std::move(c)) {}
  StrategyProfile(std::initializer_list<ModelIndex> c) : choices(c) {}

  /// Build from 1-based indices as printed in tables.
  static StrategyProfile from_one_based(const std::vector<std::size_t>& c);

  std::size_t size() const { return choices.size(); }
  ModelIndex operator[](PlatformIndex i) const { return choices[i]; }
  ModelIndex& operator[](PlatformIndex i) { return choices[i]; }

  /// Same profile with platform i switched to model g.
  StrategyProfile with(PlatformIndex i, ModelIndex g) const;
  /// Sorted copy of the choices (the model multiset).
  std::vector<ModelIndex> multiset() const;
  std::size_t distinct_count() const;

  auto operator<=>(const StrategyProfile&) const = default;
};

/// Renders "(g1,g3)" style, 1-based.
std::string to_string(const StrategyProfile& profile);

/// Probability that each user type picks each platform, N rows by K columns.
struct AllocationMatrix {
  std::vector<std::vector<double>> p;

  std::size_t platforms() const { return p.size(); }
  std::size_t types() const { return p.empty() ? 0 : p.front().size(); }
  double operator()(PlatformIndex i, TypeIndex k) const { return p[i][k]; }
};

/// A complete game instance.
struct GameSpec {
  ScoreMatrix scores;
  UserPopulation population;
  std::size_t n_platforms = 1;
  ChoiceRule choice;

  GameSpec() = default;
  GameSpec(ScoreMatrix s, UserPopulation pop, std::size_t n,
           ChoiceRule rule = ChoiceRule::hardmax());

  std::size_t models() const { return scores.models(); }
  std::size_t types() const { return population.size(); }

  GameSpec with_platforms(std::size_t n) const;
  GameSpec with_choice(ChoiceRule rule) const;
  GameSpec with_scores(ScoreMatrix s) const;

  /// Throws InvalidProfileError unless the profile has N entries in [0, M).
  void check_profile(const StrategyProfile& profile) const;
};

}  // namespace pm
