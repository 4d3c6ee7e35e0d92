#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pm/equilibrium.hpp"
#include "pm/metrics.hpp"
#include "pm/types.hpp"

namespace pm {

/// Finite-outcome generator p_phi = softmax(logits).
struct ToyGenerator {
  std::vector<std::string> outcome_labels;
  std::vector<double> logits;

  std::size_t size() const { return logits.size(); }
  std::vector<double> probabilities() const;
  /// Logits log(p); every probability must be positive.
  static ToyGenerator from_distribution(std::vector<std::string> labels,
                                        const std::vector<double>& p);
};

/// r[type][outcome], every entry in [0, 1].
struct RewardTable {
  std::vector<std::vector<double>> r;

  RewardTable() = default;
  explicit RewardTable(std::vector<std::vector<double>> rows);
  std::size_t types() const { return r.size(); }
  std::size_t outcomes() const { return r.empty() ? 0 : r.front().size(); }
};

struct OpponentPool {
  ScoreMatrix incumbents;
  /// Column maxima, recomputed on every call.
  std::vector<double> best_scores() const;
};

struct Dataset {
  std::vector<std::string> attributes;          // U
  std::vector<std::size_t> item_attribute;      // u(x) per outcome
  std::vector<std::vector<double>> preference;  // q[type][attribute]
  std::vector<double> counts;                   // empirical count per outcome

  void validate(std::size_t types) const;
  std::vector<double> empirical() const;
};

struct TrainingConfig {
  double beta = 4.0;
  double gamma = 1.0;
  double lambda = 0.4;
  std::size_t outer_rounds = 5;
  std::size_t inner_epochs = 50;
  std::size_t eval_budget = 2000;
  double learning_rate = 0.05;
  double baseline_decay = 0.9;
  double blend = 0.5;        // resampling inner-fit mixing weight
  bool structured = true;    // resampling through attributes rather than rewards
  bool use_reinforce = false;
  std::size_t reinforce_samples = 2000;
  std::uint64_t seed = 0;

  static TrainingConfig resampling_defaults();
  static TrainingConfig direct_gradient_defaults();
  void validate() const;
};

struct TrainingDivergedError : MarketError {
  TrainingDivergedError(const std::string& what, std::vector<std::vector<double>> trace)
      : MarketError(what), trace(std::move(trace)) {}
  std::vector<std::vector<double>> trace;
};

/// Exact S_phi(theta) for every type.
std::vector<double> exact_scores(const ToyGenerator& gen, const RewardTable& rewards);

std::vector<double> adoption_gate(const std::vector<double>& s_phi, const OpponentPool& pool,
                                  double beta);

double objective_F(const ToyGenerator& gen, const RewardTable& rewards,
                   const UserPopulation& population, const OpponentPool& pool, double beta);

/// Exact gradient of S_phi(theta) with respect to the logits.
std::vector<double> grad_S_exact(const ToyGenerator& gen, const RewardTable& rewards,
                                 TypeIndex type);

/// Pathwise estimator. For a finite-outcome generator the reparameterized
/// gradient reduces to the exact gradient through the distribution, so this
/// returns grad_S_exact. Continuous generators are out of scope.
std::vector<double> grad_S_pathwise(const ToyGenerator& gen, const RewardTable& rewards,
                                    TypeIndex type);

std::vector<double> grad_F_exact(const ToyGenerator& gen, const RewardTable& rewards,
                                 const UserPopulation& population, const OpponentPool& pool,
                                 double beta);

/// Score-function estimate from `n_samples` draws. Uses baseline[type], then
/// updates it to decay * baseline + (1 - decay) * mean reward.
std::vector<double> grad_S_reinforce(const ToyGenerator& gen, const RewardTable& rewards,
                                     TypeIndex type, std::size_t n_samples,
                                     std::vector<double>& baseline, double decay,
                                     std::mt19937_64& rng);

/// Per-outcome sampling probabilities for the resampled training set.
std::vector<double> resample_weights(const Dataset& dataset, const RewardTable& rewards,
                                     const std::vector<double>& s_phi, const OpponentPool& pool,
                                     const UserPopulation& population, double beta, double gamma,
                                     bool structured = true);

struct ResamplingRow {
  std::size_t round = 0;
  std::vector<double> s_estimated;
  std::vector<double> s_exact;
  double objective = 0.0;
};

struct ResamplingResult {
  ToyGenerator generator;
  std::vector<ResamplingRow> trace;  // row 0 is the initial generator
};

ResamplingResult train_resampling(const Dataset& dataset, const RewardTable& rewards,
                                  const UserPopulation& population, const OpponentPool& pool,
                                  const TrainingConfig& config,
                                  std::optional<ToyGenerator> initial = std::nullopt);

struct DirectGradientRow {
  std::size_t epoch = 0;
  double cross_entropy = 0.0;
  double objective = 0.0;
  double loss = 0.0;
  double learning_rate = 0.0;
  std::vector<double> s_exact;
};

struct DirectGradientResult {
  ToyGenerator generator;
  std::vector<DirectGradientRow> trace;  // row 0 is the initial generator
};

DirectGradientResult train_direct_gradient(const Dataset& dataset, const RewardTable& rewards,
                                           const UserPopulation& population,
                                           const OpponentPool& pool, const TrainingConfig& config,
                                           std::optional<ToyGenerator> initial = std::nullopt);

/// Cross-entropy of the generator against the dataset's empirical distribution.
double cross_entropy(const ToyGenerator& gen, const Dataset& dataset);

/// Generator matching the dataset's empirical distribution.
ToyGenerator empirical_generator(const Dataset& dataset, std::vector<std::string> labels = {});

struct EntrantReport {
  GameSpec game;  // incumbents plus the entrant as the last model
  ModelIndex entrant = 0;
  std::vector<double> entrant_scores;
  std::vector<PneEntry> pne;
  DynamicsOutcome dynamics;
  MetricsRecord metrics;
  bool adopted_in_pne = false;
  bool adopted_in_dynamics = false;
};

EntrantReport evaluate_entrant(const ToyGenerator& entrant, const RewardTable& rewards,
                               const UserPopulation& population, const ScoreMatrix& incumbents,
                               std::size_t n_platforms);

/// Small market whose largest type is under-served by both incumbents.
struct ToyEntryInstance {
  std::vector<std::string> outcome_labels;
  Dataset dataset;
  RewardTable rewards;
  UserPopulation population;
  ScoreMatrix incumbents;
  std::size_t n_platforms = 2;
  TypeIndex targeted_type = 0;
};

ToyEntryInstance toy_entry_instance();

}  // namespace pm
