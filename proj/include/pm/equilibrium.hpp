#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pm/types.hpp"

namespace pm {

/// Improvement threshold used by every equilibrium test.
inline constexpr double kImprovementTol = 1e-12;

struct Deviation {
  PlatformIndex platform = 0;
  ModelIndex model = 0;
  double gain = 0.0;
};

struct PneCheck {
  bool is_pne = false;
  std::optional<Deviation> witness;  // most profitable deviation when not a PNE
  explicit operator bool() const { return is_pne; }
};

PneCheck verify_pne(const GameSpec& spec, const StrategyProfile& profile);

enum class EquilibriumLabel { fully_differentiated, homogeneous, partial };
std::string to_string(EquilibriumLabel label);

struct EquilibriumClassification {
  std::size_t distinct_count = 0;
  EquilibriumLabel label = EquilibriumLabel::partial;
};

/// N = 1 counts as homogeneous.
EquilibriumClassification classify(const StrategyProfile& profile);

struct PneEntry {
  StrategyProfile profile;
  EquilibriumClassification classification;
};

struct EnumerateOptions {
  std::uint64_t budget = 10'000'000;
  unsigned jobs = 1;
};

/// Number of profiles M^N, saturating at UINT64_MAX.
std::uint64_t profile_count(std::size_t models, std::size_t platforms);

/// Every PNE in lexicographic order. Throws BudgetExceededError when M^N > budget.
std::vector<PneEntry> enumerate_pne(const GameSpec& spec, const EnumerateOptions& options = {});

/// Best model for `platform` holding the others fixed. Keeps the current model
/// when it is optimal, otherwise the lowest optimal index.
ModelIndex best_response(const GameSpec& spec, const StrategyProfile& profile,
                         PlatformIndex platform);

struct DynamicsStep {
  std::size_t step = 0;  // 1-based
  PlatformIndex mover = 0;
  StrategyProfile profile;  // state after the move
  std::vector<double> utilities;
  bool changed = false;
};

enum class OutcomeKind { equilibrium, cycle, timeout };
std::string to_string(OutcomeKind kind);

struct DynamicsOptions {
  std::vector<PlatformIndex> order;  // empty means round-robin 0..N-1
  std::size_t max_steps = 100'000;
};

struct DynamicsOutcome {
  OutcomeKind kind = OutcomeKind::timeout;
  StrategyProfile start;
  std::vector<PlatformIndex> order;
  std::vector<DynamicsStep> trajectory;
  std::optional<StrategyProfile> equilibrium_profile;
  // Repeating segment, one entry per (profile, mover) state. Silent moves keep
  // the profile, so consecutive entries may coincide.
  std::vector<StrategyProfile> cycle_states;

  /// Repeating segment with consecutive duplicates removed (cyclically).
  std::vector<StrategyProfile> cycle_profiles() const;
  /// Distinct sorted model multisets visited by the cycle, in first-seen order.
  std::vector<std::vector<ModelIndex>> cycle_multisets() const;
  /// Equilibrium profile, or the collapsed cycle profiles. Empty on timeout.
  std::vector<StrategyProfile> outcome_profiles() const;
};

DynamicsOutcome run_dynamics(const GameSpec& spec, const StrategyProfile& start,
                             const DynamicsOptions& options = {});

struct ConditionMargin {
  PlatformIndex platform = 0;
  ModelIndex alternative = 0;
  double lhs = 0.0;     // T gap
  double rhs = 0.0;     // delta gap
  double margin = 0.0;  // lhs - rhs, non-negative when the inequality holds
};

struct ConditionReport {
  bool holds = false;
  std::vector<ConditionMargin> margins;
};

/// Differentiated-equilibrium condition for a profile of distinct models.
ConditionReport check_differentiated_condition(const GameSpec& spec,
                                               const StrategyProfile& profile);

/// Homogeneous-equilibrium condition for (m, ..., m).
ConditionReport check_homogeneous_condition(const GameSpec& spec, ModelIndex model);

struct TwoPlayerConditions {
  bool differentiated = false;
  bool homogeneous_i = false;
  bool homogeneous_j = false;
};

/// Closed-form two-platform conditions for the model pair (i, j).
TwoPlayerConditions two_player_conditions(const GameSpec& spec, ModelIndex i, ModelIndex j);

struct CentralizationParams {
  TypeIndex dominant_type = 0;
  ModelIndex dominant_model = 0;
  double rho = 0.0;
  double gamma_cap = 0.0;
  double pi_star = 0.0;
};

struct CentralizationResult {
  double threshold = 0.0;
  bool satisfied = false;
  bool pne_confirmed = false;
};

/// 1 - rho / (rho + 2 Gamma).
double centralization_threshold(double rho, double gamma_cap);

/// Validates the dominant-type hypotheses, then compares pi_star to the
/// threshold and checks (m, ..., m) directly.
CentralizationResult centralization_check(const GameSpec& spec,
                                          const CentralizationParams& params);

struct SoftmaxScanRow {
  double tau = 0.0;
  std::size_t pne_count = 0;
};

std::vector<SoftmaxScanRow> softmax_pne_scan(const GameSpec& spec,
                                             const std::vector<double>& tau_grid,
                                             const EnumerateOptions& options = {});

}  // namespace pm
