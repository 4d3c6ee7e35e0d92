#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pm/equilibrium.hpp"
#include "pm/types.hpp"

namespace pm {

/// Expected best available score. Cross-checks the T + delta closed form and
/// throws std::logic_error if the two disagree beyond 1e-12.
double coverage_value(const GameSpec& spec, const StrategyProfile& profile);

struct MarketShares {
  std::vector<double> shares;
  double hhi = 0.0;
  std::size_t support = 0;
};

MarketShares market_shares(const GameSpec& spec, const StrategyProfile& profile);

/// C(M + N - 1, N), saturating at UINT64_MAX.
std::uint64_t multiset_count(std::size_t models, std::size_t platforms);

struct SocialOptimum {
  double value = 0.0;
  StrategyProfile profile;  // sorted maximizer, first in lexicographic order
};

SocialOptimum social_optimum(const GameSpec& spec, std::uint64_t budget = 10'000'000);

struct WelfareReport {
  double welfare = 0.0;            // mean over the cycle's profiles f(1)..f(L)
  double multiset_average = 0.0;   // mean over distinct model multisets
  double state_average = 0.0;      // mean over (profile, mover) states, silent moves included
  std::size_t cycle_length = 0;    // L; 1 for an equilibrium
};

/// Throws MarketError on a timeout outcome.
WelfareReport user_welfare(const GameSpec& spec, const DynamicsOutcome& outcome);

struct WelfareBound {
  bool holds = false;
  double slack = 0.0;
  double welfare = 0.0;
  double social_optimum = 0.0;
};

WelfareBound welfare_bound_check(const GameSpec& spec, const DynamicsOutcome& outcome);

struct EntryCheck {
  bool entrant_best_response = false;  // condition (i)
  bool incumbents_stable = false;      // condition (ii)
  bool is_equilibrium = false;
  double welfare_before = 0.0;
  double welfare_after = 0.0;
  double welfare_delta = 0.0;
  long support_delta = 0;
  double hhi_before = 0.0;
  double hhi_after = 0.0;
  std::optional<bool> monotone;  // set only when both conditions hold
};

/// Adds one platform holding `entrant_model` to a PNE of the N-platform game.
EntryCheck platform_entry_check(const GameSpec& spec, const StrategyProfile& base_equilibrium,
                                ModelIndex entrant_model);

struct MetricsRecord {
  StrategyProfile profile;  // equilibrium, or the final state of the trajectory
  double coverage = 0.0;
  double welfare = 0.0;
  double welfare_multiset = 0.0;
  double social_optimum = 0.0;
  StrategyProfile social_optimum_profile;
  double hhi = 0.0;
  std::size_t support = 0;
  std::vector<double> shares;
};

MetricsRecord metrics_for_outcome(const GameSpec& spec, const DynamicsOutcome& outcome);

}  // namespace pm
