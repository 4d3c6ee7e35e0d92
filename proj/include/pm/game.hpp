#pragma once

#include <vector>

#include "pm/types.hpp"

namespace pm {

/// Users pick the best-scoring platform; exact ties split evenly.
AllocationMatrix allocate_hardmax(const GameSpec& spec, const StrategyProfile& profile);

/// Logit allocation at the spec's temperature. Requires a softmax rule.
AllocationMatrix allocate_softmax(const GameSpec& spec, const StrategyProfile& profile);

/// Dispatches on spec.choice.
AllocationMatrix allocate(const GameSpec& spec, const StrategyProfile& profile);

std::vector<double> platform_utilities(const GameSpec& spec, const StrategyProfile& profile);
double platform_utility(const GameSpec& spec, const StrategyProfile& profile,
                        PlatformIndex platform);

/// T_j for every model.
std::vector<double> average_scores(const GameSpec& spec);

/// Hardmax deviation advantage of the model held by `platform`.
double deviation_advantage(const GameSpec& spec, const StrategyProfile& profile,
                           PlatformIndex platform);

/// Softmax deviation advantage. Requires a softmax rule.
double deviation_advantage_soft(const GameSpec& spec, const StrategyProfile& profile,
                                PlatformIndex platform);

/// (T + delta) / N with the delta matching the choice rule. Equals the direct utility.
double decomposed_utility(const GameSpec& spec, const StrategyProfile& profile,
                          PlatformIndex platform);

}  // namespace pm
