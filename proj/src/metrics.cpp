#include "pm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pm/game.hpp"

namespace pm {

double coverage_value(const GameSpec& spec, const StrategyProfile& profile) {
  spec.check_profile(profile);
  double v = 0.0;
  for (TypeIndex k = 0; k < spec.types(); ++k) {
    double top = 0.0;
    for (ModelIndex g : profile.choices) top = std::max(top, spec.scores(g, k));
    v += spec.population.weight(k) * top;
  }
  const GameSpec hard = spec.choice.is_softmax() ? spec.with_choice(ChoiceRule::hardmax()) : spec;
  const auto t = average_scores(hard);
  double closed = 0.0;
  for (PlatformIndex i = 0; i < profile.size(); ++i)
    closed += t[profile[i]] + deviation_advantage(hard, profile, i);
  closed /= static_cast<double>(profile.size());
  if (std::abs(closed - v) > 1e-12)
    throw std::logic_error("coverage closed form disagrees with direct evaluation");
  return v;
}

MarketShares market_shares(const GameSpec& spec, const StrategyProfile& profile) {
  const auto alloc = allocate(spec, profile);
  MarketShares m;
  m.shares.assign(profile.size(), 0.0);
  for (PlatformIndex i = 0; i < profile.size(); ++i)
    for (TypeIndex k = 0; k < spec.types(); ++k)
      m.shares[i] += spec.population.weight(k) * alloc(i, k);
  for (double s : m.shares) m.hhi += s * s;
  m.support = profile.distinct_count();
  return m;
}

std::uint64_t multiset_count(std::size_t models, std::size_t platforms) {
  // C(M+N-1, N) built incrementally; each partial product is itself a binomial.
  std::uint64_t c = 1;
  for (std::size_t i = 1; i <= platforms; ++i) {
    const std::uint64_t factor = models - 1 + i;
    if (c > std::numeric_limits<std::uint64_t>::max() / factor)
      return std::numeric_limits<std::uint64_t>::max();
    c = c * factor / i;
  }
  return c;
}

SocialOptimum social_optimum(const GameSpec& spec, std::uint64_t budget) {
  const std::size_t m = spec.models();
  const std::size_t n = spec.n_platforms;
  const std::uint64_t count = multiset_count(m, n);
  if (count > budget) {
    throw BudgetExceededError("social optimum needs " + std::to_string(count) +
                                  " multisets, budget is " + std::to_string(budget),
                              count, budget);
  }
  std::vector<ModelIndex> cur(n, 0);
  SocialOptimum best{-1.0, {}};
  while (true) {
    const StrategyProfile p(cur);
    const double v = coverage_value(spec, p);
    if (v > best.value) best = {v, p};
    // Next non-decreasing sequence.
    std::size_t pos = n;
    while (pos > 0 && cur[pos - 1] == m - 1) --pos;
    if (pos == 0) break;
    const ModelIndex next = cur[pos - 1] + 1;
    for (std::size_t i = pos - 1; i < n; ++i) cur[i] = next;
  }
  return best;
}

WelfareReport user_welfare(const GameSpec& spec, const DynamicsOutcome& outcome) {
  WelfareReport r;
  if (outcome.kind == OutcomeKind::timeout)
    throw MarketError("welfare is undefined for a dynamics run that timed out");
  if (outcome.kind == OutcomeKind::equilibrium) {
    const double v = coverage_value(spec, *outcome.equilibrium_profile);
    return {v, v, v, 1};
  }
  const auto profiles = outcome.cycle_profiles();
  for (const auto& p : profiles) r.welfare += coverage_value(spec, p);
  r.welfare /= static_cast<double>(profiles.size());
  r.cycle_length = profiles.size();

  const auto multisets = outcome.cycle_multisets();
  for (const auto& ms : multisets) r.multiset_average += coverage_value(spec, StrategyProfile(ms));
  r.multiset_average /= static_cast<double>(multisets.size());

  for (const auto& p : outcome.cycle_states) r.state_average += coverage_value(spec, p);
  r.state_average /= static_cast<double>(outcome.cycle_states.size());
  return r;
}

WelfareBound welfare_bound_check(const GameSpec& spec, const DynamicsOutcome& outcome) {
  WelfareBound b;
  b.welfare = user_welfare(spec, outcome).welfare;
  b.social_optimum = social_optimum(spec).value;
  b.slack = b.social_optimum - b.welfare;
  b.holds = b.slack >= -1e-12;
  return b;
}

EntryCheck platform_entry_check(const GameSpec& spec, const StrategyProfile& base_equilibrium,
                                ModelIndex entrant_model) {
  if (entrant_model >= spec.models()) throw InvalidProfileError("entrant model out of range");
  if (!verify_pne(spec, base_equilibrium))
    throw InvalidInputError("base profile " + to_string(base_equilibrium) + " is not a PNE");
  const GameSpec bigger = spec.with_platforms(spec.n_platforms + 1);
  StrategyProfile extended = base_equilibrium;
  extended.choices.push_back(entrant_model);
  const PlatformIndex entrant = spec.n_platforms;

  EntryCheck c;
  c.entrant_best_response = true;
  c.incumbents_stable = true;
  const auto check = verify_pne(bigger, extended);
  if (!check.is_pne) {
    // Re-test each platform separately so the two conditions are reported apart.
    for (PlatformIndex i = 0; i < extended.size(); ++i) {
      const double cur = platform_utility(bigger, extended, i);
      for (ModelIndex g = 0; g < spec.models(); ++g) {
        if (platform_utility(bigger, extended.with(i, g), i) > cur + kImprovementTol) {
          (i == entrant ? c.entrant_best_response : c.incumbents_stable) = false;
        }
      }
    }
  }
  c.is_equilibrium = c.entrant_best_response && c.incumbents_stable;
  c.welfare_before = coverage_value(spec, base_equilibrium);
  c.welfare_after = coverage_value(bigger, extended);
  c.welfare_delta = c.welfare_after - c.welfare_before;
  c.support_delta = static_cast<long>(extended.distinct_count()) -
                    static_cast<long>(base_equilibrium.distinct_count());
  c.hhi_before = market_shares(spec, base_equilibrium).hhi;
  c.hhi_after = market_shares(bigger, extended).hhi;
  if (c.is_equilibrium) c.monotone = c.welfare_delta >= -1e-12 && c.support_delta >= 0;
  return c;
}

MetricsRecord metrics_for_outcome(const GameSpec& spec, const DynamicsOutcome& outcome) {
  MetricsRecord r;
  const auto welfare = user_welfare(spec, outcome);
  r.profile = outcome.kind == OutcomeKind::equilibrium ? *outcome.equilibrium_profile
              : outcome.trajectory.empty()             ? outcome.start
                                                       : outcome.trajectory.back().profile;
  r.coverage = coverage_value(spec, r.profile);
  r.welfare = welfare.welfare;
  r.welfare_multiset = welfare.multiset_average;
  const auto opt = social_optimum(spec);
  r.social_optimum = opt.value;
  r.social_optimum_profile = opt.profile;
  const auto shares = market_shares(spec, r.profile);
  r.hhi = shares.hhi;
  r.support = shares.support;
  r.shares = shares.shares;
  if (r.welfare > r.social_optimum + 1e-12)
    throw std::logic_error("welfare exceeds the social optimum");
  return r;
}

}  // namespace pm
