#include "pm/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <thread>

#include "pm/game.hpp"

namespace pm {

PneCheck verify_pne(const GameSpec& spec, const StrategyProfile& profile) {
  spec.check_profile(profile);
  PneCheck result{true, std::nullopt};
  for (PlatformIndex i = 0; i < profile.size(); ++i) {
    const double current = platform_utility(spec, profile, i);
    for (ModelIndex g = 0; g < spec.models(); ++g) {
      if (g == profile[i]) continue;
      const double gain = platform_utility(spec, profile.with(i, g), i) - current;
      if (gain > kImprovementTol) {
        result.is_pne = false;
        if (!result.witness || gain > result.witness->gain) result.witness = Deviation{i, g, gain};
      }
    }
  }
  return result;
}

std::string to_string(EquilibriumLabel label) {
  switch (label) {
    case EquilibriumLabel::fully_differentiated: return "fully_differentiated";
    case EquilibriumLabel::homogeneous: return "homogeneous";
    case EquilibriumLabel::partial: return "partial";
  }
  return "partial";
}

EquilibriumClassification classify(const StrategyProfile& profile) {
  EquilibriumClassification c;
  c.distinct_count = profile.distinct_count();
  if (c.distinct_count == 1)
    c.label = EquilibriumLabel::homogeneous;
  else if (c.distinct_count == profile.size())
    c.label = EquilibriumLabel::fully_differentiated;
  else
    c.label = EquilibriumLabel::partial;
  return c;
}

std::uint64_t profile_count(std::size_t models, std::size_t platforms) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < platforms; ++i) {
    if (total > std::numeric_limits<std::uint64_t>::max() / models)
      return std::numeric_limits<std::uint64_t>::max();
    total *= models;
  }
  return total;
}

namespace {

StrategyProfile decode_profile(std::uint64_t index, std::size_t models, std::size_t n) {
  StrategyProfile p(std::vector<ModelIndex>(n, 0));
  for (std::size_t i = n; i-- > 0;) {
    p[i] = static_cast<ModelIndex>(index % models);
    index /= models;
  }
  return p;
}

std::vector<PneEntry> scan_range(const GameSpec& spec, std::uint64_t begin, std::uint64_t end) {
  std::vector<PneEntry> found;
  for (std::uint64_t idx = begin; idx < end; ++idx) {
    auto p = decode_profile(idx, spec.models(), spec.n_platforms);
    if (verify_pne(spec, p)) found.push_back({p, classify(p)});
  }
  return found;
}

}  // namespace

std::vector<PneEntry> enumerate_pne(const GameSpec& spec, const EnumerateOptions& options) {
  const std::uint64_t total = profile_count(spec.models(), spec.n_platforms);
  if (total > options.budget) {
    throw BudgetExceededError("enumeration needs " + std::to_string(total) +
                                  " profiles, budget is " + std::to_string(options.budget),
                              total, options.budget);
  }
  const unsigned jobs = std::max(1u, options.jobs);
  if (jobs == 1 || total < 1024) return scan_range(spec, 0, total);

  std::vector<std::vector<PneEntry>> parts(jobs);
  std::vector<std::thread> workers;
  const std::uint64_t chunk = (total + jobs - 1) / jobs;
  for (unsigned w = 0; w < jobs; ++w) {
    const std::uint64_t begin = std::min<std::uint64_t>(total, w * chunk);
    const std::uint64_t end = std::min<std::uint64_t>(total, begin + chunk);
    workers.emplace_back([&spec, &parts, w, begin, end] { parts[w] = scan_range(spec, begin, end); });
  }
  for (auto& t : workers) t.join();
  std::vector<PneEntry> merged;
  for (auto& part : parts) merged.insert(merged.end(), part.begin(), part.end());
  std::sort(merged.begin(), merged.end(),
            [](const PneEntry& a, const PneEntry& b) { return a.profile < b.profile; });
  return merged;
}

ModelIndex best_response(const GameSpec& spec, const StrategyProfile& profile,
                         PlatformIndex platform) {
  spec.check_profile(profile);
  if (platform >= profile.size()) throw InvalidProfileError("platform index out of range");
  const ModelIndex current = profile[platform];
  std::vector<double> u(spec.models());
  double best = -std::numeric_limits<double>::infinity();
  for (ModelIndex g = 0; g < spec.models(); ++g) {
    u[g] = platform_utility(spec, profile.with(platform, g), platform);
    best = std::max(best, u[g]);
  }
  if (u[current] >= best - kImprovementTol) return current;
  for (ModelIndex g = 0; g < spec.models(); ++g)
    if (u[g] >= best - kImprovementTol) return g;
  return current;
}

std::string to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::equilibrium: return "equilibrium";
    case OutcomeKind::cycle: return "cycle";
    case OutcomeKind::timeout: return "timeout";
  }
  return "timeout";
}

std::vector<StrategyProfile> DynamicsOutcome::cycle_profiles() const {
  std::vector<StrategyProfile> out;
  for (const auto& p : cycle_states)
    if (out.empty() || out.back() != p) out.push_back(p);
  while (out.size() > 1 && out.front() == out.back()) out.pop_back();
  return out;
}

std::vector<std::vector<ModelIndex>> DynamicsOutcome::cycle_multisets() const {
  std::vector<std::vector<ModelIndex>> out;
  for (const auto& p : cycle_profiles()) {
    auto m = p.multiset();
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(std::move(m));
  }
  return out;
}

std::vector<StrategyProfile> DynamicsOutcome::outcome_profiles() const {
  if (kind == OutcomeKind::equilibrium) return {*equilibrium_profile};
  if (kind == OutcomeKind::cycle) return cycle_profiles();
  return {};
}

DynamicsOutcome run_dynamics(const GameSpec& spec, const StrategyProfile& start,
                             const DynamicsOptions& options) {
  spec.check_profile(start);
  if (options.max_steps < 1) throw InvalidParameterError("max_steps must be at least 1");
  DynamicsOutcome out;
  out.start = start;
  out.order = options.order;
  if (out.order.empty()) {
    for (PlatformIndex i = 0; i < spec.n_platforms; ++i) out.order.push_back(i);
  }
  std::set<PlatformIndex> covered;
  for (PlatformIndex i : out.order) {
    if (i >= spec.n_platforms) throw InvalidParameterError("mover order names an unknown platform");
    covered.insert(i);
  }
  if (covered.size() != spec.n_platforms)
    throw InvalidParameterError("mover order must include every platform");

  // State = (profile, position in the mover order) before the move.
  std::map<std::pair<StrategyProfile, std::size_t>, std::size_t> seen;
  std::vector<StrategyProfile> states;
  StrategyProfile current = start;
  std::size_t pos = 0;
  std::size_t silent = 0;
  for (std::size_t step = 0;; ++step) {
    if (silent >= out.order.size()) {
      out.kind = OutcomeKind::equilibrium;
      out.equilibrium_profile = current;
      return out;
    }
    auto key = std::make_pair(current, pos);
    if (auto it = seen.find(key); it != seen.end()) {
      out.kind = OutcomeKind::cycle;
      out.cycle_states.assign(states.begin() + static_cast<std::ptrdiff_t>(it->second), states.end());
      return out;
    }
    if (step >= options.max_steps) {
      out.kind = OutcomeKind::timeout;
      return out;
    }
    seen.emplace(std::move(key), states.size());
    states.push_back(current);

    const PlatformIndex mover = out.order[pos];
    const ModelIndex choice = best_response(spec, current, mover);
    const bool changed = choice != current[mover];
    current[mover] = choice;
    silent = changed ? 0 : silent + 1;
    out.trajectory.push_back({step + 1, mover, current, platform_utilities(spec, current), changed});
    pos = (pos + 1) % out.order.size();
  }
}

namespace {

double delta_of(const GameSpec& spec, const StrategyProfile& f, PlatformIndex i) {
  return spec.choice.is_softmax() ? deviation_advantage_soft(spec, f, i)
                                  : deviation_advantage(spec, f, i);
}

}  // namespace

ConditionReport check_differentiated_condition(const GameSpec& spec,
                                               const StrategyProfile& profile) {
  spec.check_profile(profile);
  if (spec.n_platforms < 2)
    throw InvalidInputError("differentiated condition needs at least two platforms");
  if (spec.models() < spec.n_platforms)
    throw InvalidInputError("differentiated condition needs M >= N");
  if (profile.distinct_count() != profile.size())
    throw InvalidInputError("differentiated condition needs distinct models, got " +
                            to_string(profile));
  const auto t = average_scores(spec);
  ConditionReport report{true, {}};
  for (PlatformIndex i = 0; i < profile.size(); ++i) {
    const double own = delta_of(spec, profile, i);
    for (ModelIndex g = 0; g < spec.models(); ++g) {
      if (g == profile[i]) continue;
      ConditionMargin m;
      m.platform = i;
      m.alternative = g;
      m.lhs = t[profile[i]] - t[g];
      m.rhs = delta_of(spec, profile.with(i, g), i) - own;
      m.margin = m.lhs - m.rhs;
      if (m.margin < -kImprovementTol) report.holds = false;
      report.margins.push_back(m);
    }
  }
  return report;
}

ConditionReport check_homogeneous_condition(const GameSpec& spec, ModelIndex model) {
  if (model >= spec.models()) throw InvalidProfileError("model index out of range");
  const auto t = average_scores(spec);
  const StrategyProfile f(std::vector<ModelIndex>(spec.n_platforms, model));
  ConditionReport report{true, {}};
  for (ModelIndex k = 0; k < spec.models(); ++k) {
    if (k == model) continue;
    ConditionMargin m;
    m.platform = 0;
    m.alternative = k;
    m.lhs = t[model] - t[k];
    m.rhs = delta_of(spec, f.with(0, k), 0) - delta_of(spec, f, 0);
    m.margin = m.lhs - m.rhs;
    if (m.margin < -kImprovementTol) report.holds = false;
    report.margins.push_back(m);
  }
  return report;
}

TwoPlayerConditions two_player_conditions(const GameSpec& spec, ModelIndex i, ModelIndex j) {
  if (spec.n_platforms != 2) throw InvalidInputError("two-player conditions need N = 2");
  if (i >= spec.models() || j >= spec.models()) throw InvalidProfileError("model index out of range");
  if (i == j) throw InvalidInputError("two-player conditions need distinct models");
  const auto t = average_scores(spec);
  // d(a, b): advantage of model a when the opponent holds b.
  auto d = [&](ModelIndex a, ModelIndex b) { return delta_of(spec, StrategyProfile{a, b}, 0); };
  TwoPlayerConditions c;
  if (spec.models() == 2) {
    const double gap = t[i] - t[j];
    c.differentiated = -d(i, j) <= gap + kImprovementTol && gap <= d(j, i) + kImprovementTol;
    c.homogeneous_i = gap > d(j, i);
    c.homogeneous_j = -gap > d(i, j);
    return c;
  }
  auto best_alternative = [&](ModelIndex opponent, ModelIndex skip) {
    double best = t[opponent];
    for (ModelIndex k = 0; k < spec.models(); ++k)
      if (k != skip && k != opponent) best = std::max(best, t[k] + d(k, opponent));
    return best;
  };
  c.differentiated = t[i] + d(i, j) >= best_alternative(j, i) - kImprovementTol &&
                     t[j] + d(j, i) >= best_alternative(i, j) - kImprovementTol;
  auto homogeneous = [&](ModelIndex m) {
    for (ModelIndex k = 0; k < spec.models(); ++k)
      if (k != m && t[m] - t[k] < d(k, m) - kImprovementTol) return false;
    return true;
  };
  c.homogeneous_i = homogeneous(i);
  c.homogeneous_j = homogeneous(j);
  return c;
}

double centralization_threshold(double rho, double gamma_cap) {
  if (!(rho > 0.0)) throw InvalidParameterError("rho must be positive");
  if (!(gamma_cap >= 0.0)) throw InvalidParameterError("Gamma must be non-negative");
  return 1.0 - rho / (rho + 2.0 * gamma_cap);
}

CentralizationResult centralization_check(const GameSpec& spec,
                                          const CentralizationParams& params) {
  const double threshold = centralization_threshold(params.rho, params.gamma_cap);
  if (!(params.pi_star >= 0.0 && params.pi_star <= 1.0))
    throw InvalidParameterError("pi_star must lie in [0, 1]");
  if (params.dominant_type >= spec.types() || params.dominant_model >= spec.models())
    throw InvalidParameterError("dominant type or model out of range");
  if (std::abs(params.pi_star - spec.population.weight(params.dominant_type)) > 1e-9)
    throw InvalidInputError("pi_star does not match the dominant type's population weight");
  const ModelIndex m = params.dominant_model;
  const TypeIndex star = params.dominant_type;
  for (ModelIndex j = 0; j < spec.models(); ++j) {
    if (j == m) continue;
    if (spec.scores(m, star) - spec.scores(j, star) < params.rho - kImprovementTol)
      throw InvalidInputError("majority advantage bound violated: model " + std::to_string(j + 1) +
                              " is within rho of the dominant model on the dominant type");
    for (TypeIndex k = 0; k < spec.types(); ++k) {
      if (k == star) continue;
      if (std::abs(spec.scores(j, k) - spec.scores(m, k)) > params.gamma_cap + kImprovementTol)
        throw InvalidInputError("minority variation bound violated: model " +
                                std::to_string(j + 1) + ", type " + std::to_string(k + 1) +
                                " differs from the dominant model by more than Gamma");
    }
  }
  CentralizationResult r;
  r.threshold = threshold;
  r.satisfied = params.pi_star >= threshold;
  r.pne_confirmed =
      verify_pne(spec, StrategyProfile(std::vector<ModelIndex>(spec.n_platforms, m))).is_pne;
  return r;
}

std::vector<SoftmaxScanRow> softmax_pne_scan(const GameSpec& spec,
                                             const std::vector<double>& tau_grid,
                                             const EnumerateOptions& options) {
  std::vector<SoftmaxScanRow> rows;
  for (double tau : tau_grid) {
    const auto soft = spec.with_choice(ChoiceRule::softmax(tau));
    rows.push_back({tau, enumerate_pne(soft, options).size()});
  }
  return rows;
}

}  // namespace pm
