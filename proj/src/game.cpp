#include "pm/game.hpp"

#include <algorithm>
#include <cmath>

namespace pm {

namespace {

void require_softmax(const GameSpec& spec) {
  if (!spec.choice.is_softmax() || !(spec.choice.tau > 0.0))
    throw InvalidParameterError("softmax allocation needs a positive temperature");
}

// exp((S - max S) / tau) for each platform, for one type.
std::vector<double> stable_exponentials(const GameSpec& spec, const StrategyProfile& f,
                                        TypeIndex k) {
  const std::size_t n = f.size();
  double top = spec.scores(f[0], k);
  for (std::size_t i = 1; i < n; ++i) top = std::max(top, spec.scores(f[i], k));
  std::vector<double> e(n);
  for (std::size_t i = 0; i < n; ++i)
    e[i] = std::exp((spec.scores(f[i], k) - top) / spec.choice.tau);
  return e;
}

}  // namespace

AllocationMatrix allocate_hardmax(const GameSpec& spec, const StrategyProfile& profile) {
  spec.check_profile(profile);
  const std::size_t n = profile.size();
  const std::size_t kk = spec.types();
  AllocationMatrix out{std::vector<std::vector<double>>(n, std::vector<double>(kk, 0.0))};
  for (TypeIndex k = 0; k < kk; ++k) {
    double top = spec.scores(profile[0], k);
    for (std::size_t i = 1; i < n; ++i) top = std::max(top, spec.scores(profile[i], k));
    std::size_t ties = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (spec.scores(profile[i], k) == top) ++ties;
    const double share = 1.0 / static_cast<double>(ties);
    for (std::size_t i = 0; i < n; ++i)
      if (spec.scores(profile[i], k) == top) out.p[i][k] = share;
  }
  return out;
}

AllocationMatrix allocate_softmax(const GameSpec& spec, const StrategyProfile& profile) {
  require_softmax(spec);
  spec.check_profile(profile);
  const std::size_t n = profile.size();
  const std::size_t kk = spec.types();
  AllocationMatrix out{std::vector<std::vector<double>>(n, std::vector<double>(kk, 0.0))};
  for (TypeIndex k = 0; k < kk; ++k) {
    const auto e = stable_exponentials(spec, profile, k);
    double total = 0.0;
    for (double v : e) total += v;
    for (std::size_t i = 0; i < n; ++i) out.p[i][k] = e[i] / total;
  }
  return out;
}

AllocationMatrix allocate(const GameSpec& spec, const StrategyProfile& profile) {
  return spec.choice.is_softmax() ? allocate_softmax(spec, profile)
                                  : allocate_hardmax(spec, profile);
}

std::vector<double> platform_utilities(const GameSpec& spec, const StrategyProfile& profile) {
  const auto alloc = allocate(spec, profile);
  std::vector<double> u(profile.size(), 0.0);
  for (std::size_t i = 0; i < profile.size(); ++i)
    for (TypeIndex k = 0; k < spec.types(); ++k)
      u[i] += spec.population.weight(k) * alloc(i, k) * spec.scores(profile[i], k);
  return u;
}

double platform_utility(const GameSpec& spec, const StrategyProfile& profile,
                        PlatformIndex platform) {
  spec.check_profile(profile);
  if (platform >= profile.size()) throw InvalidProfileError("platform index out of range");
  const ModelIndex mine = profile[platform];
  double u = 0.0;
  for (TypeIndex k = 0; k < spec.types(); ++k) {
    const double s = spec.scores(mine, k);
    double share = 0.0;
    if (spec.choice.is_softmax()) {
      const auto e = stable_exponentials(spec, profile, k);
      double total = 0.0;
      for (double v : e) total += v;
      share = e[platform] / total;
    } else {
      double top = s;
      for (ModelIndex g : profile.choices) top = std::max(top, spec.scores(g, k));
      if (s == top) {
        std::size_t ties = 0;
        for (ModelIndex g : profile.choices)
          if (spec.scores(g, k) == top) ++ties;
        share = 1.0 / static_cast<double>(ties);
      }
    }
    u += spec.population.weight(k) * share * s;
  }
  return u;
}

std::vector<double> average_scores(const GameSpec& spec) {
  std::vector<double> t(spec.models(), 0.0);
  for (ModelIndex j = 0; j < spec.models(); ++j)
    for (TypeIndex k = 0; k < spec.types(); ++k)
      t[j] += spec.population.weight(k) * spec.scores(j, k);
  return t;
}

double deviation_advantage(const GameSpec& spec, const StrategyProfile& profile,
                           PlatformIndex platform) {
  spec.check_profile(profile);
  if (platform >= profile.size()) throw InvalidProfileError("platform index out of range");
  const auto n = static_cast<double>(profile.size());
  const ModelIndex mine = profile[platform];
  double delta = 0.0;
  for (TypeIndex k = 0; k < spec.types(); ++k) {
    double top = spec.scores(profile[0], k);
    for (std::size_t i = 1; i < profile.size(); ++i)
      top = std::max(top, spec.scores(profile[i], k));
    const double s = spec.scores(mine, k);
    double z = -s;
    if (s == top) {
      double ties = 0.0;
      for (std::size_t i = 0; i < profile.size(); ++i)
        if (spec.scores(profile[i], k) == top) ties += 1.0;
      z = ((n - ties) / ties) * s;
    }
    delta += spec.population.weight(k) * z;
  }
  return delta;
}

double deviation_advantage_soft(const GameSpec& spec, const StrategyProfile& profile,
                                PlatformIndex platform) {
  require_softmax(spec);
  spec.check_profile(profile);
  if (platform >= profile.size()) throw InvalidProfileError("platform index out of range");
  const auto n = static_cast<double>(profile.size());
  double delta = 0.0;
  for (TypeIndex k = 0; k < spec.types(); ++k) {
    const auto e = stable_exponentials(spec, profile, k);
    double total = 0.0;
    for (double v : e) total += v;
    const double others = total - e[platform];
    const double z = ((n - 1.0) * e[platform] - others) / total;
    delta += spec.population.weight(k) * z * spec.scores(profile[platform], k);
  }
  return delta;
}

double decomposed_utility(const GameSpec& spec, const StrategyProfile& profile,
                          PlatformIndex platform) {
  const double t = average_scores(spec)[profile.choices.at(platform)];
  const double delta = spec.choice.is_softmax()
                           ? deviation_advantage_soft(spec, profile, platform)
                           : deviation_advantage(spec, profile, platform);
  return (t + delta) / static_cast<double>(profile.size());
}

}  // namespace pm
