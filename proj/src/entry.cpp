#include "pm/entry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pm/game.hpp"

namespace pm {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_dims(const ToyGenerator& gen, const RewardTable& rewards) {
  if (gen.size() != rewards.outcomes())
    throw InvalidInputError("generator and reward table disagree on the outcome count");
}

void check_dims(const RewardTable& rewards, const UserPopulation& population,
                const OpponentPool& pool) {
  if (rewards.types() != population.size() || pool.incumbents.types() != population.size())
    throw InvalidInputError("rewards, population and incumbents disagree on the type count");
}

std::vector<double> normalized(std::vector<double> w) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0)) throw InvalidInputError("all resampling weights are zero");
  for (double& v : w) v /= total;
  return w;
}

}  // namespace

std::vector<double> ToyGenerator::probabilities() const {
  if (logits.empty()) throw InvalidInputError("generator has no outcomes");
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double total = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) total += p[x] = std::exp(logits[x] - top);
  for (double& v : p) v /= total;
  return p;
}

ToyGenerator ToyGenerator::from_distribution(std::vector<std::string> labels,
                                             const std::vector<double>& p) {
  ToyGenerator g;
  for (double v : p) {
    if (!(v > 0.0)) throw InvalidInputError("generator probabilities must be positive");
    g.logits.push_back(std::log(v));
  }
  if (labels.empty())
    for (std::size_t x = 0; x < p.size(); ++x) labels.push_back("x" + std::to_string(x + 1));
  if (labels.size() != p.size()) throw InvalidInputError("outcome labels and probabilities differ");
  g.outcome_labels = std::move(labels);
  return g;
}

RewardTable::RewardTable(std::vector<std::vector<double>> rows) : r(std::move(rows)) {
  if (r.empty() || r.front().empty()) throw InvalidInputError("reward table is empty");
  for (const auto& row : r) {
    if (row.size() != r.front().size()) throw InvalidInputError("reward rows differ in length");
    for (double v : row)
      if (!(v >= 0.0 && v <= 1.0)) throw InvalidInputError("rewards must lie in [0, 1]");
  }
}

std::vector<double> OpponentPool::best_scores() const {
  std::vector<double> best(incumbents.types(), 0.0);
  for (TypeIndex k = 0; k < incumbents.types(); ++k)
    for (ModelIndex j = 0; j < incumbents.models(); ++j)
      best[k] = std::max(best[k], incumbents(j, k));
  return best;
}

void Dataset::validate(std::size_t types) const {
  if (counts.empty()) throw InvalidInputError("dataset has no items");
  if (item_attribute.size() != counts.size())
    throw InvalidInputError("dataset attribute list and counts differ in length");
  for (std::size_t u : item_attribute)
    if (u >= attributes.size()) throw InvalidInputError("item attribute out of range");
  for (double c : counts)
    if (!(c >= 0.0)) throw InvalidInputError("dataset counts must be non-negative");
  if (preference.size() != types) throw InvalidInputError("attribute preferences need one row per type");
  for (const auto& q : preference) {
    if (q.size() != attributes.size()) throw InvalidInputError("attribute preference row length");
    double s = 0.0;
    for (double v : q) {
      if (!(v >= 0.0)) throw InvalidInputError("attribute preferences must be non-negative");
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-9) throw InvalidInputError("attribute preference rows must sum to 1");
  }
}

std::vector<double> Dataset::empirical() const { return normalized(counts); }

TrainingConfig TrainingConfig::resampling_defaults() { return {}; }

TrainingConfig TrainingConfig::direct_gradient_defaults() {
  TrainingConfig c;
  c.inner_epochs = 20;
  return c;
}

void TrainingConfig::validate() const {
  if (!(beta > 0.0)) throw InvalidParameterError("beta must be positive");
  if (!(gamma >= 0.0)) throw InvalidParameterError("gamma must be non-negative");
  if (!(lambda >= 0.0)) throw InvalidParameterError("lambda must be non-negative");
  if (outer_rounds < 1) throw InvalidParameterError("outer_rounds must be at least 1");
  if (eval_budget < 1) throw InvalidParameterError("eval_budget must be at least 1");
  if (!(learning_rate > 0.0)) throw InvalidParameterError("learning_rate must be positive");
  if (!(baseline_decay >= 0.0 && baseline_decay < 1.0))
    throw InvalidParameterError("baseline_decay must lie in [0, 1)");
  if (!(blend > 0.0 && blend <= 1.0)) throw InvalidParameterError("blend must lie in (0, 1]");
  if (reinforce_samples < 1) throw InvalidParameterError("reinforce_samples must be at least 1");
}

std::vector<double> exact_scores(const ToyGenerator& gen, const RewardTable& rewards) {
  check_dims(gen, rewards);
  const auto p = gen.probabilities();
  std::vector<double> s(rewards.types(), 0.0);
  for (TypeIndex k = 0; k < rewards.types(); ++k)
    for (std::size_t x = 0; x < p.size(); ++x) s[k] += p[x] * rewards.r[k][x];
  return s;
}

std::vector<double> adoption_gate(const std::vector<double>& s_phi, const OpponentPool& pool,
                                  double beta) {
  if (!(beta > 0.0)) throw InvalidParameterError("beta must be positive");
  const auto best = pool.best_scores();
  if (best.size() != s_phi.size()) throw InvalidInputError("gate inputs disagree on type count");
  std::vector<double> sigma(s_phi.size());
  for (std::size_t k = 0; k < s_phi.size(); ++k) sigma[k] = sigmoid(beta * (s_phi[k] - best[k]));
  return sigma;
}

double objective_F(const ToyGenerator& gen, const RewardTable& rewards,
                   const UserPopulation& population, const OpponentPool& pool, double beta) {
  check_dims(rewards, population, pool);
  const auto s = exact_scores(gen, rewards);
  const auto sigma = adoption_gate(s, pool, beta);
  double f = 0.0;
  for (TypeIndex k = 0; k < s.size(); ++k) f += population.weight(k) * sigma[k] * s[k];
  return f;
}

std::vector<double> grad_S_exact(const ToyGenerator& gen, const RewardTable& rewards,
                                 TypeIndex type) {
  check_dims(gen, rewards);
  if (type >= rewards.types()) throw InvalidInputError("type index out of range");
  const auto p = gen.probabilities();
  const auto& r = rewards.r[type];
  double s = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) s += p[x] * r[x];
  std::vector<double> g(p.size());
  for (std::size_t y = 0; y < p.size(); ++y) g[y] = p[y] * (r[y] - s);
  return g;
}

std::vector<double> grad_S_pathwise(const ToyGenerator& gen, const RewardTable& rewards,
                                    TypeIndex type) {
  return grad_S_exact(gen, rewards, type);
}

std::vector<double> grad_F_exact(const ToyGenerator& gen, const RewardTable& rewards,
                                 const UserPopulation& population, const OpponentPool& pool,
                                 double beta) {
  check_dims(rewards, population, pool);
  const auto s = exact_scores(gen, rewards);
  const auto sigma = adoption_gate(s, pool, beta);
  std::vector<double> g(gen.size(), 0.0);
  for (TypeIndex k = 0; k < s.size(); ++k) {
    const double coef =
        population.weight(k) * (sigma[k] + beta * sigma[k] * (1.0 - sigma[k]) * s[k]);
    const auto gs = grad_S_exact(gen, rewards, k);
    for (std::size_t x = 0; x < g.size(); ++x) g[x] += coef * gs[x];
  }
  return g;
}

std::vector<double> grad_S_reinforce(const ToyGenerator& gen, const RewardTable& rewards,
                                     TypeIndex type, std::size_t n_samples,
                                     std::vector<double>& baseline, double decay,
                                     std::mt19937_64& rng) {
  check_dims(gen, rewards);
  if (n_samples < 1) throw InvalidParameterError("n_samples must be at least 1");
  if (type >= rewards.types() || baseline.size() != rewards.types())
    throw InvalidInputError("baseline must hold one value per type");
  const auto p = gen.probabilities();
  std::discrete_distribution<std::size_t> draw(p.begin(), p.end());
  const double b = baseline[type];
  std::vector<double> g(p.size(), 0.0);
  double mean_reward = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    const std::size_t x = draw(rng);
    const double r = rewards.r[type][x];
    mean_reward += r;
    // d log p(x) / d logits = e_x - p
    for (std::size_t y = 0; y < p.size(); ++y) g[y] -= (r - b) * p[y];
    g[x] += r - b;
  }
  const auto n = static_cast<double>(n_samples);
  for (double& v : g) v /= n;
  baseline[type] = decay * b + (1.0 - decay) * (mean_reward / n);
  return g;
}

std::vector<double> resample_weights(const Dataset& dataset, const RewardTable& rewards,
                                     const std::vector<double>& s_phi, const OpponentPool& pool,
                                     const UserPopulation& population, double beta, double gamma,
                                     bool structured) {
  if (!(gamma >= 0.0)) throw InvalidParameterError("gamma must be non-negative");
  dataset.validate(population.size());
  const auto sigma = adoption_gate(s_phi, pool, beta);
  const auto best = pool.best_scores();
  std::vector<double> alpha(population.size());
  for (TypeIndex k = 0; k < alpha.size(); ++k)
    alpha[k] = population.weight(k) * std::pow(sigma[k], gamma) * best[k];

  const std::size_t nx = dataset.counts.size();
  std::vector<double> w(nx, 0.0);
  if (structured) {
    std::vector<double> wu(dataset.attributes.size(), 0.0);
    std::vector<double> mass(dataset.attributes.size(), 0.0);
    for (std::size_t x = 0; x < nx; ++x) mass[dataset.item_attribute[x]] += dataset.counts[x];
    for (std::size_t u = 0; u < wu.size(); ++u) {
      if (mass[u] <= 0.0) continue;  // no items to draw for this attribute
      for (TypeIndex k = 0; k < alpha.size(); ++k) wu[u] += alpha[k] * dataset.preference[k][u];
    }
    wu = normalized(wu);
    for (std::size_t x = 0; x < nx; ++x) {
      const std::size_t u = dataset.item_attribute[x];
      if (mass[u] > 0.0) w[x] = wu[u] * dataset.counts[x] / mass[u];
    }
  } else {
    if (rewards.outcomes() != nx || rewards.types() != alpha.size())
      throw InvalidInputError("reward table does not match the dataset");
    for (TypeIndex k = 0; k < alpha.size(); ++k) {
      const double top = *std::max_element(rewards.r[k].begin(), rewards.r[k].end());
      if (top <= 0.0) continue;
      for (std::size_t x = 0; x < nx; ++x)
        w[x] += dataset.counts[x] * alpha[k] * rewards.r[k][x] / top;
    }
  }
  return normalized(w);
}

double cross_entropy(const ToyGenerator& gen, const Dataset& dataset) {
  const auto emp = dataset.empirical();
  if (emp.size() != gen.size()) throw InvalidInputError("dataset and generator sizes differ");
  const double top = *std::max_element(gen.logits.begin(), gen.logits.end());
  double lse = 0.0;
  for (double l : gen.logits) lse += std::exp(l - top);
  lse = top + std::log(lse);
  double ce = 0.0;
  for (std::size_t x = 0; x < emp.size(); ++x)
    if (emp[x] > 0.0) ce -= emp[x] * (gen.logits[x] - lse);
  return ce;
}

ToyGenerator empirical_generator(const Dataset& dataset, std::vector<std::string> labels) {
  // A tiny uniform floor keeps every logit finite when some outcome is unseen.
  auto p = dataset.empirical();
  const double floor = 1e-6;
  for (double& v : p) v = (1.0 - floor) * v + floor / static_cast<double>(p.size());
  return ToyGenerator::from_distribution(std::move(labels), p);
}

ResamplingResult train_resampling(const Dataset& dataset, const RewardTable& rewards,
                                  const UserPopulation& population, const OpponentPool& pool,
                                  const TrainingConfig& config, std::optional<ToyGenerator> initial) {
  config.validate();
  dataset.validate(population.size());
  check_dims(rewards, population, pool);
  ResamplingResult out;
  out.generator = initial ? *initial : empirical_generator(dataset);
  check_dims(out.generator, rewards);
  std::mt19937_64 rng(config.seed);
  const auto total_items = static_cast<std::size_t>(
      std::llround(std::accumulate(dataset.counts.begin(), dataset.counts.end(), 0.0)));
  const auto exact0 = exact_scores(out.generator, rewards);
  out.trace.push_back({0, exact0, exact0,
                       objective_F(out.generator, rewards, population, pool, config.beta)});

  for (std::size_t t = 1; t <= config.outer_rounds; ++t) {
    // Monte Carlo estimate of S_phi from the evaluation budget.
    auto p = out.generator.probabilities();
    std::discrete_distribution<std::size_t> draw(p.begin(), p.end());
    std::vector<double> s_est(rewards.types(), 0.0);
    for (std::size_t s = 0; s < config.eval_budget; ++s) {
      const std::size_t x = draw(rng);
      for (TypeIndex k = 0; k < s_est.size(); ++k) s_est[k] += rewards.r[k][x];
    }
    for (double& v : s_est) v /= static_cast<double>(config.eval_budget);

    const auto w = resample_weights(dataset, rewards, s_est, pool, population, config.beta,
                                    config.gamma, config.structured);
    std::discrete_distribution<std::size_t> resample(w.begin(), w.end());
    std::vector<double> freq(w.size(), 0.0);
    const std::size_t n = std::max<std::size_t>(total_items, 1);
    for (std::size_t s = 0; s < n; ++s) freq[resample(rng)] += 1.0;
    for (double& v : freq) v /= static_cast<double>(n);

    // Incremental maximum-likelihood fit toward the resampled frequencies.
    for (std::size_t e = 0; e < config.inner_epochs; ++e)
      for (std::size_t x = 0; x < p.size(); ++x)
        p[x] = (1.0 - config.blend) * p[x] + config.blend * freq[x];
    if (config.inner_epochs > 0)
      out.generator = ToyGenerator::from_distribution(out.generator.outcome_labels, p);

    out.trace.push_back({t, s_est, exact_scores(out.generator, rewards),
                         objective_F(out.generator, rewards, population, pool, config.beta)});
  }
  return out;
}

namespace {

std::vector<double> reinforce_grad_F(const ToyGenerator& gen, const RewardTable& rewards,
                                     const UserPopulation& population, const OpponentPool& pool,
                                     const TrainingConfig& config, std::vector<double>& baseline,
                                     std::mt19937_64& rng) {
  // Gate coefficients come from a sample estimate of S_phi, not the exact value.
  const auto p = gen.probabilities();
  std::discrete_distribution<std::size_t> draw(p.begin(), p.end());
  std::vector<double> s_est(rewards.types(), 0.0);
  for (std::size_t s = 0; s < config.reinforce_samples; ++s) {
    const std::size_t x = draw(rng);
    for (TypeIndex k = 0; k < s_est.size(); ++k) s_est[k] += rewards.r[k][x];
  }
  for (double& v : s_est) v /= static_cast<double>(config.reinforce_samples);
  const auto sigma = adoption_gate(s_est, pool, config.beta);
  std::vector<double> g(gen.size(), 0.0);
  for (TypeIndex k = 0; k < rewards.types(); ++k) {
    const double coef = population.weight(k) *
                        (sigma[k] + config.beta * sigma[k] * (1.0 - sigma[k]) * s_est[k]);
    const auto gs = grad_S_reinforce(gen, rewards, k, config.reinforce_samples, baseline,
                                     config.baseline_decay, rng);
    for (std::size_t x = 0; x < g.size(); ++x) g[x] += coef * gs[x];
  }
  return g;
}

}  // namespace

DirectGradientResult train_direct_gradient(const Dataset& dataset, const RewardTable& rewards,
                                           const UserPopulation& population,
                                           const OpponentPool& pool, const TrainingConfig& config,
                                           std::optional<ToyGenerator> initial) {
  config.validate();
  if (config.inner_epochs < 1) throw InvalidParameterError("direct-gradient needs at least one epoch");
  dataset.validate(population.size());
  check_dims(rewards, population, pool);
  DirectGradientResult out;
  out.generator = initial ? *initial : empirical_generator(dataset);
  check_dims(out.generator, rewards);
  const auto emp = dataset.empirical();
  std::mt19937_64 rng(config.seed);
  std::vector<double> baseline = exact_scores(out.generator, rewards);

  auto evaluate = [&](const ToyGenerator& g, std::size_t epoch, double eta) {
    DirectGradientRow row;
    row.epoch = epoch;
    row.cross_entropy = cross_entropy(g, dataset);
    row.objective = objective_F(g, rewards, population, pool, config.beta);
    row.loss = row.cross_entropy - config.lambda * row.objective;
    row.learning_rate = eta;
    row.s_exact = exact_scores(g, rewards);
    return row;
  };
  auto trace_matrix = [&] {
    std::vector<std::vector<double>> m;
    for (const auto& r : out.trace)
      m.push_back({static_cast<double>(r.epoch), r.cross_entropy, r.objective, r.loss});
    return m;
  };

  double eta = config.learning_rate;
  out.trace.push_back(evaluate(out.generator, 0, eta));
  for (std::size_t e = 1; e <= config.inner_epochs; ++e) {
    const auto p = out.generator.probabilities();
    const auto gf = config.use_reinforce
                        ? reinforce_grad_F(out.generator, rewards, population, pool, config,
                                           baseline, rng)
                        : grad_F_exact(out.generator, rewards, population, pool, config.beta);
    std::vector<double> grad(p.size());
    for (std::size_t x = 0; x < p.size(); ++x) grad[x] = (p[x] - emp[x]) - config.lambda * gf[x];

    const double before = out.trace.back().loss;
    ToyGenerator next = out.generator;
    DirectGradientRow row;
    for (int attempt = 0;; ++attempt) {
      for (std::size_t x = 0; x < p.size(); ++x)
        next.logits[x] = out.generator.logits[x] - eta * grad[x];
      row = evaluate(next, e, eta);
      if (!std::isfinite(row.loss)) {
        out.trace.push_back(row);
        throw TrainingDivergedError("loss became non-finite at epoch " + std::to_string(e),
                                    trace_matrix());
      }
      // Stochastic gradients take the step as is; exact ones back off on any increase.
      if (config.use_reinforce || row.loss <= before + 1e-9 || attempt >= 60) break;
      eta *= 0.5;
    }
    out.generator = next;
    out.trace.push_back(row);
  }
  return out;
}

EntrantReport evaluate_entrant(const ToyGenerator& entrant, const RewardTable& rewards,
                               const UserPopulation& population, const ScoreMatrix& incumbents,
                               std::size_t n_platforms) {
  if (incumbents.types() != population.size() || rewards.types() != population.size())
    throw InvalidInputError("entrant evaluation inputs disagree on the type count");
  EntrantReport rep;
  rep.entrant_scores = exact_scores(entrant, rewards);
  rep.game = GameSpec(incumbents.with_row(rep.entrant_scores, "entrant"), population, n_platforms);
  rep.entrant = incumbents.models();
  rep.pne = enumerate_pne(rep.game);
  for (const auto& e : rep.pne)
    if (std::find(e.profile.choices.begin(), e.profile.choices.end(), rep.entrant) !=
        e.profile.choices.end())
      rep.adopted_in_pne = true;
  rep.dynamics = run_dynamics(rep.game, StrategyProfile(std::vector<ModelIndex>(n_platforms, 0)));
  for (const auto& p : rep.dynamics.outcome_profiles())
    if (std::find(p.choices.begin(), p.choices.end(), rep.entrant) != p.choices.end())
      rep.adopted_in_dynamics = true;
  rep.metrics = metrics_for_outcome(rep.game, rep.dynamics);
  return rep;
}

ToyEntryInstance toy_entry_instance() {
  ToyEntryInstance t;
  t.outcome_labels = {"a1", "a2", "b1", "b2", "c1", "c2"};
  t.dataset.attributes = {"a", "b", "c"};
  t.dataset.item_attribute = {0, 0, 1, 1, 2, 2};
  t.dataset.counts = {30, 20, 30, 20, 10, 10};
  // Types: major, left, right.
  t.dataset.preference = {{0.1, 0.1, 0.8}, {0.8, 0.1, 0.1}, {0.1, 0.8, 0.1}};
  t.rewards = RewardTable({{0.1, 0.1, 0.2, 0.2, 0.9, 0.7},
                           {0.9, 0.7, 0.2, 0.1, 0.1, 0.1},
                           {0.1, 0.2, 0.9, 0.8, 0.1, 0.1}});
  t.population = UserPopulation({"major", "left", "right"}, {0.5, 0.3, 0.2});
  t.incumbents = ScoreMatrix({{0.35, 0.80, 0.30}, {0.30, 0.30, 0.78}}, {"left_model", "right_model"});
  t.n_platforms = 2;
  t.targeted_type = 0;
  return t;
}

}  // namespace pm
