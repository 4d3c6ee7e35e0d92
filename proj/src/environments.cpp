#include "pm/environments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace pm {

namespace {

double squared_distance(const Point& a, const Point& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

// Lower-triangular factor of a symmetric positive-definite matrix.
std::vector<std::vector<double>> cholesky(const std::vector<std::vector<double>>& a) {
  const std::size_t d = a.size();
  std::vector<std::vector<double>> l(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) {
    if (a[i].size() != d) throw InvalidInputError("covariance must be square");
    for (std::size_t j = 0; j < d; ++j)
      if (std::abs(a[i][j] - a[j][i]) > 1e-12) throw InvalidInputError("covariance must be symmetric");
  }
  for (std::size_t j = 0; j < d; ++j) {
    double diag = a[j][j];
    for (std::size_t k = 0; k < j; ++k) diag -= l[j][k] * l[j][k];
    if (!(diag > 0.0)) throw InvalidInputError("covariance is not positive-definite");
    l[j][j] = std::sqrt(diag);
    for (std::size_t i = j + 1; i < d; ++i) {
      double v = a[i][j];
      for (std::size_t k = 0; k < j; ++k) v -= l[i][k] * l[j][k];
      l[i][j] = v / l[j][j];
    }
  }
  return l;
}

std::size_t nearest(const Point& x, const std::vector<Point>& anchors) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < anchors.size(); ++k) {
    const double d = squared_distance(x, anchors[k]);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

}  // namespace

ScoreMatrix rbf_scores(const std::vector<RbfModelSpec>& models, const std::vector<Point>& types,
                       std::vector<std::string> model_labels) {
  if (models.empty() || types.empty()) throw InvalidInputError("rbf scores need models and types");
  const std::size_t d = types.front().size();
  std::vector<std::vector<double>> rows;
  for (const auto& m : models) {
    if (m.kernels.empty()) throw InvalidInputError("rbf model needs at least one kernel");
    std::vector<double> row;
    for (const auto& theta : types) {
      if (theta.size() != d) throw InvalidInputError("type coordinates differ in dimension");
      double s = m.bias;
      for (const auto& k : m.kernels) {
        if (!(k.width > 0.0)) throw InvalidParameterError("rbf width must be positive");
        if (k.center.size() != d) throw InvalidInputError("kernel center dimension mismatch");
        s += k.amplitude * std::exp(-squared_distance(theta, k.center) / (2.0 * k.width * k.width));
      }
      row.push_back(std::clamp(s, 0.0, 1.0));
    }
    rows.push_back(std::move(row));
  }
  return ScoreMatrix(std::move(rows), std::move(model_labels));
}

GmmPopulation gmm_population(const GmmPopulationSpec& spec) {
  if (spec.components.empty()) throw InvalidInputError("mixture needs at least one component");
  if (spec.k_types < 1) throw InvalidInputError("need at least one user type");
  if (spec.sample_size < spec.k_types) throw InvalidInputError("sample smaller than type count");
  const std::size_t d = spec.components.front().mean.size();
  if (d == 0) throw InvalidInputError("mixture dimension must be positive");
  std::vector<double> weights;
  std::vector<std::vector<std::vector<double>>> factors;
  double total = 0.0;
  for (const auto& c : spec.components) {
    if (c.mean.size() != d || c.covariance.size() != d)
      throw InvalidInputError("mixture component dimension mismatch");
    if (!(c.weight >= 0.0)) throw InvalidInputError("component weights must be non-negative");
    weights.push_back(c.weight);
    total += c.weight;
    factors.push_back(cholesky(c.covariance));
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidInputError("component weights must sum to 1");

  // Noise is drawn before the shift is applied, so samples for different
  // shifts differ by exactly the shift.
  std::mt19937_64 rng(spec.seed);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Point> draws(spec.sample_size, Point(d, 0.0));
  for (auto& x : draws) {
    const std::size_t q = pick(rng);
    Point z(d);
    for (double& v : z) v = normal(rng);
    const auto& l = factors[q];
    for (std::size_t i = 0; i < d; ++i) {
      double v = spec.components[q].mean[i];
      for (std::size_t j = 0; j <= i; ++j) v += l[i][j] * z[j];
      x[i] = v;
    }
    x[0] += spec.shift;
  }

  // k-means++ initialization on a separate stream.
  std::mt19937_64 init_rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<Point> anchors;
  anchors.push_back(draws[std::uniform_int_distribution<std::size_t>(0, draws.size() - 1)(init_rng)]);
  std::vector<double> dist(draws.size(), std::numeric_limits<double>::infinity());
  while (anchors.size() < spec.k_types) {
    double sum = 0.0;
    for (std::size_t s = 0; s < draws.size(); ++s) {
      dist[s] = std::min(dist[s], squared_distance(draws[s], anchors.back()));
      sum += dist[s];
    }
    std::size_t chosen = 0;
    if (sum > 0.0) {
      double target = std::uniform_real_distribution<double>(0.0, sum)(init_rng);
      for (chosen = 0; chosen + 1 < draws.size(); ++chosen) {
        target -= dist[chosen];
        if (target < 0.0) break;
      }
    }
    anchors.push_back(draws[chosen]);
  }

  std::vector<std::size_t> assign(draws.size(), 0);
  for (std::size_t it = 0; it <= spec.kmeans_iterations; ++it) {
    for (std::size_t s = 0; s < draws.size(); ++s) assign[s] = nearest(draws[s], anchors);
    if (it == spec.kmeans_iterations) break;
    std::vector<Point> sums(anchors.size(), Point(d, 0.0));
    std::vector<std::size_t> counts(anchors.size(), 0);
    for (std::size_t s = 0; s < draws.size(); ++s) {
      ++counts[assign[s]];
      for (std::size_t i = 0; i < d; ++i) sums[assign[s]][i] += draws[s][i];
    }
    for (std::size_t k = 0; k < anchors.size(); ++k) {
      if (counts[k] == 0) continue;  // empty cluster keeps its anchor
      for (std::size_t i = 0; i < d; ++i)
        anchors[k][i] = sums[k][i] / static_cast<double>(counts[k]);
    }
  }

  std::vector<double> pi(anchors.size(), 0.0);
  for (std::size_t a : assign) pi[a] += 1.0;
  for (double& p : pi) p /= static_cast<double>(draws.size());
  return {UserPopulation({}, pi), anchors};
}

ScoreMatrix scores_from_preferences(const std::vector<std::vector<double>>& perf,
                                    const PreferenceTable& prefs, bool normalize,
                                    std::vector<std::string> model_labels) {
  const std::size_t c = prefs.criteria.size();
  if (perf.empty()) throw InvalidInputError("performance table is empty");
  if (prefs.weights.empty()) throw InvalidInputError("preference table is empty");
  std::vector<std::vector<double>> thetas;
  for (const auto& w : prefs.weights) {
    if (w.size() != c) throw InvalidInputError("preference row length does not match criteria");
    for (double v : w)
      if (!(v >= 0.0)) throw InvalidInputError("preference weights must be non-negative");
    auto theta = w;
    if (normalize) {
      const double sum = std::accumulate(w.begin(), w.end(), 0.0);
      if (sum > 0.0)
        for (double& v : theta) v /= sum;
    }
    thetas.push_back(std::move(theta));
  }
  std::vector<std::vector<double>> rows;
  for (const auto& p : perf) {
    if (p.size() != c) throw InvalidInputError("performance row length does not match criteria");
    std::vector<double> row;
    for (const auto& theta : thetas) {
      double s = 0.0;
      for (std::size_t i = 0; i < c; ++i) s += theta[i] * p[i];
      row.push_back(s);
    }
    rows.push_back(std::move(row));
  }
  return ScoreMatrix(std::move(rows), std::move(model_labels));
}

std::vector<RbfModelSpec> synthetic_rbf_models() {
  return {
      {0.12, {{{1.5, 0.0}, 0.90, 1.20}}},
      {0.05, {{{0.0, 0.0}, 1.30, 0.35}}},
      {0.08, {{{3.0, 0.0}, 1.00, 0.50}}},
      {0.06, {{{0.0, 0.0}, 0.70, 0.70}, {{3.0, 0.0}, 0.70, 0.70}}},
      {0.05, {{{1.5, 0.6}, 1.00, 0.40}}},
      {0.05, {{{1.5, -0.6}, 1.00, 0.40}}},
  };
}

GmmPopulationSpec synthetic_gmm_spec(double shift, double major_weight, std::uint64_t seed) {
  GmmPopulationSpec g;
  const std::vector<std::vector<double>> cov{{0.25, 0.0}, {0.0, 0.25}};
  g.components = {{major_weight, {0.0, 0.0}, cov}, {1.0 - major_weight, {3.0, 0.0}, cov}};
  g.k_types = 12;
  g.shift = shift;
  g.seed = seed;
  return g;
}

GameSpec synthetic_instance(double shift, double major_weight, std::uint64_t seed,
                            std::size_t n_platforms) {
  const auto pop = gmm_population(synthetic_gmm_spec(shift, major_weight, seed));
  auto scores = rbf_scores(synthetic_rbf_models(), pop.anchors);
  return GameSpec(std::move(scores), pop.population, n_platforms);
}

}  // namespace pm
