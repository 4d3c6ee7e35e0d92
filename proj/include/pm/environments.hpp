#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pm/types.hpp"

namespace pm {

using Point = std::vector<double>;

struct RbfKernel {
  Point center;
  double amplitude = 0.0;
  double width = 1.0;
};

struct RbfModelSpec {
  double bias = 0.0;
  std::vector<RbfKernel> kernels;
};

/// S_j(theta_k) = clamp(b_j + sum_r A exp(-|theta - mu|^2 / (2 sigma^2)), 0, 1).
ScoreMatrix rbf_scores(const std::vector<RbfModelSpec>& models, const std::vector<Point>& types,
                       std::vector<std::string> model_labels = {});

struct GmmComponent {
  double weight = 0.0;
  Point mean;
  std::vector<std::vector<double>> covariance;
};

struct GmmPopulationSpec {
  std::vector<GmmComponent> components;
  std::size_t k_types = 1;
  double shift = 0.0;  // added to the first coordinate of every draw
  std::uint64_t seed = 0;
  std::size_t sample_size = 10'000;
  std::size_t kmeans_iterations = 20;
};

struct GmmPopulation {
  UserPopulation population;
  std::vector<Point> anchors;
};

/// Samples the shifted mixture, fits K anchors with seeded k-means++ and Lloyd
/// iterations, and weights each anchor by its share of the draws.
GmmPopulation gmm_population(const GmmPopulationSpec& spec);

struct PreferenceTable {
  std::vector<std::string> criteria;
  std::vector<std::string> type_labels;
  std::vector<std::vector<double>> weights;  // one row per type, one column per criterion
};

/// S_j(theta) = sum_c theta_c perf[j][c], optionally normalizing each theta first.
ScoreMatrix scores_from_preferences(const std::vector<std::vector<double>>& perf,
                                    const PreferenceTable& prefs, bool normalize,
                                    std::vector<std::string> model_labels = {});

/// The six score functions and two-component population of the synthetic setup.
std::vector<RbfModelSpec> synthetic_rbf_models();
GmmPopulationSpec synthetic_gmm_spec(double shift, double major_weight, std::uint64_t seed);
/// Synthetic game with K = 12 types and N = 3 platforms.
GameSpec synthetic_instance(double shift = 0.0, double major_weight = 0.6,
                            std::uint64_t seed = 7, std::size_t n_platforms = 3);

}  // namespace pm
