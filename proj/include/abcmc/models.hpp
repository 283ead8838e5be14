#pragma once

// Candidate models for every study: prior sampler, forward simulator and
// summary-statistic map, plus the toad movement simulator and its features.

#include <array>
#include <functional>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "abcmc/dataset.hpp"
#include "abcmc/error.hpp"
#include "abcmc/rng.hpp"

namespace abcmc {

using Params = std::vector<double>;

/// A candidate model M_k. The simulator is pure given (theta, shape, stream).
/// All models taking part in one model-choice problem share one summary map.
struct ModelSpec {
  int id = 1;
  std::string label;
  std::vector<std::string> param_names;
  std::function<Params(Rng&)> prior_sampler;
  std::function<Dataset(const Params&, DataShape, Rng&)> simulator;
  std::function<std::vector<double>(const Dataset&)> summary_map;
};

// ---------------------------------------------------------------------------
// Normal mean test

struct NormalMeanConfig {
  double mu_tilde = 3.0;
  /// Known standard deviation; nullopt selects the unknown-variance variant.
  std::optional<double> sigma = 1.0;
  double c = 100.0;
  /// Gamma(shape, rate) prior used when the variance is unknown.
  double variance_prior_shape = 0.1;
  double variance_prior_rate = 0.1;
  /// When true the gamma prior is placed on the precision 1/sigma^2 instead
  /// of on the variance.
  bool gamma_prior_on_precision = false;
};

/// M0 fixes mu = mu_tilde; M1 draws mu ~ N(mu_tilde, c sigma^2).
/// Known sigma: M0 has no parameters, M1 has (mu); summary is the mean.
/// Unknown sigma: M0 has (sigma2), M1 has (mu, sigma2); summary is
/// (mean, sample variance).
std::array<ModelSpec, 2> normal_mean_models(const NormalMeanConfig& config);

// ---------------------------------------------------------------------------
// Exponential family selection

/// M1: Exp(theta), theta ~ Exp(1); M2: LogNormal(theta, 1), theta ~ N(0, 1);
/// M3: Gamma(2, theta), theta ~ Exp(1). Summary (sum y, sum log y, sum log^2 y).
std::array<ModelSpec, 3> expo_family_models();

/// Parameters giving each model mean 2: 1/2, log 2 - 1/2, 1.
Params expo_true_params(int model_id);

std::vector<double> expo_summary(const Dataset& data);

// ---------------------------------------------------------------------------
// g-and-k sub-models

/// a = 0, b = 1, c = 0.8 in both. M1: g = 0, k ~ U(-0.5, 5), params (k).
/// M2: g ~ U(0, 4), k ~ U(-0.5, 5), params (g, k). Summary: type-7 0.1 and
/// 0.9 quantiles.
std::array<ModelSpec, 2> gandk_models();

/// k = 2 for M1; g = 1, k = 2 for M2.
Params gandk_true_params(int model_id);

std::vector<double> gandk_summary(const Dataset& data);

// ---------------------------------------------------------------------------
// Toad movement

enum class ToadModel { random_return = 1, nearest_return = 2, distance_return = 3 };

struct ToadParams {
  double alpha = 1.7;
  double gamma = 34.0;
  double p0 = 0.6;
  double d0 = 758.0;  ///< distance_return only
};

struct ToadConfig {
  std::size_t n_days = 63;
  std::size_t n_toads = 66;
  std::vector<int> lags{1, 2, 4, 8};
  double return_radius = 10.0;
  ToadModel model = ToadModel::random_return;
  ToadParams params;

  void validate() const;
};

/// Locations of every toad on every day (n_days x n_toads). Day 1 is 0 for
/// every toad.
Dataset simulate_toads(const ToadConfig& config, SeedSpec seed);
Dataset simulate_toads(ToadModel model, const ToadParams& params, std::size_t n_days, std::size_t n_toads,
                       Rng& rng);

/// Outcome probabilities for one night under the distance-based model: stay at
/// the foraging endpoint x, or return to refuge i.
struct ReturnProbabilities {
  double stay = 1.0;
  std::vector<double> refuge;
};

ReturnProbabilities distance_return_probabilities(double x, std::span<const double> refuges, double p0,
                                                  double d0);

/// Displacements at one lag, split at the return radius.
struct LagFeatures {
  int lag = 0;
  std::size_t return_count = 0;
  std::vector<double> non_returns;  ///< ascending
  std::size_t pair_count = 0;       ///< valid (non-missing) day pairs, all toads
};

/// Thrown when a lag has no usable displacements.
class EmptyFeatureError : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

std::vector<LagFeatures> extract_lag_features(const Dataset& locations, std::span<const int> lags,
                                              double return_radius);

/// 11 statistics per lag: log of the 10 successive differences of the
/// non-return quantiles at levels 0, 0.1, ..., 1 (differences floored at
/// 1e-12), then the return count.
std::vector<double> toad_summary_stats(std::span<const LagFeatures> features);

inline constexpr double kQuantileDiffFloor = 1e-12;

/// Priors alpha ~ U(1, 2), gamma ~ U(10, 100), p0 ~ U(0, 1) and, for the
/// distance model, d0 ~ U(20, 2000). Summary map: toad_summary_stats.
std::array<ModelSpec, 3> toad_models(const std::vector<int>& lags, double return_radius);

Params toad_params_vector(ToadModel model, const ToadParams& params);

/// Parameter values used to generate simulated observations for each model.
ToadParams toad_reference_params(ToadModel model);

/// Observation matrix loaded from CSV (rows = days, columns = toads).
struct ToadData {
  Dataset locations;
  std::size_t missing_cells = 0;
  std::vector<std::size_t> observed_days_per_toad;
  bool had_header = false;
};

/// Reads a delimited text matrix. Empty cells, "NA" and "NaN" are missing.
/// A leading non-numeric row is treated as a header. Throws ConfigError on
/// ragged rows or unparsable cells and IoError when the file cannot be read.
ToadData load_toad_csv(const std::filesystem::path& path);

}  // namespace abcmc
