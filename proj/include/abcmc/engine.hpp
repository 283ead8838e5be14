#pragma once

// Rejection ABC model choice with post-hoc quantile thresholding.

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "abcmc/dataset.hpp"
#include "abcmc/discrepancies.hpp"
#include "abcmc/models.hpp"
#include "abcmc/rng.hpp"

namespace abcmc {

// ---------------------------------------------------------------------------
// Methods

/// Summary-based ABC: rho(eta(y), eta(z)). With mad_weighted the metric
/// becomes a weighted Euclidean distance with weights 1/MAD estimated from the
/// prior predictive.
struct SummaryMethod {
  SummaryMetric metric = SummaryMetric::euclidean();
  bool mad_weighted = false;
  std::size_t mad_draws = 10000;
};

enum class DistanceKind { cvm, wasserstein1, mmd };

/// Discrepancy-based ABC on the raw (optionally log-transformed) data.
struct DiscrepancyMethod {
  DistanceKind distance = DistanceKind::wasserstein1;
  KernelSpec kernel = KernelSpec::gaussian_median();
  bool log_transform = false;
  TieRule ties = TieRule::average;
};

/// Toad-data distance: L1 return-count distances per lag (components 1-4)
/// and a statistical distance on the non-return displacements per lag
/// (components 5-8), combined with weight omega over the whole run.
struct CombinedMethod {
  DiscrepancyMethod statistic;
  double omega = 0.2;
};

struct AbcMethod {
  std::variant<SummaryMethod, DiscrepancyMethod, CombinedMethod> kind;
  /// Display label; method_label() is used when empty.
  std::string label;

  static AbcMethod summary(SummaryMetric metric = SummaryMetric::euclidean());
  static AbcMethod summary_mad(std::size_t mad_draws = 10000);
  static AbcMethod discrepancy(DistanceKind distance, bool log_transform = false,
                               KernelSpec kernel = KernelSpec::gaussian_median());
  static AbcMethod combined(DistanceKind distance, double omega, bool log_transform = false);

  void validate() const;
};

/// "ABC-Stat", "ABC-CvM", "ABC-Wass", "ABC-Wass (log)", "ABC-MMD", "ABC-MMD (log)", ...
std::string method_label(const AbcMethod& method);

// ---------------------------------------------------------------------------
// Problem and run

/// Lag/radius settings for matrix (toad) data.
struct LagFeatureSpec {
  std::vector<int> lags{1, 2, 4, 8};
  double return_radius = 10.0;
};

/// Everything shared by the draws of one model-choice problem.
struct AbcProblem {
  std::vector<ModelSpec> models;
  /// Prior model probabilities; empty means uniform.
  std::vector<double> model_prior;
  DataShape shape;
  /// Cells that are missing in the observed matrix; copied onto simulations.
  /// Empty means no mask.
  std::vector<bool> missing_mask;
  /// Required for combined methods.
  std::optional<LagFeatureSpec> lag_features;

  void validate() const;
};

struct EngineOptions {
  std::size_t workers = 0;  ///< 0 selects default_workers()
  int max_retries = 3;
};

/// ABCMC_WORKERS if set, otherwise the hardware concurrency.
std::size_t default_workers();

/// Draw-level outputs shared by every method and dataset of a batch.
struct DrawTable {
  std::vector<int> model;                  ///< 0-based model index
  std::vector<std::size_t> theta_offset;   ///< size N + 1
  std::vector<double> theta;
  std::size_t resampled = 0;               ///< draws that needed a fresh stream
  std::vector<std::string> failures;       ///< one line per simulator failure

  std::size_t size() const { return model.size(); }
  std::span<const double> params(std::size_t i) const {
    return {theta.data() + theta_offset[i], theta_offset[i + 1] - theta_offset[i]};
  }
};

struct RunMetadata {
  std::vector<std::pair<std::string, double>> bandwidths;  ///< resolved Gaussian bandwidths
  std::vector<double> mad_weights;
  std::vector<std::string> warnings;
};

struct AbcRun {
  std::shared_ptr<const DrawTable> draws;
  AbcMethod method;
  std::vector<std::string> component_names;
  std::vector<double> components;  ///< N x component_names.size(), row-major
  std::vector<double> distances;   ///< final distance per draw (combined already applied)
  SeedSpec seed;
  std::size_t n_models = 0;
  RunMetadata meta;

  std::size_t size() const { return distances.size(); }
};

/// N draws for a single observed dataset and method.
AbcRun run_abc(const AbcProblem& problem, const Dataset& observed, const AbcMethod& method, std::size_t n_draws,
               SeedSpec seed, const EngineOptions& options = {});

/// N draws shared across several observed datasets and methods; result is
/// indexed [dataset][method]. Each entry equals the corresponding run_abc
/// result for the same seed.
std::vector<std::vector<AbcRun>> run_abc_batch(const AbcProblem& problem, std::span<const Dataset> observed,
                                               std::span<const AbcMethod> methods, std::size_t n_draws,
                                               SeedSpec seed, const EngineOptions& options = {});

/// Weights 1/max(MAD, 1e-12) of each summary statistic under the prior
/// predictive (model prior respected).
struct MadWeights {
  std::vector<double> weights;
  std::vector<std::string> warnings;
};

MadWeights estimate_mad_weights(const AbcProblem& problem, std::size_t n_prior_draws, SeedSpec seed,
                                const EngineOptions& options = {});

inline constexpr double kMadFloor = 1e-12;

// ---------------------------------------------------------------------------
// Thresholding

struct ThresholdPolicy {
  double q = 0.001;
};

/// Number of draws kept by a quantile threshold: ceil(q N); PolicyError when that keeps no draws.
std::size_t accepted_count(double q, std::size_t n_draws);

struct PosteriorEstimate {
  std::vector<double> model_probs;
  /// Accepted parameter draws grouped by model (0-based).
  std::vector<std::vector<Params>> accepted;
  std::vector<std::size_t> accepted_draws;  ///< draw indices, ascending distance
  double epsilon = 0.0;
  std::size_t n_accepted = 0;
};

PosteriorEstimate apply_threshold(const AbcRun& run, ThresholdPolicy policy);

struct ParamSummary {
  std::string name;
  double mean = 0.0;
  double q05 = 0.0;
  double median = 0.0;
  double q95 = 0.0;
};

/// Descriptive summaries of the accepted parameters of model k (0-based);
/// nullopt when model k has no accepted draws.
std::optional<std::vector<ParamSummary>> posterior_param_summary(const PosteriorEstimate& estimate,
                                                                 std::size_t k,
                                                                 std::span<const std::string> names = {});

// ---------------------------------------------------------------------------
// Serialization

inline constexpr int kRunFormatVersion = 1;

/// CSV dump: a "# {json}" header line, then draw,model,theta_1..,components..,distance.
void write_run_csv(const std::filesystem::path& path, const AbcRun& run);

struct RunDump {
  std::string header_json;
  std::vector<std::string> columns;
  std::vector<int> model;  ///< 1-based as written
  std::vector<std::vector<double>> theta;
  std::vector<std::vector<double>> components;
  std::vector<double> distances;
};

RunDump read_run_csv(const std::filesystem::path& path);

}  // namespace abcmc
