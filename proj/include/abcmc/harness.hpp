#pragma once

// Study configuration, replication loop, result tables and output files.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "abcmc/engine.hpp"
#include "abcmc/oracles.hpp"

namespace abcmc {

enum class Study { normal_known, normal_unknown, expo_family, gandk, toad_sim, toad_real };

std::string study_name(Study s);
Study parse_study(const std::string& name);

inline constexpr int kConfigSchemaVersion = 1;

struct ExperimentConfig {
  Study study = Study::normal_known;
  std::size_t n = 100;
  std::size_t n_days = 63;
  std::size_t n_toads = 66;
  std::size_t n_datasets = 20;
  std::size_t n_draws = 100000;
  std::vector<AbcMethod> methods;
  std::vector<double> quantiles;
  /// 1-based models that generate observed datasets (n_datasets each).
  std::vector<int> true_models;
  /// Data-generating parameters per true model; study defaults otherwise.
  std::map<int, Params> true_params;

  // normal studies
  double mu_tilde = 3.0;
  double sigma = 1.0;
  double c = 100.0;
  bool gamma_prior_on_precision = false;
  BayesFactorForm bayes_factor_form = BayesFactorForm::conjugate;

  // toad studies
  double omega = 0.2;
  std::vector<int> lags{1, 2, 4, 8};
  double return_radius = 10.0;
  std::size_t mad_draws = 10000;
  std::filesystem::path data_file;

  TieRule ties = TieRule::average;
  std::uint64_t master_seed = 1;
  std::filesystem::path output_dir = "results";
  std::size_t workers = 0;
  bool plots = true;

  void validate() const;
};

/// Parses a config object; unknown keys and wrong types throw ConfigError.
/// Relative data paths are resolved against base_dir.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Study defaults (methods, quantiles, true models, parameters) filled in
/// where the config left them empty.
ExperimentConfig with_defaults(ExperimentConfig config);

/// Parses a method given as a label ("ABC-Wass (log)") or an object.
AbcMethod parse_method(const nlohmann::json& j, Study study, double omega, std::size_t mad_draws);

struct ResultRow {
  std::string method;
  std::optional<double> quantile;  ///< empty for the exact benchmark row
  std::string true_model;          ///< "M1", ... or "NA"
  std::optional<double> mae;
  std::optional<double> mse;
  std::optional<double> per;
  std::size_t n_datasets = 0;
  std::string benchmark;
};

struct DatasetEstimate {
  std::size_t dataset = 0;
  int true_model = -1;  ///< 0-based; -1 for real data
  std::string method;
  std::optional<double> quantile;
  std::vector<double> probs;
  std::optional<std::vector<double>> truth;
};

struct ResultTable {
  Study study = Study::normal_known;
  std::size_t n = 0;  ///< data size (n, or n_days * n_toads)
  std::vector<std::string> model_labels;
  std::vector<ResultRow> rows;
  std::vector<DatasetEstimate> estimates;
  nlohmann::ordered_json metadata;
};

ResultTable run_study(const ExperimentConfig& config);

struct OutputFiles {
  std::filesystem::path summary_csv;
  std::filesystem::path estimates_csv;
  std::filesystem::path metadata_json;
  std::vector<std::filesystem::path> plots;
};

OutputFiles emit_outputs(const ResultTable& table, const std::filesystem::path& dir, bool plots = true);

std::string summary_csv(const ResultTable& table);
std::string estimates_csv(const ResultTable& table);

// ---------------------------------------------------------------------------
// SVG plots

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

/// Scatter plot on [0, 1] x [0, 1] with a y = x reference line.
std::string scatter_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                        const std::vector<PlotSeries>& series);

struct BoxGroup {
  std::string name;
  std::vector<double> values;
};

/// Box-and-whisker plot of values in [0, 1] (Tukey whiskers).
std::string boxplot_svg(const std::string& title, const std::string& y_label, const std::vector<BoxGroup>& groups);

}  // namespace abcmc
