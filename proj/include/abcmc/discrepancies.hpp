#pragma once

// Two-sample distances between empirical distributions and between summary
// vectors, in the form consumed by the ABC acceptance step.

#include <array>
#include <cstdint>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "abcmc/empirical.hpp"

namespace abcmc {

/// How ties in the pooled sample are ranked by the Cramer-von Mises distance.
enum class TieRule {
  average,      ///< tied values share the mean of their ranks
  input_order,  ///< first sample before second, then by position
};

/// Wasserstein-1 between equal-size samples: mean absolute gap between order
/// statistics. Throws ShapeError on unequal sizes.
double wasserstein1(const EmpiricalSample& y, const EmpiricalSample& z);

/// Wasserstein-1 between empirical laws of arbitrary sizes, integrating the
/// absolute difference of the two empirical quantile functions. Agrees with
/// wasserstein1() when the sizes match.
double wasserstein1_general(std::span<const double> y_sorted, std::span<const double> z_sorted);

/// Two-sample Cramer-von Mises statistic U/(2n^2) - (4n^2-1)/(12n) for
/// equal-size samples, ranks taken in the pooled sample.
double cvm(const EmpiricalSample& y, const EmpiricalSample& z, TieRule ties = TieRule::average);

/// Anderson's form for sizes N and M:
/// T = U/(NM(N+M)) - (4MN-1)/(6(M+N)), U = N sum(r_i-i)^2 + M sum(s_j-j)^2.
/// Reduces to cvm() when N == M.
double cvm_general(std::span<const double> y_sorted, std::span<const double> z_sorted,
                   TieRule ties = TieRule::average);

struct KernelSpec {
  enum class Kind { gaussian, energy };
  enum class Bandwidth { fixed, median_heuristic };

  Kind kind = Kind::gaussian;
  Bandwidth bandwidth = Bandwidth::median_heuristic;
  /// Raw scale in exp(-(y-z)^2 / (2 sigma)); used when bandwidth is fixed.
  double sigma = 1.0;

  static KernelSpec gaussian_fixed(double sigma);
  static KernelSpec gaussian_median();
  static KernelSpec energy();

  void validate() const;
};

/// Median of squared pairwise gaps, computed on an evenly strided subsample of
/// at most 1000 points of the (sorted) pooled values.
double median_heuristic_sigma(std::span<const double> values);

/// Replaces a median-heuristic bandwidth by the fixed value it resolves to on
/// the given reference values. Energy and fixed kernels pass through.
KernelSpec resolve_bandwidth(const KernelSpec& kernel, std::span<const double> reference);

/// Unbiased MMD^2 estimate. Median-heuristic bandwidths are resolved on the
/// pooled sample. May be negative.
double mmd2_unbiased(const EmpiricalSample& y, const EmpiricalSample& z, const KernelSpec& kernel);

/// Gaussian-kernel MMD^2 against a fixed reference sample. Points are binned
/// on a grid of cells one kernel width h = sqrt(2 sigma) wide. The kernel
/// between two cells is a truncated Hermite series in the within-cell
/// offsets, so each cell needs only its power sums. Cells more than
/// kReach apart are skipped. The reference's self sum and its field on every
/// nearby cell are computed once. Truncation error is below 1e-15 per pair.
class GaussianMmd {
 public:
  static constexpr std::size_t kTerms = 36;
  static constexpr std::int64_t kReach = 7;

  GaussianMmd(std::span<const double> reference_sorted, double sigma);

  /// Unbiased MMD^2 between the reference and an ascending sample of size >= 2.
  double operator()(std::span<const double> other_sorted) const;

  double sigma() const { return sigma_; }

  /// Sum of exp(-(a-b)^2/(2 sigma)) over all ordered pairs, both inputs ascending.
  static double kernel_sum(std::span<const double> a_sorted, std::span<const double> b_sorted,
                           double sigma);

 private:
  using Terms = std::array<double, kTerms>;
  struct Cell {
    std::int64_t index = 0;
    Terms scaled{};   // sum of u^a / a!
    Terms flipped{};  // (-1)^a times scaled
  };
  struct FieldCell {
    std::int64_t index = 0;
    Terms coef{};
  };

  static std::vector<Cell> bin(std::span<const double> sorted, double origin, double inv_h);
  static std::vector<FieldCell> field(const std::vector<Cell>& sources);
  static double apply(const std::vector<FieldCell>& field, const std::vector<Cell>& targets);
  static double self_sum(const std::vector<Cell>& cells);

  std::size_t reference_size_;
  double sigma_;
  double inv_h_;
  double origin_;
  std::vector<FieldCell> reference_field_;
  double reference_within_;  // sum over i != j
};

/// Energy-distance form of the unbiased MMD^2 (kernel -|y-z|), O(n log n).
double energy_mmd2_sorted(std::span<const double> y_sorted, std::span<const double> z_sorted);

struct SummaryMetric {
  enum class Kind { euclidean, l1, weighted_euclidean };
  Kind kind = Kind::euclidean;
  std::vector<double> weights;  ///< weighted_euclidean only, all > 0

  static SummaryMetric euclidean() { return {}; }
  static SummaryMetric l1() { return {Kind::l1, {}}; }
  static SummaryMetric weighted(std::vector<double> w) { return {Kind::weighted_euclidean, std::move(w)}; }
};

double summary_distance(std::span<const double> eta_y, std::span<const double> eta_z,
                        const SummaryMetric& metric);

struct NamedValue {
  std::string name;
  double value = 0.0;
};

struct DistanceRecord {
  std::vector<NamedValue> components;
  std::optional<double> combined;
};

/// Weighted average of the normalised sum of components 1-4 (return-count
/// distances) and the normalised sum of components 5-8 (statistical
/// distances); normalisers are the maxima over all records.
std::vector<double> combine_distances(std::span<const DistanceRecord> records, double omega);

/// Columnar form of combine_distances: `values` holds N rows of 8 components.
std::vector<double> combine_columns(std::span<const double> values, double omega);

}  // namespace abcmc
