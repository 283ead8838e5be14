#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace abcmc {

/// One-dimensional dataset together with its ascending order. Construction
/// validates the values (n >= 1, no NaN) and computes the sort permutation
/// once; the object is immutable afterwards and safe to share across threads.
class EmpiricalSample {
 public:
  explicit EmpiricalSample(std::vector<double> values);

  /// Builds a sample from values already in ascending order (checked).
  static EmpiricalSample from_sorted(std::vector<double> sorted);

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  /// Permutation such that values()[order()[i]] is non-decreasing in i.
  std::span<const std::size_t> order() const { return order_; }
  std::span<const double> sorted() const { return sorted_; }

  /// Elementwise natural log; every value must be strictly positive.
  EmpiricalSample log_transformed() const;

 private:
  EmpiricalSample() = default;

  std::vector<double> values_;
  std::vector<std::size_t> order_;
  std::vector<double> sorted_;
};

/// Type-7 empirical quantile (linear interpolation at h = (n-1)p + 1) of an
/// ascending sample.
double quantile_sorted(std::span<const double> sorted, double p);

/// Median of an arbitrary (unsorted) sample.
double median(std::vector<double> values);

/// Median absolute deviation about the median, unscaled.
double median_abs_deviation(std::span<const double> values);

}  // namespace abcmc
