#include "abcmc/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "abcmc/error.hpp"

namespace abcmc {

EmpiricalSample::EmpiricalSample(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InsufficientSampleError("empirical sample needs at least one value");
  for (double v : values_) {
    if (std::isnan(v)) throw DomainError("empirical sample contains NaN");
  }
  order_.resize(values_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [this](std::size_t a, std::size_t b) { return values_[a] < values_[b]; });
  sorted_.resize(values_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) sorted_[i] = values_[order_[i]];
}

EmpiricalSample EmpiricalSample::from_sorted(std::vector<double> sorted) {
  if (sorted.empty()) throw InsufficientSampleError("empirical sample needs at least one value");
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (std::isnan(sorted[i])) throw DomainError("empirical sample contains NaN");
    if (i > 0 && sorted[i] < sorted[i - 1]) throw DomainError("from_sorted: values not ascending");
  }
  EmpiricalSample s;
  s.order_.resize(sorted.size());
  std::iota(s.order_.begin(), s.order_.end(), std::size_t{0});
  s.values_ = sorted;
  s.sorted_ = std::move(sorted);
  return s;
}

EmpiricalSample EmpiricalSample::log_transformed() const {
  std::vector<double> logs(sorted_.size());
  for (std::size_t i = 0; i < sorted_.size(); ++i) {
    if (!(sorted_[i] > 0.0)) throw DomainError("log transform requires strictly positive data");
    logs[i] = std::log(sorted_[i]);
  }
  EmpiricalSample s;
  s.sorted_ = std::move(logs);
  s.order_ = order_;
  s.values_.resize(values_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) s.values_[order_[i]] = s.sorted_[i];
  return s;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InsufficientSampleError("quantile of empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double median(std::vector<double> values) {
  if (values.empty()) throw InsufficientSampleError("median of empty sample");
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, 0.5);
}

double median_abs_deviation(std::span<const double> values) {
  const double m = median({values.begin(), values.end()});
  std::vector<double> dev(values.size());
  std::transform(values.begin(), values.end(), dev.begin(),
                 [m](double v) { return std::fabs(v - m); });
  return median(std::move(dev));
}

}  // namespace abcmc
