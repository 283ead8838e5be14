#include <algorithm>
#include <cmath>

#include "abcmc/discrepancies.hpp"
#include "abcmc/error.hpp"

namespace abcmc {
namespace {
constexpr std::size_t kComponents = 8;
constexpr std::size_t kCountComponents = 4;
}  // namespace

std::vector<double> combine_columns(std::span<const double> values, double omega) {
  if (!(omega >= 0.0 && omega <= 1.0)) throw DomainError("combine weight omega must lie in [0, 1]");
  if (values.empty() || values.size() % kComponents != 0) {
    throw ShapeError("combine_distances expects N >= 1 rows of 8 components");
  }
  const std::size_t rows = values.size() / kComponents;
  std::vector<double> counts(rows), stats(rows);
  double max_counts = 0.0, max_stats = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    double c = 0.0, s = 0.0;
    for (std::size_t k = 0; k < kComponents; ++k) {
      const double v = values[r * kComponents + k];
      if (!std::isfinite(v)) throw DomainError("combine_distances needs finite components");
      (k < kCountComponents ? c : s) += v;
    }
    counts[r] = c;
    stats[r] = s;
    max_counts = std::max(max_counts, c);
    max_stats = std::max(max_stats, s);
  }
  if (!(max_counts > 0.0) || !(max_stats > 0.0)) {
    throw DegenerateNormalizationError("combine_distances: a partial-sum maximum is zero");
  }
  std::vector<double> out(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    out[r] = omega * (counts[r] / max_counts) + (1.0 - omega) * (stats[r] / max_stats);
  }
  return out;
}

std::vector<double> combine_distances(std::span<const DistanceRecord> records, double omega) {
  if (records.empty()) throw ShapeError("combine_distances needs at least one record");
  const auto& names = records.front().components;
  if (names.size() != kComponents) throw ShapeError("combine_distances expects 8 named components");
  std::vector<double> flat;
  flat.reserve(records.size() * kComponents);
  for (const auto& rec : records) {
    if (rec.components.size() != kComponents) throw ShapeError("record component count differs");
    for (std::size_t k = 0; k < kComponents; ++k) {
      if (rec.components[k].name != names[k].name) throw ShapeError("record component names differ");
      flat.push_back(rec.components[k].value);
    }
  }
  return combine_columns(flat, omega);
}

}  // namespace abcmc
