#include <cmath>

#include "abcmc/error.hpp"
#include "abcmc/oracles.hpp"

namespace abcmc {

std::optional<std::size_t> unique_argmax(std::span<const double> probs) {
  if (probs.empty()) return std::nullopt;
  std::size_t best = 0;
  bool tied = false;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) {
      best = i;
      tied = false;
    } else if (probs[i] == probs[best]) {
      tied = true;
    }
  }
  if (tied) return std::nullopt;
  return best;
}

MethodScore score_method(std::span<const std::vector<double>> estimates, std::span<const Truth> truths,
                         std::string benchmark) {
  if (estimates.size() != truths.size()) throw ShapeError("estimates and truths are not aligned");
  if (estimates.empty()) throw InsufficientSampleError("scoring needs at least one dataset");
  MethodScore score;
  score.n_datasets = estimates.size();
  bool exact = true;
  double abs_sum = 0.0, sq_sum = 0.0;
  std::size_t errors = 0;
  for (std::size_t d = 0; d < estimates.size(); ++d) {
    const auto& est = estimates[d];
    const auto& truth = truths[d];
    if (truth.label < 0 || static_cast<std::size_t>(truth.label) >= est.size()) {
      throw ShapeError("true model label out of range");
    }
    const auto top = unique_argmax(est);
    if (!top || *top != static_cast<std::size_t>(truth.label)) ++errors;
    if (truth.probs) {
      if (truth.probs->size() != est.size()) throw ShapeError("truth and estimate lengths differ");
      const double e = est[truth.label] - (*truth.probs)[truth.label];
      abs_sum += std::fabs(e);
      sq_sum += e * e;
    } else {
      exact = false;
    }
  }
  const auto n = static_cast<double>(estimates.size());
  score.per = static_cast<double>(errors) / n;
  if (exact) {
    score.mae = abs_sum / n;
    score.mse = sq_sum / n;
  }
  score.benchmark = benchmark.empty() ? (exact ? "exact" : "label") : std::move(benchmark);
  return score;
}

}  // namespace abcmc
