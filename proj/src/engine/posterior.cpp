#include <algorithm>
#include <cmath>
#include <numeric>

#include "abcmc/empirical.hpp"
#include "abcmc/engine.hpp"
#include "abcmc/error.hpp"

namespace abcmc {

std::size_t accepted_count(double q, std::size_t n_draws) {
  if (!(q > 0.0 && q <= 1.0)) throw PolicyError("threshold quantile must lie in (0, 1]");
  // The small offset keeps q N from rounding up when it is an integer in exact arithmetic.
  const double raw = std::ceil(q * static_cast<double>(n_draws) - 1e-6);
  if (raw < 1.0) {
    throw PolicyError("threshold quantile " + std::to_string(q) + " keeps no draws out of " +
                      std::to_string(n_draws));
  }
  return std::min(n_draws, static_cast<std::size_t>(raw));
}

PosteriorEstimate apply_threshold(const AbcRun& run, ThresholdPolicy policy) {
  const std::size_t n = run.size();
  if (n == 0 || !run.draws || run.draws->size() != n) throw PolicyError("run is empty or incomplete");
  const std::size_t k = accepted_count(policy.q, n);

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const auto& dist = run.distances;
  auto closer = [&dist](std::size_t a, std::size_t b) { return dist[a] != dist[b] ? dist[a] < dist[b] : a < b; };
  if (k < n) std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k - 1), idx.end(), closer);
  idx.resize(k);
  std::sort(idx.begin(), idx.end(), closer);

  PosteriorEstimate est;
  est.n_accepted = k;
  est.epsilon = dist[idx.back()];
  est.model_probs.assign(run.n_models, 0.0);
  est.accepted.resize(run.n_models);
  for (std::size_t i : idx) {
    const auto m = static_cast<std::size_t>(run.draws->model[i]);
    est.model_probs[m] += 1.0;
    const auto p = run.draws->params(i);
    est.accepted[m].emplace_back(p.begin(), p.end());
  }
  for (double& p : est.model_probs) p /= static_cast<double>(k);
  est.accepted_draws = std::move(idx);
  return est;
}

std::optional<std::vector<ParamSummary>> posterior_param_summary(const PosteriorEstimate& estimate,
                                                                 std::size_t k,
                                                                 std::span<const std::string> names) {
  if (k >= estimate.accepted.size()) throw DomainError("model index out of range");
  const auto& draws = estimate.accepted[k];
  if (draws.empty()) return std::nullopt;
  const std::size_t dim = draws.front().size();
  std::vector<ParamSummary> out(dim);
  std::vector<double> column(draws.size());
  for (std::size_t j = 0; j < dim; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < draws.size(); ++i) {
      column[i] = draws[i][j];
      sum += column[i];
    }
    std::sort(column.begin(), column.end());
    out[j].name = j < names.size() ? names[j] : "theta_" + std::to_string(j + 1);
    out[j].mean = sum / static_cast<double>(draws.size());
    out[j].q05 = quantile_sorted(column, 0.05);
    out[j].median = quantile_sorted(column, 0.5);
    out[j].q95 = quantile_sorted(column, 0.95);
  }
  return out;
}

}  // namespace abcmc
