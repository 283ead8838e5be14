#include <algorithm>
#include <cmath>
#include <numbers>

#include "abcmc/error.hpp"
#include "abcmc/oracles.hpp"

namespace abcmc {
namespace {

struct LogSums {
  double n = 0.0;
  double sum = 0.0;
  double sum_log = 0.0;
  double sum_log2 = 0.0;
};

LogSums positive_sums(std::span<const double> y) {
  if (y.empty()) throw InsufficientSampleError("marginal likelihood needs a non-empty sample");
  LogSums s;
  s.n = static_cast<double>(y.size());
  for (double v : y) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("exponential-family data must be positive and finite");
    const double l = std::log(v);
    s.sum += v;
    s.sum_log += l;
    s.sum_log2 += l * l;
  }
  return s;
}

}  // namespace

ExactPosterior posterior_from_log_marginals(std::span<const double> log_marginals,
                                            std::span<const double> model_prior) {
  const std::size_t k = log_marginals.size();
  if (k == 0) throw DomainError("need at least one model");
  if (!model_prior.empty() && model_prior.size() != k) throw ShapeError("model prior length mismatch");
  std::vector<double> lp(k);
  for (std::size_t i = 0; i < k; ++i) {
    lp[i] = log_marginals[i] + (model_prior.empty() ? 0.0 : std::log(model_prior[i]));
  }
  const double top = *std::max_element(lp.begin(), lp.end());
  if (!std::isfinite(top)) throw DomainError("log marginals must contain a finite maximum");
  ExactPosterior out;
  out.model_probs.resize(k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) total += out.model_probs[i] = std::exp(lp[i] - top);
  for (double& p : out.model_probs) p /= total;
  out.bayes_factors.assign(k, std::vector<double>(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) out.bayes_factors[i][j] = std::exp(log_marginals[i] - log_marginals[j]);
  return out;
}

double log_bayes_factor_normal_known(std::span<const double> y, double mu_tilde, double sigma, double c,
                                     BayesFactorForm form) {
  if (y.empty()) throw InsufficientSampleError("Bayes factor needs a non-empty sample");
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  if (!(c > 0.0)) throw DomainError("c must be positive");
  const auto n = static_cast<double>(y.size());
  double s = 0.0;
  for (double v : y) s += v;
  const double z = (s / n - mu_tilde) / (sigma / std::sqrt(n));
  const double shrink = form == BayesFactorForm::conjugate ? c * n / (c * n + 1.0) : c * n / (c + 1.0);
  return 0.5 * std::log1p(c * n) - 0.5 * shrink * z * z;
}

double bayes_factor_normal_known(std::span<const double> y, double mu_tilde, double sigma, double c,
                                 BayesFactorForm form) {
  return std::exp(log_bayes_factor_normal_known(y, mu_tilde, sigma, c, form));
}

ExactPosterior exact_posterior_normal_known(std::span<const double> y, double mu_tilde, double sigma, double c,
                                            BayesFactorForm form) {
  const double log_b01 = log_bayes_factor_normal_known(y, mu_tilde, sigma, c, form);
  const double lm[] = {log_b01, 0.0};
  return posterior_from_log_marginals(lm);
}

double marginal_likelihood_expo(int model, std::span<const double> y) {
  const LogSums s = positive_sums(y);
  switch (model) {
    case 1: return std::lgamma(s.n + 1.0) - (s.n + 1.0) * std::log1p(s.sum);
    case 2:
      return s.sum_log * s.sum_log / (2.0 * (s.n + 1.0)) - 0.5 * s.sum_log2 - s.sum_log -
             0.5 * s.n * std::log(2.0 * std::numbers::pi) - 0.5 * std::log(s.n + 1.0);
    case 3: return s.sum_log + std::lgamma(2.0 * s.n + 1.0) - (2.0 * s.n + 1.0) * std::log1p(s.sum);
    default: throw DomainError("exponential-family model must be 1, 2 or 3");
  }
}

ExactPosterior exact_posterior_expo(std::span<const double> y) {
  const double lm[] = {marginal_likelihood_expo(1, y), marginal_likelihood_expo(2, y),
                       marginal_likelihood_expo(3, y)};
  return posterior_from_log_marginals(lm);
}

}  // namespace abcmc
