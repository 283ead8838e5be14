#pragma once

// Exact posterior model probabilities where they exist, and the scores used
// to compare ABC estimates against them.

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace abcmc {

struct ExactPosterior {
  std::vector<double> model_probs;
  /// bayes_factors[i][j] = p_i(y) / p_j(y).
  std::vector<std::vector<double>> bayes_factors;
};

/// Posterior probabilities from log marginal likelihoods under a model prior
/// (uniform when empty). Shift invariant in the log marginals.
ExactPosterior posterior_from_log_marginals(std::span<const double> log_marginals,
                                            std::span<const double> model_prior = {});

/// Exponent factor of the normal-mean Bayes factor. conjugate uses
/// cn/(cn+1), which the conjugate integral yields; as_printed uses cn/(c+1).
enum class BayesFactorForm { conjugate, as_printed };

/// log B01 for H0: mu = mu_tilde against mu ~ N(mu_tilde, c sigma^2).
double log_bayes_factor_normal_known(std::span<const double> y, double mu_tilde, double sigma, double c,
                                     BayesFactorForm form = BayesFactorForm::conjugate);

/// B01 = sqrt(cn + 1) exp(-1/2 k z^2) with z = (ybar - mu_tilde) / (sigma / sqrt n).
double bayes_factor_normal_known(std::span<const double> y, double mu_tilde, double sigma, double c,
                                 BayesFactorForm form = BayesFactorForm::conjugate);

/// (pi(M0 | y), pi(M1 | y)) under equal model prior.
ExactPosterior exact_posterior_normal_known(std::span<const double> y, double mu_tilde, double sigma, double c,
                                            BayesFactorForm form = BayesFactorForm::conjugate);

/// Log marginal likelihood of model 1, 2 or 3 of the exponential-family
/// problem. Throws DomainError on non-positive data.
double marginal_likelihood_expo(int model, std::span<const double> y);

/// Softmax of the three log marginals under the uniform model prior.
ExactPosterior exact_posterior_expo(std::span<const double> y);

// ---------------------------------------------------------------------------
// Scoring

/// Benchmark for one dataset: the true model (0-based) and, when available,
/// the reference posterior probabilities.
struct Truth {
  int label = 0;
  std::optional<std::vector<double>> probs;
};

struct MethodScore {
  std::optional<double> mae;
  std::optional<double> mse;
  double per = 0.0;
  std::size_t n_datasets = 0;
  std::string benchmark;  ///< "exact", "abc-stat" or "label"
};

/// MAE and MSE of the probability assigned to each dataset's true model
/// (only when every truth carries probabilities), and the proportion of
/// datasets whose true model is not the unique argmax (ties are errors).
MethodScore score_method(std::span<const std::vector<double>> estimates, std::span<const Truth> truths,
                         std::string benchmark = "");

/// Index of the unique largest entry; nullopt on a tie for the top.
std::optional<std::size_t> unique_argmax(std::span<const double> probs);

}  // namespace abcmc
