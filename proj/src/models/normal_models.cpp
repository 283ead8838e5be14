#include <cmath>

#include "abcmc/models.hpp"
#include "abcmc/samplers.hpp"

namespace abcmc {
namespace {

Dataset normal_vector(double mean, double sd, DataShape shape, Rng& rng) {
  if (shape.rows == 0 || shape.cols != 1) throw ShapeError("normal model simulates a non-empty vector");
  std::vector<double> y(shape.rows);
  for (double& v : y) v = draw_normal(rng, mean, sd);
  return Dataset::vector(std::move(y));
}

double draw_variance(Rng& rng, const NormalMeanConfig& cfg) {
  const double g = draw_gamma(rng, cfg.variance_prior_shape, cfg.variance_prior_rate);
  return cfg.gamma_prior_on_precision ? 1.0 / g : g;
}

void require_variance(const Params& theta, std::size_t index) {
  if (theta.size() <= index || !(theta[index] > 0.0)) throw DomainError("normal model needs a positive variance");
}

}  // namespace

std::array<ModelSpec, 2> normal_mean_models(const NormalMeanConfig& cfg) {
  if (!(cfg.c > 0.0)) throw DomainError("prior scale c must be positive");
  if (cfg.sigma && !(*cfg.sigma > 0.0)) throw DomainError("known sigma must be positive");
  if (!cfg.sigma && !(cfg.variance_prior_shape > 0.0 && cfg.variance_prior_rate > 0.0)) {
    throw DomainError("variance prior parameters must be positive");
  }

  ModelSpec m0, m1;
  m0.id = 1;
  m1.id = 2;
  m0.label = "M0";
  m1.label = "M1";
  const double mu0 = cfg.mu_tilde;
  const double c = cfg.c;

  if (cfg.sigma) {
    const double sigma = *cfg.sigma;
    m1.param_names = {"mu"};
    m0.prior_sampler = [](Rng&) { return Params{}; };
    m1.prior_sampler = [mu0, c, sigma](Rng& rng) { return Params{draw_normal(rng, mu0, std::sqrt(c) * sigma)}; };
    m0.simulator = [mu0, sigma](const Params&, DataShape shape, Rng& rng) {
      return normal_vector(mu0, sigma, shape, rng);
    };
    m1.simulator = [sigma](const Params& theta, DataShape shape, Rng& rng) {
      if (theta.size() != 1) throw DomainError("M1 expects (mu)");
      return normal_vector(theta[0], sigma, shape, rng);
    };
    auto mean = [](const Dataset& d) {
      double s = 0.0;
      for (double v : d.values) s += v;
      return std::vector<double>{s / static_cast<double>(d.values.size())};
    };
    m0.summary_map = mean;
    m1.summary_map = mean;
    return {m0, m1};
  }

  m0.param_names = {"sigma2"};
  m1.param_names = {"mu", "sigma2"};
  m0.prior_sampler = [cfg](Rng& rng) { return Params{draw_variance(rng, cfg)}; };
  m1.prior_sampler = [cfg, mu0, c](Rng& rng) {
    const double s2 = draw_variance(rng, cfg);
    return Params{draw_normal(rng, mu0, std::sqrt(c * s2)), s2};
  };
  m0.simulator = [mu0](const Params& theta, DataShape shape, Rng& rng) {
    require_variance(theta, 0);
    return normal_vector(mu0, std::sqrt(theta[0]), shape, rng);
  };
  m1.simulator = [](const Params& theta, DataShape shape, Rng& rng) {
    require_variance(theta, 1);
    return normal_vector(theta[0], std::sqrt(theta[1]), shape, rng);
  };
  auto mean_var = [](const Dataset& d) {
    const auto n = static_cast<double>(d.values.size());
    double s = 0.0;
    for (double v : d.values) s += v;
    const double mean = s / n;
    double ss = 0.0;
    for (double v : d.values) ss += (v - mean) * (v - mean);
    return std::vector<double>{mean, n > 1.0 ? ss / (n - 1.0) : 0.0};
  };
  m0.summary_map = mean_var;
  m1.summary_map = mean_var;
  return {m0, m1};
}

}  // namespace abcmc
