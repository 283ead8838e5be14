#pragma once

// Random-variate generation for every law used by the candidate models.
// All samplers draw from an Rng stream identified by a SeedSpec and never
// depend on the standard library's distribution objects, whose output is
// implementation defined.

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "abcmc/rng.hpp"

namespace abcmc {

/// Symmetric, zero-centred stable law with characteristic function
/// exp(-|gamma t|^alpha).
struct StableParams {
  double alpha = 2.0;  ///< stability exponent, (0, 2]
  double gamma = 1.0;  ///< scale, > 0

  void validate() const;
};

/// g-and-k law, defined through its quantile function.
struct GandKParams {
  double a = 0.0;  ///< location
  double b = 1.0;  ///< scale, > 0
  double c = 0.8;  ///< overall asymmetry
  double g = 0.0;  ///< skewness
  double k = 0.0;  ///< kurtosis, > -1/2

  void validate() const;
};

/// Standard-normal quantile (Wichura AS241, relative error ~1e-16).
double normal_quantile(double p);

/// Standard-normal CDF.
double normal_cdf(double x);

double gandk_quantile(double p, const GandKParams& params);

// Single draws from a caller-owned stream. Parameters are not validated here;
// the vector samplers below validate once up front.
double draw_normal(Rng& rng, double mean = 0.0, double sd = 1.0);
double draw_exponential(Rng& rng, double rate);
double draw_gamma(Rng& rng, double shape, double rate);
double draw_uniform(Rng& rng, double lo, double hi);
/// Uniform index in [0, k) without modulo bias.
std::size_t draw_index(Rng& rng, std::size_t k);
double draw_stable(Rng& rng, const StableParams& params);
double draw_gandk(Rng& rng, const GandKParams& params);

std::vector<double> sample_stable(const StableParams& params, std::size_t n, SeedSpec seed);
std::vector<double> sample_gandk(const GandKParams& params, std::size_t n, SeedSpec seed);

namespace dist {
struct Normal {
  double mean = 0.0;
  double variance = 1.0;
};
struct Exponential {
  double rate = 1.0;
};
/// Gamma with shape/rate parametrisation (mean shape/rate).
struct Gamma {
  double shape = 1.0;
  double rate = 1.0;
};
/// log(X) ~ Normal(mu, variance).
struct LogNormal {
  double mu = 0.0;
  double variance = 1.0;
};
struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};
/// Uniform on {1, ..., k}.
struct DiscreteUniform {
  std::size_t k = 1;
};
}  // namespace dist

using StandardDist = std::variant<dist::Normal, dist::Exponential, dist::Gamma, dist::LogNormal,
                                  dist::Uniform, dist::DiscreteUniform>;

void validate(const StandardDist& d);
double draw(Rng& rng, const StandardDist& d);
std::vector<double> sample_standard(const StandardDist& d, std::size_t n, SeedSpec seed);

}  // namespace abcmc
