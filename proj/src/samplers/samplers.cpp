#include "abcmc/samplers.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "abcmc/error.hpp"

namespace abcmc {
namespace {

template <std::size_t N>
double poly(const double (&c)[N], double x) {
  double acc = c[N - 1];
  for (std::size_t i = N - 1; i-- > 0;) acc = acc * x + c[i];
  return acc;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

void require_count(std::size_t n) { require(n >= 1, "sample size must be at least 1"); }

}  // namespace

void StableParams::validate() const {
  require(alpha > 0.0 && alpha <= 2.0, "stable alpha must lie in (0, 2], got " + std::to_string(alpha));
  require(gamma > 0.0 && std::isfinite(gamma), "stable gamma must be positive, got " + std::to_string(gamma));
}

void GandKParams::validate() const {
  require(b > 0.0 && std::isfinite(b), "g-and-k b must be positive");
  require(k > -0.5 && std::isfinite(k), "g-and-k k must exceed -1/2");
  require(std::isfinite(a) && std::isfinite(c) && std::isfinite(g), "g-and-k parameters must be finite");
}

double normal_quantile(double p) {
  require(p > 0.0 && p < 1.0, "normal quantile needs p in (0, 1)");
  static constexpr double a[] = {3.3871328727963666080e0,  1.3314166789178437745e+2,
                                 1.9715909503065514427e+3, 1.3731693765509461125e+4,
                                 4.5921953931549871457e+4, 6.7265770927008700853e+4,
                                 3.3430575583588128105e+4, 2.5090809287301226727e+3};
  static constexpr double b[] = {1.0,
                                 4.2313330701600911252e+1, 6.8718700749205790830e+2,
                                 5.3941960214247511077e+3, 2.1213794301586595867e+4,
                                 3.9307895800092710610e+4, 2.8729085735721942674e+4,
                                 5.2264952788528545610e+3};
  static constexpr double c[] = {1.42343711074968357734e0,  4.63033784615654529590e0,
                                 5.76949722146069140550e0,  3.64784832476320460504e0,
                                 1.27045825245236838258e0,  2.41780725177450611770e-1,
                                 2.27238449892691845833e-2, 7.74545014278341407640e-4};
  static constexpr double d[] = {1.0,
                                 2.05319162663775882187e0,  1.67638483018380384940e0,
                                 6.89767334985100004550e-1, 1.48103976427480074590e-1,
                                 1.51986665636164571966e-2, 5.47593808499534494600e-4,
                                 1.05075007164441684324e-9};
  static constexpr double e[] = {6.65790464350110377720e0,  5.46378491116411436990e0,
                                 1.78482653991729133580e0,  2.96560571828504891230e-1,
                                 2.65321895265761230930e-2, 1.24266094738807843860e-3,
                                 2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static constexpr double f[] = {1.0,
                                 5.99832206555887937690e-1, 1.36929880922735805310e-1,
                                 1.48753612908506148525e-2, 7.86869131145613259100e-4,
                                 1.84631831751005468180e-5, 1.42151175831644588870e-7,
                                 2.04426310338993978564e-15};

  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * poly(a, r) / poly(b, r);
  }
  double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = poly(c, r) / poly(d, r);
  } else {
    r -= 5.0;
    val = poly(e, r) / poly(f, r);
  }
  return q < 0.0 ? -val : val;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double gandk_quantile(double p, const GandKParams& params) {
  require(p > 0.0 && p < 1.0, "g-and-k quantile needs p in (0, 1)");
  const double z = normal_quantile(p);
  const double e = std::exp(-params.g * z);
  const double skew = 1.0 + params.c * (1.0 - e) / (1.0 + e);
  return params.a + params.b * skew * std::pow(1.0 + z * z, params.k) * z;
}

double draw_normal(Rng& rng, double mean, double sd) {
  return mean + sd * normal_quantile(rng.uniform_open());
}

double draw_exponential(Rng& rng, double rate) { return -std::log(rng.uniform_open()) / rate; }

double draw_gamma(Rng& rng, double shape, double rate) {
  // Marsaglia-Tsang; shapes below one are boosted by U^(1/shape).
  if (shape < 1.0) {
    const double boost = std::pow(rng.uniform_open(), 1.0 / shape);
    return draw_gamma(rng, shape + 1.0, rate) * boost;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = draw_normal(rng);
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = rng.uniform_open();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v / rate;
  }
}

double draw_uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform_open(); }

std::size_t draw_index(Rng& rng, std::size_t k) {
  // Lemire's nearly-divisionless bounded integer.
  const std::uint64_t range = k;
  unsigned __int128 m = static_cast<unsigned __int128>(rng()) * range;
  auto low = static_cast<std::uint64_t>(m);
  if (low < range) {
    const std::uint64_t threshold = (0 - range) % range;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(rng()) * range;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::size_t>(m >> 64);
}

double draw_stable(Rng& rng, const StableParams& params) {
  // Chambers-Mallows-Stuck, symmetric case.
  const double v = std::numbers::pi * (rng.uniform_open() - 0.5);
  const double w = draw_exponential(rng, 1.0);
  const double alpha = params.alpha;
  double x;
  if (alpha == 1.0) {
    x = std::tan(v);
  } else {
    x = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
        std::pow(std::cos(v - alpha * v) / w, (1.0 - alpha) / alpha);
  }
  return params.gamma * x;
}

double draw_gandk(Rng& rng, const GandKParams& params) {
  return gandk_quantile(rng.uniform_open(), params);
}

std::vector<double> sample_stable(const StableParams& params, std::size_t n, SeedSpec seed) {
  params.validate();
  require_count(n);
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = draw_stable(rng, params);
  return out;
}

std::vector<double> sample_gandk(const GandKParams& params, std::size_t n, SeedSpec seed) {
  params.validate();
  require_count(n);
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = draw_gandk(rng, params);
  return out;
}

void validate(const StandardDist& d) {
  std::visit(
      [](const auto& law) {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, dist::Normal>) {
          require(std::isfinite(law.mean), "normal mean must be finite");
          require(law.variance > 0.0 && std::isfinite(law.variance), "normal variance must be positive");
        } else if constexpr (std::is_same_v<T, dist::Exponential>) {
          require(law.rate > 0.0 && std::isfinite(law.rate), "exponential rate must be positive");
        } else if constexpr (std::is_same_v<T, dist::Gamma>) {
          require(law.shape > 0.0 && std::isfinite(law.shape), "gamma shape must be positive");
          require(law.rate > 0.0 && std::isfinite(law.rate), "gamma rate must be positive");
        } else if constexpr (std::is_same_v<T, dist::LogNormal>) {
          require(std::isfinite(law.mu), "lognormal mu must be finite");
          require(law.variance > 0.0 && std::isfinite(law.variance), "lognormal variance must be positive");
        } else if constexpr (std::is_same_v<T, dist::Uniform>) {
          require(std::isfinite(law.lo) && std::isfinite(law.hi) && law.lo < law.hi,
                  "uniform bounds must satisfy lo < hi");
        } else {
          require(law.k >= 1, "discrete uniform needs k >= 1");
        }
      },
      d);
}

double draw(Rng& rng, const StandardDist& d) {
  return std::visit(
      [&rng](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, dist::Normal>) {
          return draw_normal(rng, law.mean, std::sqrt(law.variance));
        } else if constexpr (std::is_same_v<T, dist::Exponential>) {
          return draw_exponential(rng, law.rate);
        } else if constexpr (std::is_same_v<T, dist::Gamma>) {
          return draw_gamma(rng, law.shape, law.rate);
        } else if constexpr (std::is_same_v<T, dist::LogNormal>) {
          return std::exp(draw_normal(rng, law.mu, std::sqrt(law.variance)));
        } else if constexpr (std::is_same_v<T, dist::Uniform>) {
          return draw_uniform(rng, law.lo, law.hi);
        } else {
          return static_cast<double>(draw_index(rng, law.k) + 1);
        }
      },
      d);
}

std::vector<double> sample_standard(const StandardDist& d, std::size_t n, SeedSpec seed) {
  validate(d);
  require_count(n);
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = draw(rng, d);
  return out;
}

}  // namespace abcmc
