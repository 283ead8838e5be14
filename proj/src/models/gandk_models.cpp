#include <algorithm>

#include "abcmc/empirical.hpp"
#include "abcmc/models.hpp"
#include "abcmc/samplers.hpp"

namespace abcmc {
namespace {

Dataset gandk_vector(double g, double k, DataShape shape, Rng& rng) {
  if (shape.rows == 0 || shape.cols != 1) throw ShapeError("g-and-k model simulates a non-empty vector");
  GandKParams p;
  p.g = g;
  p.k = k;
  p.validate();
  std::vector<double> y(shape.rows);
  for (double& v : y) v = draw_gandk(rng, p);
  return Dataset::vector(std::move(y));
}

}  // namespace

std::vector<double> gandk_summary(const Dataset& data) {
  if (data.values.empty()) throw InsufficientSampleError("g-and-k summary needs data");
  std::vector<double> s = data.values;
  std::sort(s.begin(), s.end());
  return {quantile_sorted(s, 0.1), quantile_sorted(s, 0.9)};
}

std::array<ModelSpec, 2> gandk_models() {
  ModelSpec m1, m2;
  m1.id = 1;
  m2.id = 2;
  m1.label = "M1";
  m2.label = "M2";
  m1.param_names = {"k"};
  m2.param_names = {"g", "k"};
  m1.prior_sampler = [](Rng& rng) { return Params{draw_uniform(rng, -0.5, 5.0)}; };
  m2.prior_sampler = [](Rng& rng) {
    const double g = draw_uniform(rng, 0.0, 4.0);
    return Params{g, draw_uniform(rng, -0.5, 5.0)};
  };
  m1.simulator = [](const Params& theta, DataShape shape, Rng& rng) {
    if (theta.size() != 1) throw DomainError("g-and-k M1 expects (k)");
    return gandk_vector(0.0, theta[0], shape, rng);
  };
  m2.simulator = [](const Params& theta, DataShape shape, Rng& rng) {
    if (theta.size() != 2) throw DomainError("g-and-k M2 expects (g, k)");
    return gandk_vector(theta[0], theta[1], shape, rng);
  };
  m1.summary_map = gandk_summary;
  m2.summary_map = gandk_summary;
  return {m1, m2};
}

Params gandk_true_params(int model_id) {
  switch (model_id) {
    case 1: return {2.0};
    case 2: return {1.0, 2.0};
    default: throw DomainError("g-and-k model id must be 1 or 2");
  }
}

}  // namespace abcmc
