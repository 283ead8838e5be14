#include <cmath>

#include "abcmc/models.hpp"
#include "abcmc/samplers.hpp"

namespace abcmc {
namespace {

template <class Draw>
Dataset iid_vector(DataShape shape, Draw&& draw_one) {
  if (shape.rows == 0 || shape.cols != 1) throw ShapeError("model simulates a non-empty vector");
  std::vector<double> y(shape.rows);
  for (double& v : y) v = draw_one();
  return Dataset::vector(std::move(y));
}

double single(const Params& theta) {
  if (theta.size() != 1) throw DomainError("model expects one parameter");
  return theta[0];
}

}  // namespace

std::vector<double> expo_summary(const Dataset& data) {
  double s = 0.0, sl = 0.0, sl2 = 0.0;
  for (double v : data.values) {
    if (!(v > 0.0)) throw DomainError("exponential-family summary needs positive data");
    const double l = std::log(v);
    s += v;
    sl += l;
    sl2 += l * l;
  }
  return {s, sl, sl2};
}

std::array<ModelSpec, 3> expo_family_models() {
  std::array<ModelSpec, 3> m;
  for (int k = 0; k < 3; ++k) {
    m[k].id = k + 1;
    m[k].label = "M" + std::to_string(k + 1);
    m[k].param_names = {"theta"};
    m[k].summary_map = expo_summary;
  }
  m[0].prior_sampler = [](Rng& rng) { return Params{draw_exponential(rng, 1.0)}; };
  m[0].simulator = [](const Params& theta, DataShape shape, Rng& rng) {
    const double rate = single(theta);
    return iid_vector(shape, [&] { return draw_exponential(rng, rate); });
  };
  m[1].prior_sampler = [](Rng& rng) { return Params{draw_normal(rng)}; };
  m[1].simulator = [](const Params& theta, DataShape shape, Rng& rng) {
    const double mu = single(theta);
    return iid_vector(shape, [&] { return std::exp(draw_normal(rng, mu, 1.0)); });
  };
  m[2].prior_sampler = [](Rng& rng) { return Params{draw_exponential(rng, 1.0)}; };
  m[2].simulator = [](const Params& theta, DataShape shape, Rng& rng) {
    const double rate = single(theta);
    return iid_vector(shape, [&] { return draw_gamma(rng, 2.0, rate); });
  };
  return m;
}

Params expo_true_params(int model_id) {
  switch (model_id) {
    case 1: return {0.5};
    case 2: return {std::log(2.0) - 0.5};
    case 3: return {1.0};
    default: throw DomainError("exponential-family model id must be 1, 2 or 3");
  }
}

}  // namespace abcmc
