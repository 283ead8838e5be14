#include <algorithm>
#include <cmath>

#include "abcmc/empirical.hpp"
#include "abcmc/models.hpp"
#include "abcmc/samplers.hpp"

namespace abcmc {
namespace {

void validate_params(ToadModel model, const ToadParams& p) {
  StableParams{p.alpha, p.gamma}.validate();
  if (!(p.p0 >= 0.0 && p.p0 <= 1.0)) throw DomainError("toad p0 must lie in [0, 1]");
  if (model == ToadModel::distance_return && !(p.d0 > 0.0)) throw DomainError("toad d0 must be positive");
}

ToadModel model_from_id(int id) {
  if (id < 1 || id > 3) throw DomainError("toad model id must be 1, 2 or 3");
  return static_cast<ToadModel>(id);
}

ToadParams params_from_vector(ToadModel model, const Params& theta) {
  const std::size_t want = model == ToadModel::distance_return ? 4 : 3;
  if (theta.size() != want) throw DomainError("toad model parameter vector has the wrong length");
  ToadParams p;
  p.alpha = theta[0];
  p.gamma = theta[1];
  p.p0 = theta[2];
  if (want == 4) p.d0 = theta[3];
  return p;
}

// Adds x to the refuge set unless an identical location is already present.
void add_refuge(std::vector<double>& refuges, double x) {
  if (std::find(refuges.begin(), refuges.end(), x) == refuges.end()) refuges.push_back(x);
}

}  // namespace

void ToadConfig::validate() const {
  if (n_days < 2) throw DomainError("toad data needs at least two days");
  if (n_toads < 1) throw DomainError("toad data needs at least one toad");
  if (lags.empty()) throw DomainError("at least one lag is required");
  for (int l : lags) {
    if (l < 1 || static_cast<std::size_t>(l) >= n_days) throw DomainError("lags must lie in [1, n_days)");
  }
  if (!(return_radius > 0.0)) throw DomainError("return radius must be positive");
  validate_params(model, params);
}

ReturnProbabilities distance_return_probabilities(double x, std::span<const double> refuges, double p0,
                                                  double d0) {
  ReturnProbabilities out;
  out.refuge.resize(refuges.size());
  double total = 0.0;
  double stay = 1.0;
  for (std::size_t i = 0; i < refuges.size(); ++i) {
    const double p = p0 * std::exp(-std::fabs(x - refuges[i]) / d0);
    out.refuge[i] = p;
    total += p;
    stay *= 1.0 - p;
  }
  out.stay = stay;
  const double scale = total > 0.0 ? (1.0 - stay) / total : 0.0;
  for (double& p : out.refuge) p *= scale;
  return out;
}

Dataset simulate_toads(ToadModel model, const ToadParams& params, std::size_t n_days, std::size_t n_toads,
                       Rng& rng) {
  validate_params(model, params);
  if (n_days < 2 || n_toads < 1) throw ShapeError("toad matrix needs n_days >= 2 and n_toads >= 1");
  const StableParams stable{params.alpha, params.gamma};
  const std::size_t nights = n_days - 1;

  // All step sizes first (toad-major), then the return decisions.
  std::vector<double> steps(nights * n_toads);
  for (double& s : steps) s = draw_stable(rng, stable);

  Dataset out;
  out.shape = {n_days, n_toads};
  out.values.assign(n_days * n_toads, 0.0);
  std::vector<double> sites;
  std::vector<double> weights;
  for (std::size_t j = 0; j < n_toads; ++j) {
    sites.assign(1, 0.0);
    double y = 0.0;
    for (std::size_t n = 0; n < nights; ++n) {
      const double x = y + steps[j * nights + n];
      const double u = rng.uniform();
      switch (model) {
        case ToadModel::random_return:
          // sites holds Y_1..Y_n with repeats, so revisited sites carry more weight.
          y = u < params.p0 ? sites[draw_index(rng, sites.size())] : x;
          sites.push_back(y);
          break;
        case ToadModel::nearest_return:
          if (u < params.p0) {
            double best = sites[0];
            for (double r : sites)
              if (std::fabs(x - r) < std::fabs(x - best)) best = r;
            y = best;
          } else {
            y = x;
            add_refuge(sites, y);
          }
          break;
        case ToadModel::distance_return: {
          weights.resize(sites.size());
          double total = 0.0, stay = 1.0;
          for (std::size_t i = 0; i < sites.size(); ++i) {
            const double p = params.p0 * std::exp(-std::fabs(x - sites[i]) / params.d0);
            weights[i] = p;
            total += p;
            stay *= 1.0 - p;
          }
          if (u < 1.0 - stay && total > 0.0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            std::size_t pick = sites.size() - 1;
            for (std::size_t i = 0; i < sites.size(); ++i) {
              acc += weights[i];
              if (target < acc) {
                pick = i;
                break;
              }
            }
            y = sites[pick];
          } else {
            y = x;
            add_refuge(sites, y);
          }
          break;
        }
      }
      out.at(n + 1, j) = y;
    }
  }
  return out;
}

Dataset simulate_toads(const ToadConfig& config, SeedSpec seed) {
  config.validate();
  Rng rng(seed);
  return simulate_toads(config.model, config.params, config.n_days, config.n_toads, rng);
}

std::vector<LagFeatures> extract_lag_features(const Dataset& locations, std::span<const int> lags,
                                              double return_radius) {
  if (!(return_radius > 0.0)) throw DomainError("return radius must be positive");
  if (lags.empty()) throw DomainError("at least one lag is required");
  const std::size_t rows = locations.shape.rows;
  const std::size_t cols = locations.shape.cols;
  std::vector<LagFeatures> out;
  out.reserve(lags.size());
  for (int lag : lags) {
    if (lag < 1) throw DomainError("lags must be positive");
    if (rows < static_cast<std::size_t>(lag) + 1) {
      throw ShapeError("location matrix has " + std::to_string(rows) + " rows, lag " + std::to_string(lag) +
                       " needs at least " + std::to_string(lag + 1));
    }
    LagFeatures f;
    f.lag = lag;
    for (std::size_t j = 0; j < cols; ++j) {
      for (std::size_t i = 0; i + lag < rows; ++i) {
        const double a = locations.at(i, j);
        const double b = locations.at(i + lag, j);
        if (std::isnan(a) || std::isnan(b)) continue;
        ++f.pair_count;
        const double d = std::fabs(b - a);
        if (d <= return_radius) {
          ++f.return_count;
        } else {
          f.non_returns.push_back(d);
        }
      }
    }
    if (f.pair_count == 0) throw EmptyFeatureError("lag " + std::to_string(lag) + " has no valid day pairs");
    std::sort(f.non_returns.begin(), f.non_returns.end());
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<double> toad_summary_stats(std::span<const LagFeatures> features) {
  std::vector<double> out;
  out.reserve(features.size() * 11);
  for (const auto& f : features) {
    if (f.non_returns.empty()) {
      throw EmptyFeatureError("lag " + std::to_string(f.lag) + " has no non-return displacements");
    }
    double prev = quantile_sorted(f.non_returns, 0.0);
    for (int k = 1; k <= 10; ++k) {
      const double q = quantile_sorted(f.non_returns, k / 10.0);
      out.push_back(std::log(std::max(q - prev, kQuantileDiffFloor)));
      prev = q;
    }
    out.push_back(static_cast<double>(f.return_count));
  }
  return out;
}

std::array<ModelSpec, 3> toad_models(const std::vector<int>& lags, double return_radius) {
  if (!(return_radius > 0.0)) throw DomainError("return radius must be positive");
  std::array<ModelSpec, 3> m;
  for (int k = 0; k < 3; ++k) {
    const ToadModel model = model_from_id(k + 1);
    m[k].id = k + 1;
    m[k].label = "M" + std::to_string(k + 1);
    m[k].param_names = {"alpha", "gamma", "p0"};
    if (model == ToadModel::distance_return) m[k].param_names.push_back("d0");
    m[k].prior_sampler = [model](Rng& rng) {
      Params theta{draw_uniform(rng, 1.0, 2.0), draw_uniform(rng, 10.0, 100.0), draw_uniform(rng, 0.0, 1.0)};
      if (model == ToadModel::distance_return) theta.push_back(draw_uniform(rng, 20.0, 2000.0));
      return theta;
    };
    m[k].simulator = [model](const Params& theta, DataShape shape, Rng& rng) {
      return simulate_toads(model, params_from_vector(model, theta), shape.rows, shape.cols, rng);
    };
    m[k].summary_map = [lags, return_radius](const Dataset& d) {
      const auto features = extract_lag_features(d, lags, return_radius);
      return toad_summary_stats(features);
    };
  }
  return m;
}

Params toad_params_vector(ToadModel model, const ToadParams& p) {
  Params theta{p.alpha, p.gamma, p.p0};
  if (model == ToadModel::distance_return) theta.push_back(p.d0);
  return theta;
}

ToadParams toad_reference_params(ToadModel model) {
  switch (model) {
    case ToadModel::random_return: return {1.7, 34.0, 0.6, 758.0};
    case ToadModel::nearest_return: return {1.83, 46.0, 0.65, 758.0};
    case ToadModel::distance_return: return {1.65, 32.0, 0.43, 758.0};
  }
  throw DomainError("unknown toad model");
}

}  // namespace abcmc
