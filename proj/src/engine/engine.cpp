#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "abcmc/empirical.hpp"
#include "abcmc/engine.hpp"
#include "abcmc/error.hpp"
#include "abcmc/samplers.hpp"

namespace abcmc {
namespace {

// Smallest non-return sample accepted per lag; MMD needs two points.
constexpr std::size_t kMinNonReturns = 2;
constexpr std::size_t kBlock = 64;

struct Needs {
  bool sorted = false;
  bool log_sorted = false;
  bool summary = false;
  bool features = false;
  bool log_features = false;
};

Needs needs_of(std::span<const AbcMethod> methods) {
  Needs n;
  for (const auto& m : methods) {
    if (std::holds_alternative<SummaryMethod>(m.kind)) n.summary = true;
    if (const auto* d = std::get_if<DiscrepancyMethod>(&m.kind)) {
      (d->log_transform ? n.log_sorted : n.sorted) = true;
    }
    if (const auto* c = std::get_if<CombinedMethod>(&m.kind)) {
      n.features = true;
      if (c->statistic.log_transform) n.log_features = true;
    }
  }
  return n;
}

// Data after masking plus every derived view the methods read.
struct Prepared {
  std::vector<double> sorted;
  std::vector<double> log_sorted;
  std::vector<double> summary;
  std::vector<LagFeatures> features;
  std::vector<std::vector<double>> log_non_returns;
};

std::vector<double> log_of_sorted(std::span<const double> sorted, bool simulated) {
  std::vector<double> out(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!(sorted[i] > 0.0)) {
      if (simulated) throw SimulationError("log transform needs strictly positive simulated data");
      throw DomainError("log transform needs strictly positive observed data");
    }
    out[i] = std::log(sorted[i]);
  }
  return out;
}

Prepared prepare(const AbcProblem& problem, const Dataset& data, const Needs& needs, bool simulated) {
  Prepared p;
  if (needs.sorted || needs.log_sorted) {
    p.sorted = data.values;
    for (double v : p.sorted) {
      if (!std::isfinite(v)) {
        if (simulated) throw SimulationError("simulated data contains a non-finite value");
        throw DomainError("observed data contains a non-finite value");
      }
    }
    std::sort(p.sorted.begin(), p.sorted.end());
    if (needs.log_sorted) p.log_sorted = log_of_sorted(p.sorted, simulated);
  }
  if (needs.summary) {
    p.summary = problem.models.front().summary_map(data);
    for (double v : p.summary) {
      if (!std::isfinite(v)) {
        if (simulated) throw SimulationError("summary statistic is not finite");
        throw DomainError("observed summary statistic is not finite");
      }
    }
  }
  if (needs.features) {
    const auto& spec = *problem.lag_features;
    p.features = extract_lag_features(data, spec.lags, spec.return_radius);
    for (const auto& f : p.features) {
      if (f.non_returns.size() < kMinNonReturns) {
        const std::string msg = "lag " + std::to_string(f.lag) + " has fewer than 2 non-return displacements";
        if (simulated) throw EmptyFeatureError(msg);
        throw InsufficientSampleError("observed data: " + msg);
      }
      if (!std::isfinite(f.non_returns.back())) {
        if (simulated) throw SimulationError("simulated displacement is not finite");
        throw DomainError("observed displacement is not finite");
      }
    }
    if (needs.log_features) {
      for (const auto& f : p.features) p.log_non_returns.push_back(log_of_sorted(f.non_returns, simulated));
    }
  }
  return p;
}

void apply_mask(const AbcProblem& problem, Dataset& data) {
  if (problem.missing_mask.empty()) return;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < data.values.size(); ++i)
    if (problem.missing_mask[i]) data.values[i] = nan;
}

// Observed-side state of one (dataset, method) pair.
struct MethodState {
  const AbcMethod* method = nullptr;
  SummaryMetric metric;
  std::optional<GaussianMmd> mmd;
  std::vector<GaussianMmd> lag_mmd;
  std::size_t n_components = 1;
};

double statistic_distance(const DiscrepancyMethod& d, std::span<const double> y, std::span<const double> z,
                          const GaussianMmd* mmd) {
  switch (d.distance) {
    case DistanceKind::cvm: return cvm_general(y, z, d.ties);
    case DistanceKind::wasserstein1: return wasserstein1_general(y, z);
    case DistanceKind::mmd:
      if (d.kernel.kind == KernelSpec::Kind::energy) return energy_mmd2_sorted(y, z);
      return (*mmd)(z);
  }
  return 0.0;
}

void components(const MethodState& st, const Prepared& obs, const Prepared& sim, double* out) {
  const AbcMethod& m = *st.method;
  if (std::holds_alternative<SummaryMethod>(m.kind)) {
    out[0] = summary_distance(obs.summary, sim.summary, st.metric);
    return;
  }
  if (const auto* d = std::get_if<DiscrepancyMethod>(&m.kind)) {
    const auto& y = d->log_transform ? obs.log_sorted : obs.sorted;
    const auto& z = d->log_transform ? sim.log_sorted : sim.sorted;
    out[0] = statistic_distance(*d, y, z, st.mmd ? &*st.mmd : nullptr);
    return;
  }
  const auto& c = std::get<CombinedMethod>(m.kind);
  const std::size_t lags = obs.features.size();
  for (std::size_t l = 0; l < lags; ++l) {
    out[l] = std::fabs(static_cast<double>(obs.features[l].return_count) -
                       static_cast<double>(sim.features[l].return_count));
    const auto& y = c.statistic.log_transform ? obs.log_non_returns[l] : obs.features[l].non_returns;
    const auto& z = c.statistic.log_transform ? sim.log_non_returns[l] : sim.features[l].non_returns;
    out[lags + l] = statistic_distance(c.statistic, y, z, st.lag_mmd.empty() ? nullptr : &st.lag_mmd[l]);
  }
}

bool uses_gaussian(const DiscrepancyMethod& d) {
  return d.distance == DistanceKind::mmd && d.kernel.kind == KernelSpec::Kind::gaussian;
}

double bandwidth_for(const KernelSpec& kernel, std::span<const double> reference) {
  return resolve_bandwidth(kernel, reference).sigma;
}

struct Failure {
  std::size_t draw;
  int attempt;
  std::string what;
};

struct DrawResult {
  int model = 0;
  Params theta;
  Prepared prepared;
};

class Simulator {
 public:
  Simulator(const AbcProblem& problem, const Needs& needs, SeedSpec seed, int max_retries)
      : problem_(problem), needs_(needs), seed_(seed), max_retries_(max_retries) {
    if (!problem.model_prior.empty()) {
      double acc = 0.0;
      for (double p : problem.model_prior) cumulative_.push_back(acc += p);
    }
  }

  DrawResult draw(std::size_t i) {
    for (int attempt = 0;; ++attempt) {
      Rng rng(SeedSpec{seed_.master_seed, seed_.stream_id + i + (static_cast<std::uint64_t>(attempt) << 56)});
      DrawResult r;
      r.model = draw_model(rng);
      const ModelSpec& spec = problem_.models[static_cast<std::size_t>(r.model)];
      r.theta = spec.prior_sampler(rng);
      try {
        Dataset z = spec.simulator(r.theta, problem_.shape, rng);
        if (z.shape != problem_.shape) throw ShapeError("simulator returned a dataset of the wrong shape");
        apply_mask(problem_, z);
        r.prepared = prepare(problem_, z, needs_, true);
        return r;
      } catch (const SimulationError& e) {
        {
          std::lock_guard lock(mutex_);
          failures_.push_back({i, attempt, e.what()});
        }
        if (attempt >= max_retries_) {
          throw SimulationError("draw " + std::to_string(i) + " failed after " + std::to_string(attempt + 1) +
                                " attempts: " + e.what());
        }
      }
    }
  }

  void export_failures(DrawTable& table) {
    std::sort(failures_.begin(), failures_.end(), [](const Failure& a, const Failure& b) {
      return a.draw != b.draw ? a.draw < b.draw : a.attempt < b.attempt;
    });
    std::size_t last = static_cast<std::size_t>(-1);
    for (const auto& f : failures_) {
      const std::uint64_t stream = seed_.stream_id + f.draw + (static_cast<std::uint64_t>(f.attempt) << 56);
      table.failures.push_back("draw " + std::to_string(f.draw) + " stream " + std::to_string(stream) + ": " +
                               f.what);
      if (f.draw != last) ++table.resampled;
      last = f.draw;
    }
  }

 private:
  int draw_model(Rng& rng) const {
    const std::size_t k = problem_.models.size();
    if (cumulative_.empty()) return static_cast<int>(draw_index(rng, k));
    const double u = rng.uniform() * cumulative_.back();
    for (std::size_t j = 0; j < k; ++j)
      if (u < cumulative_[j]) return static_cast<int>(j);
    return static_cast<int>(k - 1);
  }

  const AbcProblem& problem_;
  Needs needs_;
  SeedSpec seed_;
  int max_retries_;
  std::vector<double> cumulative_;
  std::mutex mutex_;
  std::vector<Failure> failures_;
};

// Runs body(i) for i in [0, n) on the requested number of threads.
template <class Body>
void parallel_for(std::size_t n, std::size_t workers, Body&& body) {
  workers = std::max<std::size_t>(1, std::min(workers, (n + kBlock - 1) / kBlock));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    while (!stop.load(std::memory_order_relaxed)) {
      const std::size_t begin = next.fetch_add(kBlock);
      if (begin >= n) return;
      const std::size_t end = std::min(n, begin + kBlock);
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        stop = true;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

std::size_t resolve_workers(const EngineOptions& options) {
  return options.workers > 0 ? options.workers : default_workers();
}

}  // namespace

void AbcProblem::validate() const {
  if (models.empty()) throw DomainError("at least one model is required");
  if (shape.size() == 0) throw ShapeError("observed data must be non-empty");
  if (!model_prior.empty()) {
    if (model_prior.size() != models.size()) throw ShapeError("model prior length differs from model count");
    double total = 0.0;
    for (double p : model_prior) {
      if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("model prior probabilities must be non-negative");
      total += p;
    }
    if (!(total > 0.0)) throw DomainError("model prior must have positive mass");
  }
  if (!missing_mask.empty() && missing_mask.size() != shape.size()) {
    throw ShapeError("missing mask size differs from the data size");
  }
}

std::size_t default_workers() {
  if (const char* env = std::getenv("ABCMC_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

MadWeights estimate_mad_weights(const AbcProblem& problem, std::size_t n_prior_draws, SeedSpec seed,
                                const EngineOptions& options) {
  problem.validate();
  if (n_prior_draws < 100) throw DomainError("MAD estimation needs at least 100 prior draws");
  Needs needs;
  needs.summary = true;
  Simulator sim(problem, needs, seed, options.max_retries);
  std::vector<std::vector<double>> summaries(n_prior_draws);
  parallel_for(n_prior_draws, resolve_workers(options),
               [&](std::size_t i) { summaries[i] = std::move(sim.draw(i).prepared.summary); });

  const std::size_t dim = summaries.front().size();
  MadWeights out;
  out.weights.resize(dim);
  std::vector<double> column(n_prior_draws);
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t i = 0; i < n_prior_draws; ++i) {
      if (summaries[i].size() != dim) throw ShapeError("summary length varies between draws");
      column[i] = summaries[i][j];
    }
    const double mad = median_abs_deviation(column);
    if (!(mad >= kMadFloor)) {
      out.warnings.push_back("statistic " + std::to_string(j + 1) +
                             " has zero prior-predictive MAD; weight capped at 1e12");
    }
    out.weights[j] = 1.0 / std::max(mad, kMadFloor);
  }
  return out;
}

std::vector<std::vector<AbcRun>> run_abc_batch(const AbcProblem& problem, std::span<const Dataset> observed,
                                               std::span<const AbcMethod> methods, std::size_t n_draws,
                                               SeedSpec seed, const EngineOptions& options) {
  problem.validate();
  if (n_draws == 0) throw DomainError("N must be at least 1");
  if (observed.empty() || methods.empty()) throw DomainError("need at least one dataset and one method");
  for (const auto& m : methods) {
    m.validate();
    if (std::holds_alternative<CombinedMethod>(m.kind) &&
        (!problem.lag_features || problem.lag_features->lags.size() != 4)) {
      throw PolicyError("combined distances need lag feature settings with four lags");
    }
    if (std::holds_alternative<DiscrepancyMethod>(m.kind) && problem.shape.cols != 1) {
      throw PolicyError("raw-data discrepancies need vector data; use a combined method for matrix data");
    }
  }
  for (const auto& y : observed) {
    if (y.shape != problem.shape) throw ShapeError("observed dataset shape differs from the problem shape");
  }

  const Needs needs = needs_of(methods);
  const std::size_t workers = resolve_workers(options);

  // MAD weights depend only on the prior predictive, so they are shared.
  std::map<std::size_t, MadWeights> mad;
  for (const auto& m : methods) {
    const auto* s = std::get_if<SummaryMethod>(&m.kind);
    if (s && s->mad_weighted && !mad.contains(s->mad_draws)) {
      mad[s->mad_draws] = estimate_mad_weights(
          problem, s->mad_draws, SeedSpec{derive_seed(seed.master_seed, "mad-weights"), seed.stream_id}, options);
    }
  }

  std::vector<Prepared> obs(observed.size());
  std::vector<std::vector<MethodState>> states(observed.size());
  std::vector<std::vector<AbcRun>> runs(observed.size());
  for (std::size_t d = 0; d < observed.size(); ++d) {
    obs[d] = prepare(problem, observed[d], needs, false);
    for (const auto& m : methods) {
      MethodState st;
      st.method = &m;
      AbcRun run;
      run.method = m;
      run.seed = seed;
      run.n_models = problem.models.size();
      if (const auto* s = std::get_if<SummaryMethod>(&m.kind)) {
        st.metric = s->metric;
        if (s->mad_weighted) {
          const auto& w = mad.at(s->mad_draws);
          st.metric = SummaryMetric::weighted(w.weights);
          run.meta.mad_weights = w.weights;
          run.meta.warnings = w.warnings;
        }
        run.component_names = {"summary"};
      } else if (const auto* dm = std::get_if<DiscrepancyMethod>(&m.kind)) {
        if (uses_gaussian(*dm)) {
          const auto& ref = dm->log_transform ? obs[d].log_sorted : obs[d].sorted;
          const double sigma = bandwidth_for(dm->kernel, ref);
          st.mmd.emplace(ref, sigma);
          run.meta.bandwidths.emplace_back("sigma", sigma);
        }
        run.component_names = {"discrepancy"};
      } else {
        const auto& c = std::get<CombinedMethod>(m.kind);
        const auto& f = obs[d].features;
        st.n_components = 2 * f.size();
        for (const auto& lf : f) run.component_names.push_back("returns_lag" + std::to_string(lf.lag));
        for (std::size_t l = 0; l < f.size(); ++l) {
          run.component_names.push_back("distance_lag" + std::to_string(f[l].lag));
          if (uses_gaussian(c.statistic)) {
            const auto& ref = c.statistic.log_transform ? obs[d].log_non_returns[l] : f[l].non_returns;
            const double sigma = bandwidth_for(c.statistic.kernel, ref);
            st.lag_mmd.emplace_back(ref, sigma);
            run.meta.bandwidths.emplace_back("sigma_lag" + std::to_string(f[l].lag), sigma);
          }
        }
      }
      run.components.assign(n_draws * st.n_components, 0.0);
      states[d].push_back(std::move(st));
      runs[d].push_back(std::move(run));
    }
  }

  auto table = std::make_shared<DrawTable>();
  table->model.resize(n_draws);
  std::vector<Params> thetas(n_draws);
  Simulator sim(problem, needs, seed, options.max_retries);
  parallel_for(n_draws, workers, [&](std::size_t i) {
    DrawResult r = sim.draw(i);
    table->model[i] = r.model;
    thetas[i] = std::move(r.theta);
    for (std::size_t d = 0; d < observed.size(); ++d) {
      for (std::size_t m = 0; m < methods.size(); ++m) {
        const auto& st = states[d][m];
        components(st, obs[d], r.prepared, runs[d][m].components.data() + i * st.n_components);
      }
    }
  });

  table->theta_offset.resize(n_draws + 1, 0);
  for (std::size_t i = 0; i < n_draws; ++i) table->theta_offset[i + 1] = table->theta_offset[i] + thetas[i].size();
  table->theta.reserve(table->theta_offset.back());
  for (const auto& t : thetas) table->theta.insert(table->theta.end(), t.begin(), t.end());
  sim.export_failures(*table);
  std::shared_ptr<const DrawTable> shared = table;

  for (std::size_t d = 0; d < observed.size(); ++d) {
    for (std::size_t m = 0; m < methods.size(); ++m) {
      AbcRun& run = runs[d][m];
      run.draws = shared;
      for (double v : run.components) {
        if (!std::isfinite(v)) throw Error("non-finite distance recorded for " + method_label(run.method));
      }
      if (const auto* c = std::get_if<CombinedMethod>(&run.method.kind)) {
        run.distances = combine_columns(run.components, c->omega);
      } else {
        run.distances = run.components;
      }
    }
  }
  return runs;
}

AbcRun run_abc(const AbcProblem& problem, const Dataset& observed, const AbcMethod& method, std::size_t n_draws,
               SeedSpec seed, const EngineOptions& options) {
  auto runs = run_abc_batch(problem, std::span(&observed, 1), std::span(&method, 1), n_draws, seed, options);
  return std::move(runs[0][0]);
}

}  // namespace abcmc
