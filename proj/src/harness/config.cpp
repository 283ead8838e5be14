#include <algorithm>
#include <fstream>
#include <set>

#include "abcmc/error.hpp"
#include "abcmc/harness.hpp"

namespace abcmc {
namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + context);
  }
}

template <class T>
T get(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

std::size_t get_count(const json& j, const std::string& key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw ConfigError("config key '" + key + "' must be a positive integer");
  }
  return v.get<std::size_t>();
}

bool is_toad(Study s) { return s == Study::toad_sim || s == Study::toad_real; }

DistanceKind parse_distance(const std::string& s) {
  if (s == "cvm") return DistanceKind::cvm;
  if (s == "wasserstein1" || s == "wass") return DistanceKind::wasserstein1;
  if (s == "mmd") return DistanceKind::mmd;
  throw ConfigError("unknown distance '" + s + "' (expected cvm, wasserstein1 or mmd)");
}

TieRule parse_ties(const std::string& s) {
  if (s == "average") return TieRule::average;
  if (s == "input_order") return TieRule::input_order;
  throw ConfigError("unknown tie rule '" + s + "' (expected average or input_order)");
}

AbcMethod wrap(Study study, DiscrepancyMethod d, double omega) {
  if (is_toad(study)) return {CombinedMethod{d, omega}, ""};
  return {d, ""};
}

SummaryMethod default_summary(Study study, std::size_t mad_draws) {
  SummaryMethod s;
  if (study == Study::gandk) s.metric = SummaryMetric::l1();
  if (is_toad(study)) {
    s.mad_weighted = true;
    s.mad_draws = mad_draws;
  }
  return s;
}

}  // namespace

std::string study_name(Study s) {
  switch (s) {
    case Study::normal_known: return "normal_known";
    case Study::normal_unknown: return "normal_unknown";
    case Study::expo_family: return "expo_family";
    case Study::gandk: return "gandk";
    case Study::toad_sim: return "toad_sim";
    case Study::toad_real: return "toad_real";
  }
  return "?";
}

Study parse_study(const std::string& name) {
  for (Study s : {Study::normal_known, Study::normal_unknown, Study::expo_family, Study::gandk, Study::toad_sim,
                  Study::toad_real}) {
    if (study_name(s) == name) return s;
  }
  throw ConfigError("unknown study '" + name + "'");
}

AbcMethod parse_method(const json& j, Study study, double omega, std::size_t mad_draws) {
  if (j.is_string()) {
    const std::string label = j.get<std::string>();
    if (label == "ABC-Stat") return {default_summary(study, mad_draws), ""};
    DiscrepancyMethod d;
    std::string base = label;
    const std::string suffix = " (log)";
    if (base.size() > suffix.size() && base.ends_with(suffix)) {
      d.log_transform = true;
      base.resize(base.size() - suffix.size());
    }
    if (base == "ABC-CvM") {
      d.distance = DistanceKind::cvm;
    } else if (base == "ABC-Wass") {
      d.distance = DistanceKind::wasserstein1;
    } else if (base == "ABC-MMD") {
      d.distance = DistanceKind::mmd;
    } else if (base == "ABC-Energy") {
      d.distance = DistanceKind::mmd;
      d.kernel = KernelSpec::energy();
    } else {
      throw ConfigError("unknown method label '" + label + "'");
    }
    return wrap(study, d, omega);
  }

  check_keys(j, {"label", "kind", "metric", "mad_draws", "distance", "log", "kernel", "bandwidth", "ties", "omega"},
             "method");
  const std::string kind = j.contains("kind") ? get<std::string>(j, "kind") : "";
  AbcMethod m;
  if (kind == "summary") {
    SummaryMethod s = default_summary(study, mad_draws);
    if (j.contains("metric")) {
      const auto metric = get<std::string>(j, "metric");
      s.mad_weighted = false;
      if (metric == "euclidean") {
        s.metric = SummaryMetric::euclidean();
      } else if (metric == "l1") {
        s.metric = SummaryMetric::l1();
      } else if (metric == "mad") {
        s.metric = SummaryMetric::euclidean();
        s.mad_weighted = true;
      } else {
        throw ConfigError("unknown summary metric '" + metric + "'");
      }
    }
    if (j.contains("mad_draws")) s.mad_draws = get_count(j, "mad_draws");
    m.kind = s;
  } else if (kind == "discrepancy" || kind == "combined") {
    DiscrepancyMethod d;
    d.distance = parse_distance(get<std::string>(j, "distance"));
    if (j.contains("log")) d.log_transform = get<bool>(j, "log");
    if (j.contains("ties")) d.ties = parse_ties(get<std::string>(j, "ties"));
    if (j.contains("kernel")) {
      const auto k = get<std::string>(j, "kernel");
      if (k == "energy") {
        d.kernel = KernelSpec::energy();
      } else if (k != "gaussian") {
        throw ConfigError("unknown kernel '" + k + "'");
      }
    }
    if (j.contains("bandwidth")) {
      const auto& b = j.at("bandwidth");
      if (b.is_number()) {
        d.kernel = KernelSpec::gaussian_fixed(b.get<double>());
      } else if (!(b.is_string() && b.get<std::string>() == "median")) {
        throw ConfigError("bandwidth must be a positive number or \"median\"");
      }
    }
    const double w = j.contains("omega") ? get<double>(j, "omega") : omega;
    if (kind == "combined") {
      m.kind = CombinedMethod{d, w};
    } else {
      m = wrap(study, d, w);
    }
  } else {
    throw ConfigError("method object needs kind = summary, discrepancy or combined");
  }
  if (j.contains("label")) m.label = get<std::string>(j, "label");
  try {
    m.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid method: ") + e.what());
  }
  return m;
}

void ExperimentConfig::validate() const {
  if (n < 1 || n_datasets < 1 || n_draws < 1) throw ConfigError("counts must be at least 1");
  for (double q : quantiles)
    if (!(q > 0.0 && q <= 1.0)) throw ConfigError("quantiles must lie in (0, 1]");
  const int k = study == Study::normal_known || study == Study::normal_unknown || study == Study::gandk ? 2 : 3;
  for (int m : true_models)
    if (m < 1 || m > k) throw ConfigError("true_models entries must lie in 1.." + std::to_string(k));
  if (!(sigma > 0.0) || !(c > 0.0)) throw ConfigError("sigma and c must be positive");
  if (!(omega >= 0.0 && omega <= 1.0)) throw ConfigError("omega must lie in [0, 1]");
  if (is_toad(study)) {
    if (lags.size() != 4) throw ConfigError("toad studies use exactly four lags");
    for (int l : lags)
      if (l < 1) throw ConfigError("lags must be positive");
    if (!(return_radius > 0.0)) throw ConfigError("return_radius must be positive");
    if (study == Study::toad_sim) {
      if (n_days < 2 || n_toads < 1) throw ConfigError("toad data needs n_days >= 2 and n_toads >= 1");
      for (int l : lags)
        if (static_cast<std::size_t>(l) >= n_days) throw ConfigError("lags must be smaller than n_days");
    }
  }
  if (study == Study::toad_real && data_file.empty()) throw ConfigError("toad_real needs data_file");
  if (mad_draws < 100) throw ConfigError("mad_draws must be at least 100");
}

ExperimentConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  check_keys(j,
             {"schema_version", "study", "n", "n_days", "n_toads", "n_datasets", "n_draws", "methods", "quantiles",
              "true_models", "true_params", "mu_tilde", "sigma", "c", "gamma_prior_on_precision",
              "bayes_factor_form", "omega", "lags", "return_radius", "mad_draws", "data_file", "ties",
              "master_seed", "output_dir", "workers", "plots", "$comment"},
             "config");
  if (!j.contains("schema_version") || get<int>(j, "schema_version") != kConfigSchemaVersion) {
    throw ConfigError("config needs \"schema_version\": " + std::to_string(kConfigSchemaVersion));
  }
  if (!j.contains("study")) throw ConfigError("config needs \"study\"");
  ExperimentConfig c;
  c.study = parse_study(get<std::string>(j, "study"));
  for (auto [key, field] : {std::pair{"n", &c.n}, {"n_days", &c.n_days}, {"n_toads", &c.n_toads},
                            {"n_datasets", &c.n_datasets}, {"n_draws", &c.n_draws}, {"mad_draws", &c.mad_draws}}) {
    if (j.contains(key)) *field = get_count(j, key);
  }
  for (auto [key, field] : {std::pair{"mu_tilde", &c.mu_tilde}, {"sigma", &c.sigma}, {"c", &c.c},
                            {"omega", &c.omega}, {"return_radius", &c.return_radius}}) {
    if (j.contains(key)) *field = get<double>(j, key);
  }
  if (j.contains("gamma_prior_on_precision")) c.gamma_prior_on_precision = get<bool>(j, "gamma_prior_on_precision");
  if (j.contains("bayes_factor_form")) {
    const auto f = get<std::string>(j, "bayes_factor_form");
    if (f == "conjugate") {
      c.bayes_factor_form = BayesFactorForm::conjugate;
    } else if (f == "as_printed") {
      c.bayes_factor_form = BayesFactorForm::as_printed;
    } else {
      throw ConfigError("bayes_factor_form must be conjugate or as_printed");
    }
  }
  if (j.contains("ties")) c.ties = parse_ties(get<std::string>(j, "ties"));
  if (j.contains("quantiles")) c.quantiles = get<std::vector<double>>(j, "quantiles");
  if (j.contains("true_models")) c.true_models = get<std::vector<int>>(j, "true_models");
  if (j.contains("lags")) c.lags = get<std::vector<int>>(j, "lags");
  if (j.contains("true_params")) {
    const auto& tp = j.at("true_params");
    if (!tp.is_object()) throw ConfigError("true_params must map model numbers to parameter arrays");
    for (const auto& [key, value] : tp.items()) {
      int model = 0;
      try {
        model = std::stoi(key);
      } catch (const std::exception&) {
        throw ConfigError("true_params key '" + key + "' is not a model number");
      }
      try {
        c.true_params[model] = value.get<Params>();
      } catch (const json::exception&) {
        throw ConfigError("true_params entry for model " + key + " must be an array of numbers");
      }
    }
  }
  if (j.contains("master_seed")) c.master_seed = get<std::uint64_t>(j, "master_seed");
  if (j.contains("output_dir")) c.output_dir = get<std::string>(j, "output_dir");
  if (j.contains("workers")) c.workers = get<std::size_t>(j, "workers");
  if (j.contains("plots")) c.plots = get<bool>(j, "plots");
  if (j.contains("data_file")) {
    c.data_file = get<std::string>(j, "data_file");
    if (c.data_file.is_relative() && !base_dir.empty()) c.data_file = base_dir / c.data_file;
  }
  if (j.contains("methods")) {
    const auto& ms = j.at("methods");
    if (!ms.is_array()) throw ConfigError("methods must be an array");
    for (const auto& m : ms) c.methods.push_back(parse_method(m, c.study, c.omega, c.mad_draws));
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

ExperimentConfig with_defaults(ExperimentConfig c) {
  const Study s = c.study;
  if (c.methods.empty()) {
    std::vector<std::string> labels;
    switch (s) {
      case Study::normal_known:
      case Study::normal_unknown:
      case Study::gandk: labels = {"ABC-Stat", "ABC-CvM", "ABC-Wass", "ABC-MMD"}; break;
      case Study::expo_family: labels = {"ABC-Stat", "ABC-CvM", "ABC-Wass (log)", "ABC-MMD (log)"}; break;
      case Study::toad_sim:
      case Study::toad_real: labels = {"ABC-Stat", "ABC-CvM", "ABC-Wass", "ABC-Wass (log)"}; break;
    }
    for (const auto& l : labels) c.methods.push_back(parse_method(l, s, c.omega, c.mad_draws));
  }
  for (auto& m : c.methods) {
    if (auto* d = std::get_if<DiscrepancyMethod>(&m.kind)) d->ties = c.ties;
    if (auto* cm = std::get_if<CombinedMethod>(&m.kind)) cm->statistic.ties = c.ties;
  }
  if (c.quantiles.empty()) {
    c.quantiles = s == Study::gandk ? std::vector<double>{0.1, 0.01} : std::vector<double>{0.01, 0.001};
  }
  if (c.true_models.empty()) {
    switch (s) {
      case Study::normal_known:
      case Study::normal_unknown:
      case Study::gandk: c.true_models = {1, 2}; break;
      case Study::expo_family:
      case Study::toad_sim: c.true_models = {1, 2, 3}; break;
      case Study::toad_real: break;
    }
  }
  for (int m : c.true_models) {
    if (c.true_params.contains(m)) continue;
    switch (s) {
      case Study::normal_known: c.true_params[m] = m == 1 ? Params{} : Params{2.0}; break;
      case Study::normal_unknown:
        c.true_params[m] = m == 1 ? Params{c.sigma * c.sigma} : Params{2.0, c.sigma * c.sigma};
        break;
      case Study::expo_family: c.true_params[m] = expo_true_params(m); break;
      case Study::gandk: c.true_params[m] = gandk_true_params(m); break;
      case Study::toad_sim: {
        const auto model = static_cast<ToadModel>(m);
        c.true_params[m] = toad_params_vector(model, toad_reference_params(model));
        break;
      }
      case Study::toad_real: break;
    }
  }
  if (s == Study::toad_real) c.n_datasets = 1;
  c.validate();
  return c;
}

}  // namespace abcmc
