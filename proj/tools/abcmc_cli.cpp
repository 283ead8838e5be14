// Command-line front end: studies, simulation, distances, oracles and toad data checks.

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "abcmc/discrepancies.hpp"
#include "abcmc/empirical.hpp"
#include "abcmc/error.hpp"
#include "abcmc/harness.hpp"
#include "abcmc/models.hpp"
#include "abcmc/oracles.hpp"
#include "abcmc/samplers.hpp"
#include "abcmc/text.hpp"

namespace {

using namespace abcmc;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> read_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (char& ch : line)
      if (ch == ',' || ch == ';' || ch == '\t' || ch == '\r') ch = ' ';
    std::istringstream tokens(line);
    std::string tok;
    bool bad = false;
    std::vector<double> row;
    while (tokens >> tok) {
      double v = 0.0;
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
        bad = true;
        break;
      }
      row.push_back(v);
    }
    if (bad) {
      if (line_no == 1) continue;  // header
      throw ConfigError(path + ":" + std::to_string(line_no) + ": non-numeric value");
    }
    out.insert(out.end(), row.begin(), row.end());
  }
  if (out.empty()) throw ConfigError(path + ": no values");
  return out;
}

std::map<std::string, double> parse_kv(const std::vector<std::string>& args) {
  std::map<std::string, double> kv;
  for (const auto& a : args) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("parameter '" + a + "' is not key=value");
    double v = 0.0;
    const std::string value = a.substr(eq + 1);
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
      throw UsageError("parameter '" + a + "' has a non-numeric value");
    }
    kv[a.substr(0, eq)] = v;
  }
  return kv;
}

double take(std::map<std::string, double>& kv, const std::string& key, double fallback) {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  const double v = it->second;
  kv.erase(it);
  return v;
}

std::size_t take_count(std::map<std::string, double>& kv, const std::string& key, double fallback) {
  const double v = take(kv, key, fallback);
  if (!(v >= 1.0) || v != std::floor(v)) throw UsageError(key + " must be a positive integer");
  return static_cast<std::size_t>(v);
}

void write_output(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw IoError("cannot write " + out_path);
  out << text;
}

std::string vector_text(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += format_double(x) + "\n";
  return s;
}

std::string matrix_text(const Dataset& d) {
  std::string s;
  for (std::size_t r = 0; r < d.shape.rows; ++r) {
    for (std::size_t c = 0; c < d.shape.cols; ++c) {
      if (c) s += ',';
      const double v = d.at(r, c);
      if (!std::isnan(v)) s += format_double(v);
    }
    s += '\n';
  }
  return s;
}

std::string simulate(const std::string& model, const std::vector<std::string>& params, std::uint64_t seed) {
  auto kv = parse_kv(params);
  const SeedSpec spec{seed, 0};
  std::string text;
  if (model == "normal") {
    const std::size_t n = take_count(kv, "n", 100);
    const double sd = take(kv, "sd", 1.0);
    text = vector_text(sample_standard(dist::Normal{take(kv, "mean", 0.0), sd * sd}, n, spec));
  } else if (model == "exponential") {
    const std::size_t n = take_count(kv, "n", 100);
    text = vector_text(sample_standard(dist::Exponential{take(kv, "rate", 1.0)}, n, spec));
  } else if (model == "lognormal") {
    const std::size_t n = take_count(kv, "n", 100);
    const double mu = take(kv, "mu", 0.0);
    text = vector_text(sample_standard(dist::LogNormal{mu, take(kv, "variance", 1.0)}, n, spec));
  } else if (model == "gamma") {
    const std::size_t n = take_count(kv, "n", 100);
    const double shape = take(kv, "shape", 2.0);
    text = vector_text(sample_standard(dist::Gamma{shape, take(kv, "rate", 1.0)}, n, spec));
  } else if (model == "stable") {
    const std::size_t n = take_count(kv, "n", 100);
    const double alpha = take(kv, "alpha", 2.0);
    text = vector_text(sample_stable(StableParams{alpha, take(kv, "gamma", 1.0)}, n, spec));
  } else if (model == "gandk") {
    const std::size_t n = take_count(kv, "n", 100);
    GandKParams p;
    p.a = take(kv, "a", 0.0);
    p.b = take(kv, "b", 1.0);
    p.c = take(kv, "c", 0.8);
    p.g = take(kv, "g", 0.0);
    p.k = take(kv, "k", 2.0);
    text = vector_text(sample_gandk(p, n, spec));
  } else if (model == "toad1" || model == "toad2" || model == "toad3") {
    ToadConfig cfg;
    cfg.model = static_cast<ToadModel>(model.back() - '0');
    cfg.params = toad_reference_params(cfg.model);
    cfg.n_days = take_count(kv, "n_days", 63);
    cfg.n_toads = take_count(kv, "n_toads", 66);
    cfg.lags = {1};
    cfg.params.alpha = take(kv, "alpha", cfg.params.alpha);
    cfg.params.gamma = take(kv, "gamma", cfg.params.gamma);
    cfg.params.p0 = take(kv, "p0", cfg.params.p0);
    cfg.params.d0 = take(kv, "d0", cfg.params.d0);
    text = matrix_text(simulate_toads(cfg, spec));
  } else {
    throw UsageError("unknown model '" + model +
                     "' (normal, exponential, lognormal, gamma, stable, gandk, toad1, toad2, toad3)");
  }
  if (!kv.empty()) throw UsageError("unknown parameter '" + kv.begin()->first + "' for " + model);
  return text;
}

double distance(const std::string& method, const std::string& file_a, const std::string& file_b, bool log_transform,
                double bandwidth, bool input_order_ties) {
  EmpiricalSample y(read_values(file_a));
  EmpiricalSample z(read_values(file_b));
  if (log_transform) {
    y = y.log_transformed();
    z = z.log_transformed();
  }
  const TieRule ties = input_order_ties ? TieRule::input_order : TieRule::average;
  if (method == "wasserstein1") return wasserstein1(y, z);
  if (method == "cvm") return cvm(y, z, ties);
  if (method == "mmd") {
    return mmd2_unbiased(y, z, bandwidth > 0.0 ? KernelSpec::gaussian_fixed(bandwidth) : KernelSpec::gaussian_median());
  }
  if (method == "energy") return mmd2_unbiased(y, z, KernelSpec::energy());
  throw UsageError("unknown distance '" + method + "' (wasserstein1, cvm, mmd, energy)");
}

std::string oracle(const std::string& study, const std::string& file, double mu_tilde, double sigma, double c,
                   bool as_printed) {
  const auto y = read_values(file);
  std::ostringstream out;
  if (study == "expo_family") {
    const auto post = exact_posterior_expo(y);
    for (int k = 1; k <= 3; ++k) {
      out << "M" << k << " log_marginal=" << format_double(marginal_likelihood_expo(k, y))
          << " probability=" << format_double(post.model_probs[k - 1]) << "\n";
    }
  } else if (study == "normal_known") {
    const auto form = as_printed ? BayesFactorForm::as_printed : BayesFactorForm::conjugate;
    const auto post = exact_posterior_normal_known(y, mu_tilde, sigma, c, form);
    out << "B01=" << format_double(bayes_factor_normal_known(y, mu_tilde, sigma, c, form)) << "\n";
    out << "M0 probability=" << format_double(post.model_probs[0]) << "\n";
    out << "M1 probability=" << format_double(post.model_probs[1]) << "\n";
  } else {
    throw UsageError("no exact oracle for study '" + study + "' (expo_family, normal_known)");
  }
  return out.str();
}

std::string toad_load(const std::string& path, const std::vector<int>& lags, double radius) {
  const ToadData data = load_toad_csv(path);
  std::ostringstream out;
  out << "days=" << data.locations.shape.rows << " toads=" << data.locations.shape.cols
      << " missing_cells=" << data.missing_cells << " header=" << (data.had_header ? "yes" : "no") << "\n";
  std::size_t min_days = data.locations.shape.rows, max_days = 0;
  for (auto d : data.observed_days_per_toad) {
    min_days = std::min(min_days, d);
    max_days = std::max(max_days, d);
  }
  out << "observed_days_per_toad min=" << min_days << " max=" << max_days << "\n";
  for (const auto& f : extract_lag_features(data.locations, lags, radius)) {
    out << "lag=" << f.lag << " pairs=" << f.pair_count << " returns=" << f.return_count
        << " non_returns=" << f.non_returns.size() << "\n";
  }
  return out.str();
}

void print_summary(const ResultTable& table) {
  std::cout << summary_csv(table);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate Bayesian computation for model choice with statistical distances"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  std::string out_path;
  auto* seed_opt = app.add_option("--seed", seed, "Master seed")->capture_default_str();
  app.add_option("--workers", workers, "Worker threads (0: ABCMC_WORKERS or all cores)");
  app.add_option("--out", out_path, "Output directory (run) or file (simulate)");

  std::string config_path;
  bool no_plots = false;
  auto* run = app.add_subcommand("run", "Run a study described by a JSON config");
  run->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run->add_flag("--no-plots", no_plots, "Skip SVG plots");

  std::string model;
  std::vector<std::string> params;
  auto* sim = app.add_subcommand("simulate", "Simulate a dataset and print it as CSV");
  sim->add_option("model", model, "normal, exponential, lognormal, gamma, stable, gandk, toad1, toad2, toad3")
      ->required();
  sim->add_option("params", params, "key=value parameters (n, mean, sd, alpha, gamma, ...)");

  std::string method, file_a, file_b;
  bool log_transform = false, input_order = false;
  double bandwidth = 0.0;
  auto* dist_cmd = app.add_subcommand("distance", "Distance between two samples");
  dist_cmd->add_option("method", method, "wasserstein1, cvm, mmd, energy")->required();
  dist_cmd->add_option("fileA", file_a)->required()->check(CLI::ExistingFile);
  dist_cmd->add_option("fileB", file_b)->required()->check(CLI::ExistingFile);
  dist_cmd->add_flag("--log", log_transform, "Log-transform both samples");
  dist_cmd->add_option("--bandwidth", bandwidth, "Fixed Gaussian bandwidth sigma (default: median heuristic)");
  dist_cmd->add_flag("--input-order-ties", input_order, "Break CvM ties by input order");

  std::string study, data_file;
  double mu_tilde = 3.0, sigma = 1.0, c = 100.0;
  bool as_printed = false;
  auto* orc = app.add_subcommand("oracle", "Exact posterior model probabilities");
  orc->add_option("study", study, "expo_family or normal_known")->required();
  orc->add_option("datafile", data_file)->required()->check(CLI::ExistingFile);
  orc->add_option("--mu-tilde", mu_tilde)->capture_default_str();
  orc->add_option("--sigma", sigma)->capture_default_str();
  orc->add_option("--c", c)->capture_default_str();
  orc->add_flag("--as-printed", as_printed, "Use the cn/(c+1) exponent factor");

  std::string toad_csv;
  std::vector<int> lags{1, 2, 4, 8};
  double radius = 10.0;
  auto* toad = app.add_subcommand("toad-load", "Load a toad observation matrix and report its features");
  toad->add_option("csv", toad_csv)->required()->check(CLI::ExistingFile);
  toad->add_option("--lags", lags)->capture_default_str();
  toad->add_option("--radius", radius)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*run) {
      ExperimentConfig cfg = load_config(config_path);
      if (*seed_opt) cfg.master_seed = seed;
      if (workers > 0) cfg.workers = workers;
      if (!out_path.empty()) cfg.output_dir = out_path;
      if (no_plots) cfg.plots = false;
      const ResultTable table = run_study(cfg);
      const OutputFiles files = emit_outputs(table, cfg.output_dir, cfg.plots);
      print_summary(table);
      std::cerr << "wrote " << files.summary_csv.string() << ", " << files.estimates_csv.string() << ", "
                << files.metadata_json.string() << " and " << files.plots.size() << " plot(s)\n";
    } else if (*sim) {
      write_output(out_path, simulate(model, params, seed));
    } else if (*dist_cmd) {
      std::cout << format_double(distance(method, file_a, file_b, log_transform, bandwidth, input_order)) << "\n";
    } else if (*orc) {
      std::cout << oracle(study, data_file, mu_tilde, sigma, c, as_printed);
    } else if (*toad) {
      std::cout << toad_load(toad_csv, lags, radius);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
