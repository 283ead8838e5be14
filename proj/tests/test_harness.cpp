#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "abcmc/error.hpp"
#include "abcmc/harness.hpp"

using namespace abcmc;
using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("abcmc_harness_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

json smoke(const std::string& study) {
  return {{"schema_version", 1}, {"study", study}, {"n", 50},        {"n_datasets", 1},
          {"n_draws", 100},      {"workers", 1},   {"master_seed", 3}, {"plots", false}};
}

}  // namespace

TEST(Config, RejectsUnknownKeysAndMissingSchema) {
  auto j = smoke("normal_known");
  j["n_dataset"] = 3;
  EXPECT_THROW(parse_config(j), ConfigError);
  auto k = smoke("normal_known");
  k.erase("schema_version");
  EXPECT_THROW(parse_config(k), ConfigError);
  auto s = smoke("normal_known");
  s["schema_version"] = 2;
  EXPECT_THROW(parse_config(s), ConfigError);
}

TEST(Config, RejectsBadValues) {
  for (auto [key, value] : {std::pair<std::string, json>{"n", 0}, {"n_draws", -4}, {"quantiles", json::array({0.0})},
                            {"quantiles", json::array({1.5})}, {"study", "toads"}, {"n", "ten"},
                            {"true_models", json::array({3})}, {"methods", json::array({"ABC-Foo"})}}) {
    auto j = smoke("normal_known");
    j[key] = value;
    EXPECT_THROW(parse_config(j), ConfigError) << key;
  }
}

TEST(Config, MethodLabelsAndObjects) {
  auto j = smoke("expo_family");
  j["methods"] = {"ABC-Stat", "ABC-CvM", "ABC-Wass (log)", "ABC-MMD (log)",
                  {{"kind", "discrepancy"}, {"distance", "mmd"}, {"kernel", "gaussian"}, {"bandwidth", 0.5}}};
  const auto c = parse_config(j);
  ASSERT_EQ(c.methods.size(), 5u);
  EXPECT_EQ(method_label(c.methods[2]), "ABC-Wass (log)");
  const auto& d = std::get<DiscrepancyMethod>(c.methods[4].kind);
  EXPECT_EQ(d.kernel.bandwidth, KernelSpec::Bandwidth::fixed);
  EXPECT_EQ(d.kernel.sigma, 0.5);
}

TEST(Config, ToadLabelsBecomeCombined) {
  auto j = smoke("toad_sim");
  j["omega"] = 0.3;
  j["methods"] = {"ABC-CvM", "ABC-Stat"};
  const auto c = parse_config(j);
  const auto& comb = std::get<CombinedMethod>(c.methods[0].kind);
  EXPECT_EQ(comb.omega, 0.3);
  EXPECT_TRUE(std::get<SummaryMethod>(c.methods[1].kind).mad_weighted);
}

TEST(Config, StudyDefaults) {
  const auto expo = with_defaults(parse_config(smoke("expo_family")));
  ASSERT_EQ(expo.methods.size(), 4u);
  EXPECT_EQ(method_label(expo.methods[3]), "ABC-MMD (log)");
  EXPECT_EQ(expo.true_models, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(expo.quantiles, (std::vector<double>{0.01, 0.001}));
  const auto gk = with_defaults(parse_config(smoke("gandk")));
  EXPECT_EQ(gk.quantiles, (std::vector<double>{0.1, 0.01}));
  EXPECT_EQ(std::get<SummaryMethod>(gk.methods[0].kind).metric.kind, SummaryMetric::Kind::l1);
  const auto normal = with_defaults(parse_config(smoke("normal_known")));
  EXPECT_EQ(normal.true_models, (std::vector<int>{1, 2}));
  const ExperimentConfig bare;
  EXPECT_EQ(bare.n_draws, 100000u);
  EXPECT_EQ(bare.n_datasets, 20u);
}

TEST(Config, LoadResolvesDataPath) {
  const auto dir = scratch("load");
  std::filesystem::create_directories(dir);
  auto j = smoke("toad_real");
  j["data_file"] = "toads.csv";
  {
    std::ofstream out(dir / "study.json");
    out << j.dump();
  }
  const auto c = load_config(dir / "study.json");
  EXPECT_EQ(c.data_file, dir / "toads.csv");
  EXPECT_THROW(load_config(dir / "missing.json"), IoError);
  {
    std::ofstream out(dir / "broken.json");
    out << "{ not json";
  }
  EXPECT_THROW(load_config(dir / "broken.json"), ConfigError);
  std::filesystem::remove_all(dir);
}

class StudySmoke : public ::testing::TestWithParam<std::string> {};

TEST_P(StudySmoke, OneEstimatePerMethod) {
  auto j = smoke(GetParam());
  if (GetParam().starts_with("toad")) {
    j.erase("n");
    j["n_days"] = 20;
    j["n_toads"] = 10;
    j["mad_draws"] = 100;
    j["n_draws"] = 150;
  }
  const auto cfg = with_defaults(parse_config(j));
  const auto table = run_study(cfg);
  const std::size_t n_true = cfg.true_models.size();
  std::size_t abc = 0;
  for (const auto& e : table.estimates) abc += e.method != "Exact";
  EXPECT_EQ(abc, n_true * cfg.methods.size() * cfg.quantiles.size());
  for (const auto& e : table.estimates) {
    double total = 0.0;
    for (double p : e.probs) total += p;
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
  EXPECT_TRUE(table.metadata.contains("decisions"));
  EXPECT_EQ(table.metadata["simulation"]["draws"].get<std::size_t>(), cfg.n_draws);
  EXPECT_EQ(table.metadata["simulation"]["runs_sharing_draws"].get<std::size_t>(),
            cfg.methods.size() * cfg.n_datasets * n_true);
}

INSTANTIATE_TEST_SUITE_P(Studies, StudySmoke,
                         ::testing::Values("normal_known", "normal_unknown", "expo_family", "gandk", "toad_sim"));

TEST(Study, ToadRealProducesThreeProbabilityRows) {
  auto j = smoke("toad_real");
  j.erase("n");
  j["data_file"] = std::string(ABCMC_TEST_DATA) + "/toad_fixture.csv";
  j["n_draws"] = 300;
  j["mad_draws"] = 100;
  j["quantiles"] = {0.01};
  const auto cfg = with_defaults(parse_config(j));
  const auto table = run_study(cfg);
  EXPECT_EQ(table.model_labels.size(), 3u);
  EXPECT_EQ(table.estimates.size(), cfg.methods.size());
  for (const auto& e : table.estimates) {
    EXPECT_EQ(e.probs.size(), 3u);
    EXPECT_EQ(e.true_model, -1);
  }
  for (const auto& r : table.rows) EXPECT_EQ(r.true_model, "NA");
  EXPECT_TRUE(table.metadata["decisions"].contains("missing_data"));
}

TEST(Study, MetadataRecordsDecisions) {
  auto j = smoke("normal_known");
  const auto normal = run_study(with_defaults(parse_config(j)));
  const auto& d = normal.metadata["decisions"];
  for (const char* key : {"threshold", "quantile_rule", "cvm_ties", "mmd_bandwidth", "bayes_factor"})
    EXPECT_TRUE(d.contains(key)) << key;
  EXPECT_FALSE(normal.metadata["bandwidths"].empty());

  auto u = smoke("normal_unknown");
  EXPECT_TRUE(run_study(with_defaults(parse_config(u))).metadata["decisions"].contains("variance_prior"));

  auto t = smoke("toad_sim");
  t.erase("n");
  t["n_days"] = 20;
  t["n_toads"] = 10;
  t["mad_draws"] = 100;
  const auto toad = run_study(with_defaults(parse_config(t)));
  for (const char* key : {"summary_statistics", "quantile_difference_floor", "model2_return", "resampling"})
    EXPECT_TRUE(toad.metadata["decisions"].contains(key)) << key;
  EXPECT_TRUE(toad.metadata.contains("mad_weights"));
}

TEST(Study, ExactRowsAndBenchmarks) {
  auto j = smoke("normal_known");
  j["n_datasets"] = 3;
  const auto table = run_study(with_defaults(parse_config(j)));
  std::size_t exact_rows = 0;
  for (const auto& r : table.rows) {
    if (r.method == "Exact") {
      ++exact_rows;
      EXPECT_FALSE(r.quantile);
      EXPECT_EQ(*r.mae, 0.0);
    } else {
      EXPECT_EQ(r.benchmark, "exact");
      EXPECT_TRUE(r.mae);
    }
    EXPECT_EQ(r.n_datasets, 3u);
  }
  EXPECT_EQ(exact_rows, 2u);
  EXPECT_EQ(table.model_labels, (std::vector<std::string>{"M0", "M1"}));
}

TEST(Outputs, EmptyTableGivesHeadersAndValidJson) {
  ResultTable t;
  const auto dir = scratch("empty");
  const auto files = emit_outputs(t, dir);
  EXPECT_EQ(read_file(files.summary_csv), "study,method,quantile,n,true_model,mae,mse,per,n_datasets,benchmark\n");
  EXPECT_EQ(count_lines(read_file(files.estimates_csv)), 1u);
  EXPECT_TRUE(json::parse(read_file(files.metadata_json)).is_object());
  EXPECT_TRUE(files.plots.empty());
  std::filesystem::remove_all(dir);
}

TEST(Outputs, RerunIsByteIdentical) {
  auto j = smoke("expo_family");
  j["n_datasets"] = 2;
  j["n_draws"] = 400;
  j["plots"] = true;
  const auto cfg = with_defaults(parse_config(j));
  const auto a = emit_outputs(run_study(cfg), scratch("rerun_a"));
  auto cfg8 = cfg;
  cfg8.workers = 8;
  const auto b = emit_outputs(run_study(cfg8), scratch("rerun_b"));
  EXPECT_EQ(read_file(a.summary_csv), read_file(b.summary_csv));
  EXPECT_EQ(read_file(a.estimates_csv), read_file(b.estimates_csv));
  ASSERT_EQ(a.plots.size(), b.plots.size());
  for (std::size_t i = 0; i < a.plots.size(); ++i) EXPECT_EQ(read_file(a.plots[i]), read_file(b.plots[i]));
}

TEST(Outputs, NormalScatterAxes) {
  auto j = smoke("normal_known");
  j["plots"] = true;
  j["quantiles"] = {0.1};
  const auto dir = scratch("scatter");
  const auto files = emit_outputs(run_study(with_defaults(parse_config(j))), dir);
  ASSERT_EQ(files.plots.size(), 2u);
  const auto svg = read_file(files.plots[0]);
  EXPECT_NE(files.plots[0].filename().string().find("scatter"), std::string::npos);
  EXPECT_NE(svg.find("true posterior probability of M0"), std::string::npos);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Outputs, BoxplotWithoutTruth) {
  BoxGroup g{"ABC-Wass", {0.1, 0.2, 0.3, 0.9, 0.25}};
  const auto svg = boxplot_svg("title", "prob", {g});
  EXPECT_NE(svg.find("ABC-Wass"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Outputs, UnwritableDirectoryReportsPath) {
  ResultTable t;
  try {
    emit_outputs(t, "/proc/abcmc/out");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("/proc/abcmc/out"), std::string::npos);
  }
}
