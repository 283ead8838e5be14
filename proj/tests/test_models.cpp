#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <json.hpp>

#include "abcmc/empirical.hpp"
#include "abcmc/models.hpp"
#include "abcmc/samplers.hpp"

using namespace abcmc;

namespace {

double mean(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double sd(std::span<const double> v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

Dataset matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  Dataset d;
  d.shape = {rows, cols};
  d.values = std::move(values);
  return d;
}

}  // namespace

TEST(NormalModels, NullModelMeanConverges) {
  const auto m = normal_mean_models({});
  Rng rng({1, 0});
  const auto y = m[0].simulator(m[0].prior_sampler(rng), {1000000, 1}, rng);
  EXPECT_LT(std::abs(mean(y.values) - 3.0), 3.0 / std::sqrt(1e6));
  EXPECT_EQ(m[0].label, "M0");
  EXPECT_EQ(m[1].label, "M1");
  EXPECT_TRUE(m[0].prior_sampler(rng).empty());
}

TEST(NormalModels, AlternativePriorVariance) {
  const auto m = normal_mean_models({});
  Rng rng({2, 0});
  std::vector<double> mu(10000);
  for (double& v : mu) v = m[1].prior_sampler(rng).at(0);
  const double var = sd(mu) * sd(mu);
  // Sample variance of 10^4 normals has relative s.e. sqrt(2 / 10^4).
  EXPECT_LT(std::abs(var - 100.0), 3 * 100.0 * std::sqrt(2.0 / 1e4));
  EXPECT_LT(std::abs(mean(mu) - 3.0), 3 * 10.0 / 100.0);
}

TEST(NormalModels, SummaryIsMean) {
  const auto m = normal_mean_models({});
  EXPECT_EQ(m[0].summary_map(Dataset::vector({1, 2, 6})), std::vector<double>{3.0});
}

TEST(NormalModels, UnknownVarianceVariant) {
  NormalMeanConfig cfg;
  cfg.sigma.reset();
  const auto m = normal_mean_models(cfg);
  Rng rng({3, 0});
  EXPECT_EQ(m[0].prior_sampler(rng).size(), 1u);
  EXPECT_EQ(m[1].prior_sampler(rng).size(), 2u);
  const auto s = m[0].summary_map(Dataset::vector({1, 2, 6}));
  ASSERT_EQ(s.size(), 2u);
  EXPECT_DOUBLE_EQ(s[0], 3.0);
  EXPECT_DOUBLE_EQ(s[1], 7.0);
  // Gamma(0.1, 0.1) on the variance has mean 1.
  std::vector<double> v(100000);
  for (double& x : v) x = m[0].prior_sampler(rng).at(0);
  EXPECT_LT(std::abs(mean(v) - 1.0), 3 * std::sqrt(10.0 / v.size()));
}

TEST(ExpoModels, GeneratorsHaveMeanTwo) {
  const auto m = expo_family_models();
  for (int k = 1; k <= 3; ++k) {
    Rng rng({4, static_cast<std::uint64_t>(k)});
    const auto y = m[k - 1].simulator(expo_true_params(k), {100000, 1}, rng);
    EXPECT_LT(std::abs(mean(y.values) - 2.0), 3 * sd(y.values) / std::sqrt(1e5)) << "model " << k;
  }
  EXPECT_DOUBLE_EQ(expo_true_params(1)[0], 0.5);
  EXPECT_DOUBLE_EQ(expo_true_params(2)[0], std::log(2.0) - 0.5);
  EXPECT_DOUBLE_EQ(expo_true_params(3)[0], 1.0);
}

TEST(ExpoModels, SummaryTwoPoint) {
  const auto s = expo_summary(Dataset::vector({1.0, std::exp(1.0)}));
  ASSERT_EQ(s.size(), 3u);
  EXPECT_DOUBLE_EQ(s[0], 1.0 + std::exp(1.0));
  EXPECT_DOUBLE_EQ(s[1], 1.0);
  EXPECT_DOUBLE_EQ(s[2], 1.0);
  EXPECT_THROW(expo_summary(Dataset::vector({1.0, 0.0})), DomainError);
}

TEST(GandKModels, GeneratorsMatchSampler) {
  const auto m = gandk_models();
  Rng a({5, 0}), b({5, 0});
  const auto y1 = m[0].simulator(gandk_true_params(1), {50, 1}, a);
  EXPECT_EQ(y1.values, sample_gandk({0.0, 1.0, 0.8, 0.0, 2.0}, 50, {5, 0}));
  const auto y2 = m[1].simulator(gandk_true_params(2), {50, 1}, b);
  EXPECT_EQ(y2.values, sample_gandk({0.0, 1.0, 0.8, 1.0, 2.0}, 50, {5, 0}));
}

TEST(GandKModels, PriorSupport) {
  const auto m = gandk_models();
  Rng rng({6, 0});
  for (int i = 0; i < 10000; ++i) {
    const auto p1 = m[0].prior_sampler(rng);
    ASSERT_EQ(p1.size(), 1u);
    ASSERT_GT(p1[0], -0.5);
    ASSERT_LE(p1[0], 5.0);
    const auto p2 = m[1].prior_sampler(rng);
    ASSERT_EQ(p2.size(), 2u);
    ASSERT_GE(p2[0], 0.0);
    ASSERT_LE(p2[0], 4.0);
    ASSERT_GT(p2[1], -0.5);
  }
}

TEST(GandKModels, SummaryIsTypeSevenDeciles) {
  const auto s = gandk_summary(Dataset::vector({10, 9, 8, 7, 6, 5, 4, 3, 2, 1}));
  ASSERT_EQ(s.size(), 2u);
  // h = 9 p + 1: 1.9 and 9.1.
  EXPECT_DOUBLE_EQ(s[0], 1.9);
  EXPECT_DOUBLE_EQ(s[1], 9.1);
}

TEST(Toad, NoReturnIsPureRandomWalk) {
  for (int model = 1; model <= 3; ++model) {
    ToadConfig cfg;
    cfg.model = static_cast<ToadModel>(model);
    cfg.params = {1.7, 34.0, 0.0, 758.0};
    cfg.n_days = 12;
    cfg.n_toads = 5;
    const auto d = simulate_toads(cfg, {7, 3});
    const auto steps = sample_stable({1.7, 34.0}, 5 * 11, {7, 3});
    for (std::size_t j = 0; j < 5; ++j) {
      EXPECT_EQ(d.at(0, j), 0.0);
      for (std::size_t i = 1; i < 12; ++i) {
        EXPECT_NEAR(d.at(i, j) - d.at(i - 1, j), steps[j * 11 + i - 1], 1e-9 * (1 + std::abs(steps[j * 11 + i - 1])));
      }
    }
  }
}

TEST(Toad, CertainReturnStaysAtOrigin) {
  ToadConfig cfg;
  cfg.model = ToadModel::random_return;
  cfg.params = {1.7, 34.0, 1.0, 758.0};
  const auto d = simulate_toads(cfg, {8, 0});
  for (double v : d.values) EXPECT_EQ(v, 0.0);
}

TEST(Toad, NearestReturnLandsOnRefuge) {
  ToadConfig cfg;
  cfg.model = ToadModel::nearest_return;
  cfg.params = toad_reference_params(ToadModel::nearest_return);
  cfg.n_days = 30;
  cfg.n_toads = 10;
  const auto d = simulate_toads(cfg, {9, 0});
  // Returns revisit an earlier refuge; moves create a new one.
  double repeats = 0.0;
  for (std::size_t j = 0; j < 10; ++j) {
    for (std::size_t i = 1; i < 30; ++i) {
      bool seen = false;
      for (std::size_t k = 0; k < i; ++k) seen |= d.at(k, j) == d.at(i, j);
      repeats += seen;
    }
  }
  const double nights = 290.0;
  EXPECT_LT(std::abs(repeats / nights - 0.65), 4 * std::sqrt(0.65 * 0.35 / nights));
}

TEST(Toad, DistanceReturnProbabilitiesSumToOne) {
  std::mt19937_64 gen(10);
  std::uniform_real_distribution<double> u(-500, 500);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> refuges(1 + gen() % 20);
    for (double& r : refuges) r = u(gen);
    const double p0 = (gen() % 1000) / 1000.0, d0 = 20 + (gen() % 2000);
    const auto p = distance_return_probabilities(u(gen), refuges, p0, d0);
    const double total = p.stay + std::accumulate(p.refuge.begin(), p.refuge.end(), 0.0);
    EXPECT_NEAR(total, 1.0, 1e-12);
    for (double q : p.refuge) EXPECT_GE(q, 0.0);
  }
}

TEST(Toad, DistanceReturnFlatLimit) {
  const std::vector<double> refuges{0.0, 100.0, -40.0};
  const auto p = distance_return_probabilities(12.0, refuges, 0.3, 1e12);
  EXPECT_NEAR(p.stay, std::pow(0.7, 3), 1e-9);
  for (double q : p.refuge) EXPECT_NEAR(q, (1 - std::pow(0.7, 3)) / 3, 1e-9);
}

TEST(Toad, ReferenceParameters) {
  const auto m1 = toad_reference_params(ToadModel::random_return);
  EXPECT_EQ(m1.alpha, 1.7);
  EXPECT_EQ(m1.gamma, 34.0);
  EXPECT_EQ(m1.p0, 0.6);
  const auto m2 = toad_reference_params(ToadModel::nearest_return);
  EXPECT_EQ(m2.alpha, 1.83);
  EXPECT_EQ(m2.gamma, 46.0);
  EXPECT_EQ(m2.p0, 0.65);
  const auto m3 = toad_reference_params(ToadModel::distance_return);
  EXPECT_EQ(m3.alpha, 1.65);
  EXPECT_EQ(m3.gamma, 32.0);
  EXPECT_EQ(m3.p0, 0.43);
  EXPECT_EQ(m3.d0, 758.0);
}

TEST(Toad, PriorsAndParamVectors) {
  const auto m = toad_models({1, 2, 4, 8}, 10.0);
  Rng rng({11, 0});
  for (int i = 0; i < 1000; ++i) {
    const auto p = m[2].prior_sampler(rng);
    ASSERT_EQ(p.size(), 4u);
    ASSERT_GE(p[0], 1.0);
    ASSERT_LE(p[0], 2.0);
    ASSERT_GE(p[1], 10.0);
    ASSERT_LE(p[1], 100.0);
    ASSERT_GE(p[2], 0.0);
    ASSERT_LE(p[2], 1.0);
    ASSERT_GE(p[3], 20.0);
    ASSERT_LE(p[3], 2000.0);
  }
  EXPECT_EQ(m[0].prior_sampler(rng).size(), 3u);
  EXPECT_EQ(toad_params_vector(ToadModel::nearest_return, {1.83, 46, 0.65, 1}), (Params{1.83, 46, 0.65}));
}

TEST(ToadFeatures, ConstantMatrixIsAllReturns) {
  const auto d = matrix(5, 2, std::vector<double>(10, 3.0));
  const std::vector<int> lags{1, 2};
  const auto f = extract_lag_features(d, lags, 10.0);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[0].return_count, 8u);
  EXPECT_EQ(f[1].return_count, 6u);
  EXPECT_TRUE(f[0].non_returns.empty());
}

TEST(ToadFeatures, SinglePairHandCount) {
  const auto d = matrix(2, 1, {0.0, 25.0});
  const std::vector<int> lags{1};
  const auto f = extract_lag_features(d, lags, 10.0);
  EXPECT_EQ(f[0].return_count, 0u);
  EXPECT_EQ(f[0].non_returns, std::vector<double>{25.0});
  EXPECT_EQ(f[0].pair_count, 1u);
}

TEST(ToadFeatures, MissingCellsSkipped) {
  const double na = std::nan("");
  const auto d = matrix(3, 2, {0.0, 0.0, na, 5.0, 40.0, 70.0});
  const std::vector<int> lags{1, 2};
  const auto f = extract_lag_features(d, lags, 10.0);
  EXPECT_EQ(f[0].pair_count, 2u);
  EXPECT_EQ(f[0].return_count, 1u);
  EXPECT_EQ(f[0].non_returns, std::vector<double>{65.0});
  EXPECT_EQ(f[1].pair_count, 2u);
  EXPECT_EQ(f[1].non_returns, (std::vector<double>{40.0, 70.0}));
  const std::vector<int> too_long{3};
  EXPECT_THROW(extract_lag_features(d, too_long, 10.0), ShapeError);
  const auto empty = matrix(2, 1, {na, 1.0});
  const std::vector<int> one{1};
  EXPECT_THROW(extract_lag_features(empty, one, 10.0), EmptyFeatureError);
}

TEST(ToadFeatures, SummaryStatisticsFloorTies) {
  LagFeatures f;
  f.lag = 1;
  f.return_count = 4;
  f.non_returns = std::vector<double>(7, 20.0);
  const std::vector<LagFeatures> fs{f};
  const auto s = toad_summary_stats(fs);
  ASSERT_EQ(s.size(), 11u);
  for (int k = 0; k < 10; ++k) EXPECT_DOUBLE_EQ(s[k], std::log(kQuantileDiffFloor));
  EXPECT_EQ(s[10], 4.0);
}

TEST(ToadFeatures, SummaryStatisticsDistinctValues) {
  LagFeatures f;
  f.lag = 1;
  for (int i = 0; i <= 10; ++i) f.non_returns.push_back(11.0 + i * i);
  const std::vector<LagFeatures> fs{f};
  const auto s = toad_summary_stats(fs);
  // With 11 points the deciles are the order statistics themselves.
  for (int k = 0; k < 10; ++k) EXPECT_NEAR(s[k], std::log(2.0 * k + 1.0), 1e-12);
}

TEST(ToadFeatures, FortyFourStatistics) {
  ToadConfig cfg;
  for (int model = 1; model <= 3; ++model) {
    cfg.model = static_cast<ToadModel>(model);
    cfg.params = toad_reference_params(cfg.model);
    const auto d = simulate_toads(cfg, {12, static_cast<std::uint64_t>(model)});
    const auto f = extract_lag_features(d, cfg.lags, cfg.return_radius);
    const auto s = toad_summary_stats(f);
    EXPECT_EQ(s.size(), 44u);
    for (double v : s) EXPECT_TRUE(std::isfinite(v));
  }
}

TEST(ToadLoad, FixtureMatchesRecount) {
  const std::string dir = ABCMC_TEST_DATA;
  const auto data = load_toad_csv(dir + "/toad_fixture.csv");
  std::ifstream in(dir + "/toad_fixture_counts.json");
  const auto expected = nlohmann::json::parse(in);
  EXPECT_TRUE(data.had_header);
  EXPECT_EQ(data.locations.shape.rows, expected["days"].get<std::size_t>());
  EXPECT_EQ(data.locations.shape.cols, expected["toads"].get<std::size_t>());
  EXPECT_EQ(data.missing_cells, expected["missing_cells"].get<std::size_t>());
  const std::vector<int> lags{1, 2, 4, 8};
  const auto f = extract_lag_features(data.locations, lags, 10.0);
  for (const auto& lf : f) {
    const auto& e = expected["lags"][std::to_string(lf.lag)];
    EXPECT_EQ(lf.pair_count, e["pairs"].get<std::size_t>());
    EXPECT_EQ(lf.return_count, e["returns"].get<std::size_t>());
    EXPECT_EQ(lf.non_returns.size(), e["non_returns"].get<std::size_t>());
    const double sum = std::accumulate(lf.non_returns.begin(), lf.non_returns.end(), 0.0);
    EXPECT_NEAR(sum, e["non_return_sum"].get<double>(), 1e-6);
  }
}

TEST(ToadLoad, RejectsRaggedAndMissingFiles) {
  const auto tmp = std::filesystem::temp_directory_path() / "abcmc_ragged.csv";
  {
    std::ofstream out(tmp);
    out << "0,0\n1,2,3\n";
  }
  EXPECT_THROW(load_toad_csv(tmp), ConfigError);
  {
    std::ofstream out(tmp);
    out << "0;0\n1;NA\n;4\n";
  }
  const auto d = load_toad_csv(tmp);
  EXPECT_EQ(d.locations.shape.rows, 3u);
  EXPECT_EQ(d.missing_cells, 2u);
  EXPECT_FALSE(d.had_header);
  std::filesystem::remove(tmp);
  EXPECT_THROW(load_toad_csv("/nonexistent/toads.csv"), IoError);
}
