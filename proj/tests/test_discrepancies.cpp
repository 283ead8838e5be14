#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "abcmc/discrepancies.hpp"
#include "abcmc/empirical.hpp"
#include "abcmc/error.hpp"
#include "reference.hpp"

using namespace abcmc;

namespace {

std::vector<double> normal_draws(std::mt19937_64& gen, std::size_t n, double mean, double sd) {
  std::normal_distribution<double> d(mean, sd);
  std::vector<double> v(n);
  for (double& x : v) x = d(gen);
  return v;
}

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

double tol(double ref) { return 1e-12 * std::max(1.0, std::abs(ref)); }

}  // namespace

TEST(Empirical, SortedViewIsPermutation) {
  EmpiricalSample s({3.0, -1.0, 2.0, 2.0, 0.5});
  std::vector<std::size_t> idx(s.order().begin(), s.order().end());
  std::sort(idx.begin(), idx.end());
  for (std::size_t i = 0; i < idx.size(); ++i) EXPECT_EQ(idx[i], i);
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LE(s.values()[s.order()[i - 1]], s.values()[s.order()[i]]);
  EXPECT_TRUE(std::is_sorted(s.sorted().begin(), s.sorted().end()));
}

TEST(Empirical, RejectsNanAndEmpty) {
  EXPECT_THROW(EmpiricalSample({1.0, std::nan("")}), DomainError);
  EXPECT_THROW(EmpiricalSample(std::vector<double>{}), Error);
  EXPECT_THROW(EmpiricalSample::from_sorted({2.0, 1.0}), Error);
  EXPECT_THROW(EmpiricalSample({1.0, 0.0}).log_transformed(), DomainError);
}

TEST(Empirical, TypeSevenQuantile) {
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.1), 1.9);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.9), 9.1);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 1.0), 10.0);
  EXPECT_DOUBLE_EQ(median({5.0, 1.0, 3.0, 2.0}), 2.5);
  EXPECT_DOUBLE_EQ(median_abs_deviation(std::vector<double>{1, 2, 3, 4, 100}), 1.0);
}

TEST(Wasserstein, IdenticalSamplesGiveZero) {
  EmpiricalSample y({0.3, -2.0, 5.0});
  EXPECT_EQ(wasserstein1(y, y), 0.0);
}

TEST(Wasserstein, TranslationGivesShift) {
  std::vector<double> a{0.25, 1.5, -3.0, 8.0}, b = a;
  for (double& v : b) v += 2.5;
  EXPECT_EQ(wasserstein1(EmpiricalSample(a), EmpiricalSample(b)), 2.5);
}

TEST(Wasserstein, HandExample) {
  EXPECT_DOUBLE_EQ(wasserstein1(EmpiricalSample({1, 2, 3}), EmpiricalSample({10, 7, 4})), 5.0);
}

TEST(Wasserstein, UnequalSizesRejected) {
  EXPECT_THROW(wasserstein1(EmpiricalSample({1, 2}), EmpiricalSample({1, 2, 3})), ShapeError);
}

TEST(Wasserstein, GeneralFormMatchesQuantileIntegral) {
  std::mt19937_64 gen(4);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + gen() % 40, m = 1 + gen() % 40;
    const auto y = sorted(normal_draws(gen, n, 0.0, 1.0));
    const auto z = sorted(normal_draws(gen, m, 0.5, 2.0));
    // Midpoint rule on the exact common refinement of both quantile grids.
    double expected = 0.0;
    const std::size_t grid = n * m;
    for (std::size_t t = 0; t < grid; ++t) {
      const double u = (t + 0.5) / grid;
      expected += std::abs(y[static_cast<std::size_t>(u * n)] - z[static_cast<std::size_t>(u * m)]);
    }
    expected /= grid;
    EXPECT_NEAR(wasserstein1_general(y, z), expected, tol(expected));
  }
}

TEST(Cvm, HandExample) {
  EXPECT_DOUBLE_EQ(cvm(EmpiricalSample({1, 3}), EmpiricalSample({2, 4})), 0.125);
}

TEST(Cvm, InvariantUnderMonotoneMap) {
  std::mt19937_64 gen(5);
  const auto y = normal_draws(gen, 30, 0, 1), z = normal_draws(gen, 30, 0.3, 1);
  std::vector<double> ey = y, ez = z;
  for (double& v : ey) v = std::exp(v);
  for (double& v : ez) v = std::exp(v);
  EXPECT_NEAR(cvm(EmpiricalSample(y), EmpiricalSample(z)), cvm(EmpiricalSample(ey), EmpiricalSample(ez)), 1e-13);
}

TEST(Cvm, SeparatedSamplesMatchEcdfIntegral) {
  for (std::size_t n : {1, 2, 5, 17}) {
    std::vector<double> y(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<double>(i);
      z[i] = 100.0 + static_cast<double>(i);
    }
    const double expected = ref::cvm(y, z);
    EXPECT_NEAR(cvm(EmpiricalSample(y), EmpiricalSample(z)), expected, tol(expected));
    // Separation is the largest possible value at this n.
    std::mt19937_64 gen(n);
    const auto a = normal_draws(gen, n, 0, 1), b = normal_draws(gen, n, 0, 1);
    EXPECT_LE(cvm(EmpiricalSample(a), EmpiricalSample(b)), expected + 1e-12);
  }
}

TEST(Cvm, GeneralFormMatchesEcdfIntegral) {
  std::mt19937_64 gen(6);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + gen() % 40, m = 1 + gen() % 40;
    const auto y = sorted(normal_draws(gen, n, 0.0, 1.0));
    const auto z = sorted(normal_draws(gen, m, 0.2, 1.5));
    const double expected = ref::cvm(y, z);
    EXPECT_NEAR(cvm_general(y, z), expected, tol(expected));
    EXPECT_NEAR(cvm_general(y, z, TieRule::input_order), expected, tol(expected));
  }
}

TEST(Cvm, TiesAveragedOrOrdered) {
  const std::vector<double> y{1, 2, 2}, z{2, 3, 4};
  const double avg = cvm_general(y, z, TieRule::average);
  const double ord = cvm_general(y, z, TieRule::input_order);
  EXPECT_TRUE(std::isfinite(avg));
  EXPECT_TRUE(std::isfinite(ord));
  EXPECT_NE(avg, ord);
}

TEST(Mmd, HandExample) {
  const double v = mmd2_unbiased(EmpiricalSample({0, 1}), EmpiricalSample({0, 1}), KernelSpec::gaussian_fixed(0.5));
  EXPECT_NEAR(v, std::exp(-1.0) - 1.0, 1e-15);
}

TEST(Mmd, SaturatedKernelGivesZero) {
  const double v =
      mmd2_unbiased(EmpiricalSample({0, 1, 5}), EmpiricalSample({2, -3, 4}), KernelSpec::gaussian_fixed(1e18));
  EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Mmd, RequiresTwoPoints) {
  EXPECT_THROW(mmd2_unbiased(EmpiricalSample({0}), EmpiricalSample({1}), KernelSpec::gaussian_fixed(1)),
               InsufficientSampleError);
  EXPECT_THROW(KernelSpec::gaussian_fixed(0.0), DomainError);
}

TEST(Mmd, MatchesDoubleSum) {
  std::mt19937_64 gen(7);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + gen() % 60;
    const auto y = normal_draws(gen, n, 0, 1), z = normal_draws(gen, n, 0.5, 1.3);
    const double sigma = 0.1 + (gen() % 100) / 20.0;
    const double expected = ref::mmd2(y, z, ref::gaussian_kernel(sigma));
    EXPECT_NEAR(mmd2_unbiased(EmpiricalSample(y), EmpiricalSample(z), KernelSpec::gaussian_fixed(sigma)), expected,
                tol(expected));
    const double energy = ref::mmd2(y, z, [](double a, double b) { return -std::abs(a - b); });
    EXPECT_NEAR(mmd2_unbiased(EmpiricalSample(y), EmpiricalSample(z), KernelSpec::energy()), energy, tol(energy));
  }
}

TEST(Mmd, MedianHeuristicUsesPooledSample) {
  const std::vector<double> y{0, 1, 3}, z{6, 10, 15};
  std::vector<double> pooled{0, 1, 3, 6, 10, 15}, gaps;
  for (std::size_t a = 0; a < pooled.size(); ++a)
    for (std::size_t b = a + 1; b < pooled.size(); ++b) gaps.push_back(std::pow(pooled[b] - pooled[a], 2));
  const double sigma = median(gaps);
  EXPECT_DOUBLE_EQ(median_heuristic_sigma(pooled), sigma);
  EXPECT_NEAR(mmd2_unbiased(EmpiricalSample(y), EmpiricalSample(z), KernelSpec::gaussian_median()),
              ref::mmd2(y, z, ref::gaussian_kernel(sigma)), 1e-14);
  EXPECT_THROW(median_heuristic_sigma(std::vector<double>{2, 2, 2}), DomainError);
}

TEST(GaussianMmd, MatchesDoubleSumForLargeUnequalSamples) {
  std::mt19937_64 gen(8);
  for (auto [n, m] : {std::pair<std::size_t, std::size_t>{2, 3}, {50, 7}, {1500, 900}, {3000, 2500}}) {
    const auto y = sorted(normal_draws(gen, n, 0, 1));
    auto z = normal_draws(gen, m, 0.2, 1.1);
    z.push_back(9.0);  // a point far from the bulk
    z = sorted(z);
    for (double sigma : {0.05, 0.7, 4.0}) {
      const double expected = ref::mmd2(y, z, ref::gaussian_kernel(sigma));
      EXPECT_NEAR(GaussianMmd(y, sigma)(z), expected, 1e-10 * std::max(1.0, std::abs(expected)))
          << n << " " << m << " " << sigma;
    }
  }
}

TEST(GaussianMmd, HeavyTailedSamplesSpanningManyCells) {
  std::mt19937_64 gen(12);
  std::gamma_distribution<double> small_shape(0.05, 1.0);
  std::cauchy_distribution<double> cauchy(0.0, 1.0);
  std::vector<double> y(800), z(600);
  for (double& v : y) v = std::log(small_shape(gen) + 1e-300);
  for (double& v : z) v = cauchy(gen);
  y = sorted(y);
  z = sorted(z);
  for (double sigma : {0.3, 2.0}) {
    const double expected = ref::mmd2(y, z, ref::gaussian_kernel(sigma));
    EXPECT_NEAR(GaussianMmd(y, sigma)(z), expected, 1e-10 * std::max(1.0, std::abs(expected))) << sigma;
    EXPECT_NEAR(GaussianMmd(z, sigma)(y), expected, 1e-10 * std::max(1.0, std::abs(expected))) << sigma;
  }
}

TEST(GaussianMmd, KernelSumMatchesDoubleLoop) {
  std::mt19937_64 gen(9);
  const auto a = sorted(normal_draws(gen, 700, 0, 3)), b = sorted(normal_draws(gen, 400, 1, 1));
  double expected = 0.0;
  for (double x : a)
    for (double y : b) expected += std::exp(-(x - y) * (x - y) / 2.0);
  EXPECT_NEAR(GaussianMmd::kernel_sum(a, b, 1.0), expected, 1e-10 * expected);
}

TEST(Energy, SortedFormMatchesDoubleSum) {
  std::mt19937_64 gen(10);
  const auto y = sorted(normal_draws(gen, 40, 0, 1)), z = sorted(normal_draws(gen, 25, 1, 2));
  const double expected = ref::mmd2(y, z, [](double a, double b) { return -std::abs(a - b); });
  EXPECT_NEAR(energy_mmd2_sorted(y, z), expected, tol(expected));
}

TEST(Summary, Metrics) {
  const std::vector<double> a{0, 0}, b{3, 4};
  EXPECT_DOUBLE_EQ(summary_distance(a, b, SummaryMetric::euclidean()), 5.0);
  EXPECT_DOUBLE_EQ(summary_distance(a, b, SummaryMetric::l1()), 7.0);
  EXPECT_EQ(summary_distance(b, b, SummaryMetric::euclidean()), 0.0);
  EXPECT_THROW(summary_distance(a, std::vector<double>{1}, SummaryMetric::euclidean()), ShapeError);
}

TEST(Summary, WeightedMatchesPrescaledEuclidean) {
  const std::vector<double> w{4.0, 0.25, 9.0};
  const std::vector<double> a{1, 2, 3}, b{-1, 5, 2.5};
  std::vector<double> sa(3), sb(3);
  for (int i = 0; i < 3; ++i) {
    sa[i] = a[i] * std::sqrt(w[i]);
    sb[i] = b[i] * std::sqrt(w[i]);
  }
  EXPECT_NEAR(summary_distance(a, b, SummaryMetric::weighted(w)),
              summary_distance(sa, sb, SummaryMetric::euclidean()), 1e-14);
}

TEST(Combine, WeightEndpoints) {
  const std::vector<double> v{1, 1, 1, 1, 2, 0, 0, 0,  //
                              3, 0, 1, 0, 1, 1, 1, 1,  //
                              0, 0, 0, 0, 0, 0, 0, 1};
  const auto counts_only = combine_columns(v, 1.0);
  EXPECT_DOUBLE_EQ(counts_only[0], 1.0);
  EXPECT_DOUBLE_EQ(counts_only[1], 1.0);
  EXPECT_DOUBLE_EQ(counts_only[2], 0.0);
  const auto stats_only = combine_columns(v, 0.0);
  EXPECT_DOUBLE_EQ(stats_only[0], 0.5);
  EXPECT_DOUBLE_EQ(stats_only[1], 1.0);
  EXPECT_DOUBLE_EQ(stats_only[2], 0.25);
  const auto mixed = combine_columns(v, 0.2);
  EXPECT_DOUBLE_EQ(mixed[1], 1.0);
}

TEST(Combine, NamedRecordsAndErrors) {
  DistanceRecord r;
  for (int k = 0; k < 8; ++k) r.components.push_back({"c" + std::to_string(k), 1.0 + k});
  const std::vector<DistanceRecord> rs{r, r};
  for (double d : combine_distances(rs, 0.3)) EXPECT_DOUBLE_EQ(d, 1.0);
  EXPECT_THROW(combine_columns(std::vector<double>(7, 1.0), 0.2), ShapeError);
  EXPECT_THROW(combine_columns(std::vector<double>(8, 1.0), 1.5), DomainError);
  EXPECT_THROW(combine_columns(std::vector<double>(8, 0.0), 0.2), DegenerateNormalizationError);
  std::vector<double> bad(8, 1.0);
  bad[5] = std::nan("");
  EXPECT_THROW(combine_columns(bad, 0.2), DomainError);
}
