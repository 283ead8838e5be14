#include <algorithm>
#include <cmath>
#include <cstdint>

#include "abcmc/discrepancies.hpp"
#include "abcmc/error.hpp"

namespace abcmc {
namespace {

void require_equal_sizes(std::size_t n, std::size_t m, const char* what) {
  if (n != m) {
    throw ShapeError(std::string(what) + ": samples must have equal size, got " + std::to_string(n) +
                     " and " + std::to_string(m));
  }
}

void require_nonempty(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InsufficientSampleError("distance needs non-empty samples");
}

// Below this size the Gaussian double sums are evaluated directly.
constexpr std::size_t kDirectMmdLimit = 64;

double direct_gaussian_mmd2(std::span<const double> y, std::span<const double> z, double sigma) {
  const double scale = -1.0 / (2.0 * sigma);
  auto g = [scale](double a, double b) { return std::exp(scale * (a - b) * (a - b)); };
  const std::size_t n = y.size();
  const std::size_t m = z.size();
  double yy = 0.0, zz = 0.0, yz = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) yy += g(y[i], y[j]);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) zz += g(z[i], z[j]);
  for (double a : y)
    for (double b : z) yz += g(a, b);
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return 2.0 * yy / (dn * (dn - 1.0)) + 2.0 * zz / (dm * (dm - 1.0)) - 2.0 * yz / (dn * dm);
}

// Sum over i < j of |s_j - s_i| for an ascending sample.
double sorted_pair_gap_sum(std::span<const double> s) {
  const auto n = static_cast<double>(s.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) acc += s[j] * (2.0 * static_cast<double>(j) - n + 1.0);
  return acc;
}

}  // namespace

double wasserstein1(const EmpiricalSample& y, const EmpiricalSample& z) {
  require_equal_sizes(y.size(), z.size(), "wasserstein1");
  const auto ys = y.sorted();
  const auto zs = z.sorted();
  double acc = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) acc += std::fabs(ys[i] - zs[i]);
  return acc / static_cast<double>(ys.size());
}

double wasserstein1_general(std::span<const double> y, std::span<const double> z) {
  require_nonempty(y, z);
  const std::uint64_t n = y.size();
  const std::uint64_t m = z.size();
  if (n == m) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::fabs(y[i] - z[i]);
    return acc / static_cast<double>(n);
  }
  // Quantile functions are step functions with jumps at i/n and j/m. On the
  // common grid of multiples of 1/(n m) the jumps sit at i*m and j*n.
  std::uint64_t i = 0, j = 0, prev = 0;
  double acc = 0.0;
  while (i < n && j < m) {
    const std::uint64_t next_y = (i + 1) * m;
    const std::uint64_t next_z = (j + 1) * n;
    const std::uint64_t next = std::min(next_y, next_z);
    acc += std::fabs(y[i] - z[j]) * static_cast<double>(next - prev);
    prev = next;
    if (next_y == next) ++i;
    if (next_z == next) ++j;
  }
  return acc / (static_cast<double>(n) * static_cast<double>(m));
}

double cvm(const EmpiricalSample& y, const EmpiricalSample& z, TieRule ties) {
  require_equal_sizes(y.size(), z.size(), "cvm");
  return cvm_general(y.sorted(), z.sorted(), ties);
}

double cvm_general(std::span<const double> y, std::span<const double> z, TieRule ties) {
  require_nonempty(y, z);
  const std::size_t n = y.size();
  const std::size_t m = z.size();
  double uy = 0.0, uz = 0.0;
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    double v;
    if (i == n) v = z[j];
    else if (j == m) v = y[i];
    else v = std::min(y[i], z[j]);
    std::size_t cy = 0, cz = 0;
    while (i + cy < n && y[i + cy] == v) ++cy;
    while (j + cz < m && z[j + cz] == v) ++cz;
    const auto start = static_cast<double>(i + j);  // pooled elements before this run
    for (std::size_t t = 0; t < cy; ++t) {
      const double rank = ties == TieRule::average ? start + (static_cast<double>(cy + cz) + 1.0) / 2.0
                                                   : start + static_cast<double>(t) + 1.0;
      const double d = rank - static_cast<double>(i + t + 1);
      uy += d * d;
    }
    for (std::size_t t = 0; t < cz; ++t) {
      const double rank = ties == TieRule::average
                              ? start + (static_cast<double>(cy + cz) + 1.0) / 2.0
                              : start + static_cast<double>(cy + t) + 1.0;
      const double d = rank - static_cast<double>(j + t + 1);
      uz += d * d;
    }
    i += cy;
    j += cz;
  }
  const auto dn = static_cast<double>(n);
  const auto dm = static_cast<double>(m);
  const double u = dn * uy + dm * uz;
  return u / (dn * dm * (dn + dm)) - (4.0 * dm * dn - 1.0) / (6.0 * (dm + dn));
}

KernelSpec KernelSpec::gaussian_fixed(double sigma) {
  KernelSpec k{Kind::gaussian, Bandwidth::fixed, sigma};
  k.validate();
  return k;
}

KernelSpec KernelSpec::gaussian_median() { return {Kind::gaussian, Bandwidth::median_heuristic, 1.0}; }

KernelSpec KernelSpec::energy() { return {Kind::energy, Bandwidth::fixed, 1.0}; }

void KernelSpec::validate() const {
  if (kind == Kind::gaussian && bandwidth == Bandwidth::fixed && !(sigma > 0.0 && std::isfinite(sigma))) {
    throw DomainError("gaussian kernel bandwidth must be positive and finite");
  }
}

double median_heuristic_sigma(std::span<const double> values) {
  if (values.size() < 2) throw InsufficientSampleError("median heuristic needs two or more values");
  std::vector<double> pooled(values.begin(), values.end());
  std::sort(pooled.begin(), pooled.end());
  constexpr std::size_t kMaxPoints = 1000;
  std::vector<double> sub;
  if (pooled.size() <= kMaxPoints) {
    sub = std::move(pooled);
  } else {
    sub.reserve(kMaxPoints);
    for (std::size_t t = 0; t < kMaxPoints; ++t) sub.push_back(pooled[t * pooled.size() / kMaxPoints]);
  }
  std::vector<double> gaps;
  gaps.reserve(sub.size() * (sub.size() - 1) / 2);
  for (std::size_t a = 0; a < sub.size(); ++a)
    for (std::size_t b = a + 1; b < sub.size(); ++b) gaps.push_back((sub[b] - sub[a]) * (sub[b] - sub[a]));
  const double sigma = median(std::move(gaps));
  if (!(sigma > 0.0)) throw DomainError("median heuristic bandwidth is zero (too many tied values)");
  return sigma;
}

KernelSpec resolve_bandwidth(const KernelSpec& kernel, std::span<const double> reference) {
  kernel.validate();
  if (kernel.kind != KernelSpec::Kind::gaussian || kernel.bandwidth == KernelSpec::Bandwidth::fixed) {
    return kernel;
  }
  return KernelSpec::gaussian_fixed(median_heuristic_sigma(reference));
}

double mmd2_unbiased(const EmpiricalSample& y, const EmpiricalSample& z, const KernelSpec& kernel) {
  require_equal_sizes(y.size(), z.size(), "mmd2_unbiased");
  if (y.size() < 2) throw InsufficientSampleError("mmd2_unbiased needs n >= 2");
  kernel.validate();
  if (kernel.kind == KernelSpec::Kind::energy) return energy_mmd2_sorted(y.sorted(), z.sorted());

  double sigma = kernel.sigma;
  if (kernel.bandwidth == KernelSpec::Bandwidth::median_heuristic) {
    std::vector<double> pooled(y.values().begin(), y.values().end());
    pooled.insert(pooled.end(), z.values().begin(), z.values().end());
    sigma = median_heuristic_sigma(pooled);
  }
  if (y.size() <= kDirectMmdLimit) return direct_gaussian_mmd2(y.values(), z.values(), sigma);
  return GaussianMmd(y.sorted(), sigma)(z.sorted());
}

double energy_mmd2_sorted(std::span<const double> y, std::span<const double> z) {
  if (y.size() < 2 || z.size() < 2) throw InsufficientSampleError("energy distance needs n >= 2");
  const auto n = static_cast<double>(y.size());
  const auto m = static_cast<double>(z.size());
  // Cross sum of |y_i - z_j| via a merge with running prefix sums of z.
  double total_z = 0.0;
  for (double v : z) total_z += v;
  double cross = 0.0, prefix = 0.0;
  std::size_t below = 0;
  for (double a : y) {
    while (below < z.size() && z[below] < a) prefix += z[below++];
    const auto nb = static_cast<double>(below);
    cross += a * nb - prefix + (total_z - prefix) - a * (m - nb);
  }
  const double yy = 2.0 * sorted_pair_gap_sum(y);
  const double zz = 2.0 * sorted_pair_gap_sum(z);
  // Kernel is -|a - b|.
  return -yy / (n * (n - 1.0)) - zz / (m * (m - 1.0)) + 2.0 * cross / (n * m);
}

double summary_distance(std::span<const double> a, std::span<const double> b, const SummaryMetric& metric) {
  if (a.size() != b.size()) throw ShapeError("summary vectors must have equal length");
  double acc = 0.0;
  switch (metric.kind) {
    case SummaryMetric::Kind::euclidean:
      for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
      return std::sqrt(acc);
    case SummaryMetric::Kind::l1:
      for (std::size_t i = 0; i < a.size(); ++i) acc += std::fabs(a[i] - b[i]);
      return acc;
    case SummaryMetric::Kind::weighted_euclidean:
      if (metric.weights.size() != a.size()) throw ShapeError("weight vector length mismatch");
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(metric.weights[i] > 0.0)) throw DomainError("summary weights must be positive");
        acc += metric.weights[i] * (a[i] - b[i]) * (a[i] - b[i]);
      }
      return std::sqrt(acc);
  }
  return acc;
}

}  // namespace abcmc
