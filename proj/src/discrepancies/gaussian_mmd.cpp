#include <algorithm>
#include <cmath>
#include <map>

#include "abcmc/discrepancies.hpp"
#include "abcmc/error.hpp"

namespace abcmc {
namespace {

constexpr std::size_t P = GaussianMmd::kTerms;
constexpr std::int64_t R = GaussianMmd::kReach;

// For offsets u, v in [-1/2, 1/2) of points in cells d apart,
// exp(-(d + u - v)^2) = sum_n G[d][n] (u - v)^n / n!  with  G[d][n] = (-1)^n exp(-d^2) H_n(d).
// Cramer's bound puts the dropped terms below 1.1 sqrt(2^n / n!) < 1e-15 for n >= 36.
struct Tables {
  std::array<std::array<double, P>, 2 * R + 1> g{};
  std::array<double, P> inv_factorial{};
  Tables() {
    for (std::int64_t d = -R; d <= R; ++d) {
      auto& row = g[static_cast<std::size_t>(d + R)];
      const double x = static_cast<double>(d);
      double prev = std::exp(-x * x), cur = 2.0 * x * prev;
      row[0] = prev;
      row[1] = -cur;
      for (std::size_t n = 1; n + 1 < P; ++n) {
        const double next = 2.0 * x * cur - 2.0 * static_cast<double>(n) * prev;
        prev = cur;
        cur = next;
        row[n + 1] = (n + 1) % 2 == 0 ? cur : -cur;
      }
    }
    inv_factorial[0] = 1.0;
    for (std::size_t a = 1; a < P; ++a) inv_factorial[a] = inv_factorial[a - 1] / static_cast<double>(a);
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

const std::array<double, P>& row(std::int64_t d) { return tables().g[static_cast<std::size_t>(d + R)]; }

}  // namespace

std::vector<GaussianMmd::Cell> GaussianMmd::bin(std::span<const double> sorted, double origin, double inv_h) {
  const auto& inv_fact = tables().inv_factorial;
  std::vector<Cell> cells;
  thread_local std::vector<double> offsets;
  auto close = [&](std::int64_t index) {
    // Four independent power chains per pass.
    Terms raw{};
    const std::size_t count = offsets.size();
    std::size_t i = 0;
    for (; i + 4 <= count; i += 4) {
      const double u0 = offsets[i], u1 = offsets[i + 1], u2 = offsets[i + 2], u3 = offsets[i + 3];
      double p0 = 1.0, p1 = 1.0, p2 = 1.0, p3 = 1.0;
      for (std::size_t a = 0; a < P; ++a) {
        raw[a] += (p0 + p1) + (p2 + p3);
        p0 *= u0;
        p1 *= u1;
        p2 *= u2;
        p3 *= u3;
      }
    }
    for (; i < count; ++i) {
      double pw = 1.0;
      for (std::size_t a = 0; a < P; ++a) {
        raw[a] += pw;
        pw *= offsets[i];
      }
    }
    Cell c;
    c.index = index;
    for (std::size_t a = 0; a < P; ++a) {
      c.scaled[a] = raw[a] * inv_fact[a];
      c.flipped[a] = a % 2 == 0 ? c.scaled[a] : -c.scaled[a];
    }
    cells.push_back(c);
    offsets.clear();
  };
  offsets.clear();
  std::int64_t current = 0;
  for (double x : sorted) {
    const double s = (x - origin) * inv_h;
    const double k = std::floor(s + 0.5);
    if (!(std::abs(k) < 0x1.0p62)) throw DomainError("gaussian kernel sum: value out of range");
    const auto index = static_cast<std::int64_t>(k);
    if (!offsets.empty() && index != current) close(current);
    current = index;
    offsets.push_back(s - k);
  }
  if (!offsets.empty()) close(current);
  return cells;
}

std::vector<GaussianMmd::FieldCell> GaussianMmd::field(const std::vector<Cell>& sources) {
  std::map<std::int64_t, Terms> acc;
  for (const Cell& b : sources) {
    for (std::int64_t d = -R; d <= R; ++d) {
      const auto& g = row(d);
      Terms& f = acc[b.index - d];
      for (std::size_t j = 0; j < P; ++j) {
        double s = 0.0;
        for (std::size_t a = 0; a + j < P; ++a) s += g[a + j] * b.scaled[a];
        f[j] += s;
      }
    }
  }
  std::vector<FieldCell> out;
  out.reserve(acc.size());
  for (const auto& [index, coef] : acc) out.push_back({index, coef});
  return out;
}

double GaussianMmd::apply(const std::vector<FieldCell>& field, const std::vector<Cell>& targets) {
  double total = 0.0;
  auto it = field.begin();
  for (const Cell& c : targets) {
    it = std::lower_bound(it, field.end(), c.index,
                          [](const FieldCell& f, std::int64_t k) { return f.index < k; });
    if (it == field.end()) break;
    if (it->index != c.index) continue;
    double s = 0.0;
    for (std::size_t j = 0; j < P; ++j) s += it->coef[j] * c.flipped[j];
    total += s;
  }
  return total;
}

double GaussianMmd::self_sum(const std::vector<Cell>& cells) {
  auto pair = [](const Cell& b, const Cell& c) {
    const auto& g = row(b.index - c.index);
    double s = 0.0;
    for (std::size_t a = 0; a < P; ++a) {
      double inner = 0.0;
      for (std::size_t j = 0; a + j < P; ++j) inner += g[a + j] * c.flipped[j];
      s += b.scaled[a] * inner;
    }
    return s;
  };
  double diag = 0.0, off = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    diag += pair(cells[i], cells[i]);
    for (std::size_t j = i + 1; j < cells.size() && cells[j].index - cells[i].index <= R; ++j) {
      off += pair(cells[i], cells[j]);
    }
  }
  return diag + 2.0 * off;
}

double GaussianMmd::kernel_sum(std::span<const double> a, std::span<const double> b, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("gaussian kernel bandwidth must be positive");
  if (a.empty() || b.empty()) return 0.0;
  const double inv_h = 1.0 / std::sqrt(2.0 * sigma);
  const double origin = a[a.size() / 2];
  return apply(field(bin(a, origin, inv_h)), bin(b, origin, inv_h));
}

GaussianMmd::GaussianMmd(std::span<const double> reference_sorted, double sigma)
    : reference_size_(reference_sorted.size()), sigma_(sigma) {
  if (reference_size_ < 2) throw InsufficientSampleError("mmd2_unbiased needs n >= 2");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("gaussian kernel bandwidth must be positive");
  inv_h_ = 1.0 / std::sqrt(2.0 * sigma);
  origin_ = reference_sorted[reference_size_ / 2];
  const auto cells = bin(reference_sorted, origin_, inv_h_);
  reference_field_ = field(cells);
  reference_within_ = self_sum(cells) - static_cast<double>(reference_size_);
}

double GaussianMmd::operator()(std::span<const double> other) const {
  if (other.size() < 2) throw InsufficientSampleError("mmd2_unbiased needs n >= 2");
  const auto cells = bin(other, origin_, inv_h_);
  const double cross = apply(reference_field_, cells);
  const double within = self_sum(cells) - static_cast<double>(other.size());
  const auto n = static_cast<double>(reference_size_);
  const auto m = static_cast<double>(other.size());
  return reference_within_ / (n * (n - 1.0)) + within / (m * (m - 1.0)) - 2.0 * cross / (n * m);
}

}  // namespace abcmc
