#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace abcmc {

/// Shape of a dataset: a length-n vector (cols == 1) or an n_d x n_t matrix.
struct DataShape {
  std::size_t rows = 0;
  std::size_t cols = 1;

  std::size_t size() const { return rows * cols; }
  friend bool operator==(const DataShape&, const DataShape&) = default;
};

/// Raw observed or simulated data, row-major. NaN marks a missing cell; only
/// matrix data (toad locations) may contain missing cells.
struct Dataset {
  DataShape shape;
  std::vector<double> values;

  static Dataset vector(std::vector<double> v) {
    Dataset d;
    d.shape = {v.size(), 1};
    d.values = std::move(v);
    return d;
  }

  double at(std::size_t row, std::size_t col) const { return values[row * shape.cols + col]; }
  double& at(std::size_t row, std::size_t col) { return values[row * shape.cols + col]; }

  bool has_missing() const {
    for (double v : values)
      if (std::isnan(v)) return true;
    return false;
  }
};

}  // namespace abcmc
