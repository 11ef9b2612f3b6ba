#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nnagg/errors.hpp"

namespace nnagg {

// Dense row-major matrix of doubles. All numeric work in this library is
// double precision.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }

  bool empty() const { return rows == 0 || cols == 0; }

  bool operator==(const Matrix&) const = default;

  // Copies the given rows (in order) into a new matrix.
  Matrix take_rows(std::span<const std::size_t> idx) const {
    Matrix out(idx.size(), cols);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] >= rows) throw ShapeError("take_rows: row index out of range");
      for (std::size_t j = 0; j < cols; ++j) out(k, j) = (*this)(idx[k], j);
    }
    return out;
  }
};

}  // namespace nnagg
