#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "xmodal/errors.hpp"

namespace xmodal {

// Dense row-major matrix of doubles. Everything in this project is small
// (batch x embedding dimension), so plain triple loops are fast enough and
// keep the numerics transparent.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }

  bool same_shape(const Mat& other) const {
    return rows == other.rows && cols == other.cols;
  }
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double l2_norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

inline bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

inline bool all_finite(const Mat& m) {
  return all_finite(std::span<const double>(m.data));
}

// C = A * B
inline Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols != b.rows) throw ShapeMismatchError("matmul: inner dimensions differ");
  Mat c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

// C = A * B^T
inline Mat matmul_nt(const Mat& a, const Mat& b) {
  if (a.cols != b.cols) throw ShapeMismatchError("matmul_nt: inner dimensions differ");
  Mat c(a.rows, b.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < b.rows; ++j) {
      c(i, j) = dot(a.row(i), b.row(j));
    }
  }
  return c;
}

// C = A^T * B
inline Mat matmul_tn(const Mat& a, const Mat& b) {
  if (a.rows != b.rows) throw ShapeMismatchError("matmul_tn: inner dimensions differ");
  Mat c(a.cols, b.cols);
  for (std::size_t k = 0; k < a.rows; ++k) {
    for (std::size_t i = 0; i < a.cols; ++i) {
      const double aki = a(k, i);
      for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += aki * b(k, j);
    }
  }
  return c;
}

inline Mat transpose(const Mat& a) {
  Mat t(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  }
  return t;
}

}  // namespace xmodal
