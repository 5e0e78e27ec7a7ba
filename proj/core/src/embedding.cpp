#include "xmodal/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "xmodal/errors.hpp"

namespace xmodal {

namespace {
constexpr double kMinNorm = 1e-12;
}

EmbeddingVector l2_normalize(const EmbeddingVector& v) {
  const double norm = l2_norm(v.values);
  if (!(norm >= kMinNorm)) {
    throw ZeroNormError("l2_normalize: vector norm below 1e-12");
  }
  EmbeddingVector out;
  out.values.resize(v.values.size());
  for (std::size_t i = 0; i < v.values.size(); ++i) out.values[i] = v.values[i] / norm;
  out.normalized = true;
  return out;
}

Mat normalize_rows(const Mat& m) {
  Mat out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double norm = l2_norm(m.row(i));
    if (!(norm >= kMinNorm)) {
      throw ZeroNormError("normalize_rows: row norm below 1e-12");
    }
    for (std::size_t j = 0; j < m.cols; ++j) out(i, j) = m(i, j) / norm;
  }
  return out;
}

SimilarityMatrix pairwise_similarity(const EmbeddingBatch& xs, const EmbeddingBatch& ys) {
  if (xs.dim() != ys.dim()) {
    throw DimensionMismatchError("pairwise_similarity: embedding dimensions differ");
  }
  SimilarityMatrix sim;
  sim.entries = matmul_nt(xs.rows, ys.rows);
  const bool same_content = xs.modality == ys.modality && xs.rows.same_shape(ys.rows) &&
                            xs.rows.data == ys.rows.data;
  sim.kind = same_content ? SimilarityKind::intra_modal : SimilarityKind::cross_modal;
  return sim;
}

Mat row_softmax(const Mat& m, double temperature) {
  if (!(temperature > 0.0)) {
    throw NonPositiveTemperatureError("row_softmax: temperature must be positive");
  }
  Mat out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i) {
    double row_max = -HUGE_VAL;
    for (std::size_t j = 0; j < m.cols; ++j) {
      row_max = std::max(row_max, m(i, j) / temperature);
    }
    double denom = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) {
      const double e = std::exp(m(i, j) / temperature - row_max);
      out(i, j) = e;
      denom += e;
    }
    for (std::size_t j = 0; j < m.cols; ++j) out(i, j) /= denom;
  }
  return out;
}

Mat row_softmax_backward(const Mat& probs, const Mat& upstream, double temperature) {
  if (!probs.same_shape(upstream)) {
    throw ShapeMismatchError("row_softmax_backward: probs/upstream shapes differ");
  }
  // d m_{ij} = p_ij (g_ij - sum_k g_ik p_ik) / temperature
  Mat grad(probs.rows, probs.cols);
  for (std::size_t i = 0; i < probs.rows; ++i) {
    double inner = 0.0;
    for (std::size_t k = 0; k < probs.cols; ++k) inner += upstream(i, k) * probs(i, k);
    for (std::size_t j = 0; j < probs.cols; ++j) {
      grad(i, j) = probs(i, j) * (upstream(i, j) - inner) / temperature;
    }
  }
  return grad;
}

std::vector<double> l2_normalize_backward(const std::vector<double>& input,
                                          const std::vector<double>& upstream) {
  if (input.size() != upstream.size()) {
    throw ShapeMismatchError("l2_normalize_backward: size mismatch");
  }
  const double norm = l2_norm(input);
  if (!(norm >= kMinNorm)) {
    throw ZeroNormError("l2_normalize_backward: degenerate input norm");
  }
  // y = x / |x|  =>  dx = (g - y <y, g>) / |x|
  std::vector<double> unit(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) unit[i] = input[i] / norm;
  const double proj = dot(unit, upstream);
  std::vector<double> grad(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    grad[i] = (upstream[i] - unit[i] * proj) / norm;
  }
  return grad;
}

Mat normalize_rows_backward(const Mat& raw, const Mat& upstream) {
  if (!raw.same_shape(upstream)) {
    throw ShapeMismatchError("normalize_rows_backward: shape mismatch");
  }
  Mat grad(raw.rows, raw.cols);
  for (std::size_t i = 0; i < raw.rows; ++i) {
    const double norm = l2_norm(raw.row(i));
    if (!(norm >= kMinNorm)) {
      throw ZeroNormError("normalize_rows_backward: degenerate row norm");
    }
    double proj = 0.0;
    for (std::size_t j = 0; j < raw.cols; ++j) {
      proj += (raw(i, j) / norm) * upstream(i, j);
    }
    for (std::size_t j = 0; j < raw.cols; ++j) {
      grad(i, j) = (upstream(i, j) - (raw(i, j) / norm) * proj) / norm;
    }
  }
  return grad;
}

std::pair<Mat, Mat> matmul_nt_backward(const Mat& x, const Mat& y, const Mat& upstream) {
  if (upstream.rows != x.rows || upstream.cols != y.rows || x.cols != y.cols) {
    throw ShapeMismatchError("matmul_nt_backward: inconsistent shapes");
  }
  // C = X Y^T  =>  dX = dC Y, dY = dC^T X
  return {matmul(upstream, y), matmul_tn(upstream, x)};
}

}  // namespace xmodal
