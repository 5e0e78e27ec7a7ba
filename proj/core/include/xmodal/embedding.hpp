#pragma once

#include <utility>
#include <vector>

#include "xmodal/linalg.hpp"

namespace xmodal {

enum class Modality { text, audio };
enum class SimilarityKind { cross_modal, intra_modal };

struct EmbeddingVector {
  std::vector<double> values;
  bool normalized = false;
};

// N embeddings of one modality, one per matrix row.
struct EmbeddingBatch {
  Mat rows;
  Modality modality = Modality::text;
  bool normalized = false;

  std::size_t size() const { return rows.rows; }
  std::size_t dim() const { return rows.cols; }
};

// Pairwise inner products. With normalized inputs the entries are cosines.
struct SimilarityMatrix {
  Mat entries;
  SimilarityKind kind = SimilarityKind::cross_modal;
};

// Scales v to unit L2 norm. Throws ZeroNormError below norm 1e-12.
EmbeddingVector l2_normalize(const EmbeddingVector& v);

// Row-wise normalization of a whole batch; same degenerate-norm rule.
Mat normalize_rows(const Mat& m);

// entries[i][j] = <xs[i], ys[j]>. Marked intra_modal when both batches hold
// the same modality and identical content.
SimilarityMatrix pairwise_similarity(const EmbeddingBatch& xs, const EmbeddingBatch& ys);

// Row-stochastic softmax of m / temperature, computed with per-row max
// subtraction. Throws NonPositiveTemperatureError.
Mat row_softmax(const Mat& m, double temperature);

// Gradients. Each backward takes the upstream gradient plus whatever the
// forward pass needs to be replayed, and returns d(loss)/d(input).

// probs must be the forward output of row_softmax(m, temperature).
Mat row_softmax_backward(const Mat& probs, const Mat& upstream, double temperature);

// input is the pre-normalization vector passed to l2_normalize.
std::vector<double> l2_normalize_backward(const std::vector<double>& input,
                                          const std::vector<double>& upstream);

// Row-wise analogue; raw is the pre-normalization matrix.
Mat normalize_rows_backward(const Mat& raw, const Mat& upstream);

// For C = X Y^T: returns (dX, dY) given dC.
std::pair<Mat, Mat> matmul_nt_backward(const Mat& x, const Mat& y, const Mat& upstream);

}  // namespace xmodal
