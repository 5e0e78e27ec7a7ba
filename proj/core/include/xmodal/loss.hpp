#pragma once

#include <utility>

#include "xmodal/embedding.hpp"

namespace xmodal {

struct SoftLabelConfig {
  double beta = 0.3;             // hard/soft mixing weight
  double soft_temperature = 1.0; // temperature turning similarity rows into distributions
};

// Row-stochastic target matrices. a2t mixes the identity with softened
// audio-audio similarities; t2a with text-text similarities.
struct SoftTargets {
  Mat a2t;
  Mat t2a;
};

struct LossOutput {
  double value = 0.0;
  Mat grad_similarity;              // d(value)/dC
  double grad_log_temperature = 0.0;
};

// Symmetric contrastive loss over a square similarity matrix C: the mean
// negative log-probability of the diagonal under row-wise softmax of C/tau
// and of C^T/tau. Gradients are exact.
LossOutput clap_loss(const SimilarityMatrix& c, double tau);

// Teacher-side intra-batch similarity matrices (text first, audio second).
std::pair<SimilarityMatrix, SimilarityMatrix> intra_modal_similarities(
    const EmbeddingBatch& text_teacher, const EmbeddingBatch& audio_teacher);

// Builds soft targets by mixing one-hot rows with row-softmaxed similarity
// rows: (1 - beta) * e_i + beta * softmax(sim_row / soft_temperature).
SoftTargets soft_targets(const SimilarityMatrix& text_sim, const SimilarityMatrix& audio_sim,
                         const SoftLabelConfig& config);

// KL-divergence loss against the soft targets, averaged over both
// directions. With one-hot targets this equals clap_loss exactly.
LossOutput soft_label_loss(const SimilarityMatrix& c, double tau, const SoftTargets& targets);

}  // namespace xmodal
