#include "xmodal/loss.hpp"

#include <cmath>

#include "xmodal/errors.hpp"

namespace xmodal {

namespace {

constexpr double kProbFloor = 1e-30;

void require_square(const Mat& m, const char* who) {
  if (m.rows != m.cols || m.rows == 0) {
    throw NonSquareError(std::string(who) + ": similarity matrix must be square");
  }
}

void require_tau(double tau) {
  if (!(tau > 0.0)) {
    throw NonPositiveTemperatureError("temperature must be positive");
  }
}

double log_floored(double p) { return std::log(p < kProbFloor ? kProbFloor : p); }

// Shared gradient assembly for both losses. row_probs/col_probs are the
// row-softmax of C/tau and C^T/tau; a2t/t2a the (possibly one-hot) targets.
// dS = ((P - a2t) + (Q - t2a)^T) / 2N, dC = dS / tau,
// d(log tau) = -sum dS * S.
LossOutput assemble(const Mat& c, double tau, const Mat& row_probs, const Mat& col_probs,
                    const Mat& a2t, const Mat& t2a) {
  const std::size_t n = c.rows;
  const double scale = 1.0 / (2.0 * static_cast<double>(n));
  Mat grad_s(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      grad_s(i, j) = row_probs(i, j) - a2t(i, j);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      grad_s(j, i) += col_probs(i, j) - t2a(i, j);
    }
  }
  for (double& g : grad_s.data) g *= scale;

  LossOutput out;
  out.grad_similarity = Mat(n, n);
  double tau_acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out.grad_similarity(i, j) = grad_s(i, j) / tau;
      tau_acc += grad_s(i, j) * (c(i, j) / tau);
    }
  }
  out.grad_log_temperature = -tau_acc;
  return out;
}

}  // namespace

LossOutput clap_loss(const SimilarityMatrix& c, double tau) {
  require_square(c.entries, "clap_loss");
  require_tau(tau);
  const std::size_t n = c.entries.rows;
  const Mat row_probs = row_softmax(c.entries, tau);
  const Mat col_probs = row_softmax(transpose(c.entries), tau);

  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += -log_floored(row_probs(i, i));
  for (std::size_t i = 0; i < n; ++i) acc += -log_floored(col_probs(i, i));

  Mat identity(n, n);
  for (std::size_t i = 0; i < n; ++i) identity(i, i) = 1.0;
  LossOutput out = assemble(c.entries, tau, row_probs, col_probs, identity, identity);
  out.value = acc / (2.0 * static_cast<double>(n));
  return out;
}

std::pair<SimilarityMatrix, SimilarityMatrix> intra_modal_similarities(
    const EmbeddingBatch& text_teacher, const EmbeddingBatch& audio_teacher) {
  if (text_teacher.dim() != audio_teacher.dim() ||
      text_teacher.size() != audio_teacher.size()) {
    throw DimensionMismatchError("intra_modal_similarities: batch shapes differ");
  }
  return {pairwise_similarity(text_teacher, text_teacher),
          pairwise_similarity(audio_teacher, audio_teacher)};
}

SoftTargets soft_targets(const SimilarityMatrix& text_sim, const SimilarityMatrix& audio_sim,
                         const SoftLabelConfig& config) {
  require_square(text_sim.entries, "soft_targets");
  require_square(audio_sim.entries, "soft_targets");
  if (text_sim.entries.rows != audio_sim.entries.rows) {
    throw DimensionMismatchError("soft_targets: text/audio batch sizes differ");
  }
  if (!(config.beta >= 0.0 && config.beta <= 1.0)) {
    throw InvalidConfigError("soft_targets: beta must lie in [0, 1]");
  }
  const std::size_t n = text_sim.entries.rows;
  const Mat audio_soft = row_softmax(audio_sim.entries, config.soft_temperature);
  const Mat text_soft = row_softmax(text_sim.entries, config.soft_temperature);

  SoftTargets targets;
  targets.a2t = Mat(n, n);
  targets.t2a = Mat(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double hard = i == j ? 1.0 : 0.0;
      targets.a2t(i, j) = (1.0 - config.beta) * hard + config.beta * audio_soft(i, j);
      targets.t2a(i, j) = (1.0 - config.beta) * hard + config.beta * text_soft(i, j);
    }
  }
  return targets;
}

LossOutput soft_label_loss(const SimilarityMatrix& c, double tau, const SoftTargets& targets) {
  require_square(c.entries, "soft_label_loss");
  require_tau(tau);
  const std::size_t n = c.entries.rows;
  if (targets.a2t.rows != n || targets.a2t.cols != n || targets.t2a.rows != n ||
      targets.t2a.cols != n) {
    throw ShapeMismatchError("soft_label_loss: target shape does not match C");
  }
  for (const Mat* t : {&targets.a2t, &targets.t2a}) {
    for (std::size_t i = 0; i < n; ++i) {
      double row_sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (!((*t)(i, j) >= 0.0)) {
          throw InvalidTargetsError("soft_label_loss: negative target entry");
        }
        row_sum += (*t)(i, j);
      }
      if (std::abs(row_sum - 1.0) > 1e-6) {
        throw InvalidTargetsError("soft_label_loss: target row does not sum to 1");
      }
    }
  }

  const Mat row_probs = row_softmax(c.entries, tau);
  const Mat col_probs = row_softmax(transpose(c.entries), tau);

  // True KL in both directions: sum_j t (log t - log q), with 0 log 0 = 0.
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double t = targets.a2t(i, j);
      if (t != 0.0) acc += t * (std::log(t) - log_floored(row_probs(i, j)));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double t = targets.t2a(i, j);
      if (t != 0.0) acc += t * (std::log(t) - log_floored(col_probs(i, j)));
    }
  }

  LossOutput out = assemble(c.entries, tau, row_probs, col_probs, targets.a2t, targets.t2a);
  out.value = acc / (2.0 * static_cast<double>(n));
  return out;
}

}  // namespace xmodal
