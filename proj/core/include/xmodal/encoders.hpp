#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "xmodal/embedding.hpp"
#include "xmodal/items.hpp"
#include "xmodal/linalg.hpp"

namespace xmodal {

// Dimension chain for the two towers. The text tower consumes hashed
// bag-of-tokens features of width text_vocab_dim; the audio tower consumes
// the stored feature vectors directly.
struct ModelDims {
  std::size_t text_vocab_dim = 64;
  std::size_t audio_feature_dim = 64;
  std::size_t text_latent_dim = 32;
  std::size_t audio_latent_dim = 32;
  std::size_t projection_hidden_dim = 32;
  std::size_t embed_dim = 32;
  std::uint64_t text_hash_seed = 17;

  bool operator==(const ModelDims&) const = default;
};

// Fully connected stack: ReLU on hidden layers, identity on the output
// layer. weights[l] is (out x in); biases[l] has length out.
struct MlpParams {
  std::vector<Mat> weights;
  std::vector<std::vector<double>> biases;

  std::size_t num_layers() const { return weights.size(); }
  std::size_t input_dim() const { return weights.front().cols; }
  std::size_t output_dim() const { return weights.back().rows; }
};

using MlpGrads = MlpParams;

struct ModelParams {
  ModelDims dims;
  MlpParams text_encoder;    // text_vocab_dim -> text_latent_dim
  MlpParams audio_encoder;   // audio_feature_dim -> audio_latent_dim
  MlpParams text_projection;  // text_latent_dim -> hidden -> embed_dim
  MlpParams audio_projection; // audio_latent_dim -> hidden -> embed_dim
  double log_temperature = 0.0;

  double temperature() const;
};

struct ParamGrads {
  MlpGrads text_encoder;
  MlpGrads audio_encoder;
  MlpGrads text_projection;
  MlpGrads audio_projection;
  double log_temperature = 0.0;
};

struct MlpCache {
  std::vector<Mat> inputs;           // input to each layer
  std::vector<Mat> pre_activations;  // X W^T + b per layer
  Mat output;
};

struct TowerCache {
  MlpCache encoder;
  MlpCache projection;
  Mat raw;  // projection output before row normalization
};

struct EncodeCache {
  TowerCache text;
  TowerCache audio;
  std::uint64_t params_stamp = 0;
  std::size_t batch = 0;
};

struct EncodeResult {
  EmbeddingBatch text;
  EmbeddingBatch audio;
  EncodeCache cache;
};

struct TowerResult {
  EmbeddingBatch embeddings;
  TowerCache cache;
};

// Hashed bag-of-tokens featurizer. Deterministic in (tokens, vocab_dim,
// seed); token order does not matter. Output is L2-normalized counts.
std::vector<double> featurize_text(const TextItem& item, std::size_t vocab_dim,
                                   std::uint64_t seed);

// Identity featurizer for the synthetic audio items.
std::vector<double> featurize_audio(const AudioItem& item);

Mat mlp_forward(const MlpParams& mlp, const Mat& input, MlpCache* cache = nullptr);

// Returns gradient w.r.t. the layer stack input; fills grads.
Mat mlp_backward(const MlpParams& mlp, const MlpCache& cache, const Mat& upstream,
                 MlpGrads& grads);

// Featurize + encode + project + normalize one modality.
TowerResult forward_text(const ModelParams& params, std::span<const TextItem> items);
TowerResult forward_audio(const ModelParams& params, std::span<const AudioItem> items);

// Paired forward pass used in training. Lists must have equal length N >= 1.
EncodeResult encode_batch(const ModelParams& params, std::span<const TextItem> texts,
                          std::span<const AudioItem> audios);

// Backpropagates d(loss)/d(embeddings) into parameter gradients. The cache
// must come from encode_batch with the identical parameters, otherwise
// StaleCacheError is thrown. log_temperature is left at zero; losses report
// its gradient separately.
ParamGrads backward_batch(const ModelParams& params, const EncodeCache& cache,
                          const Mat& grad_text, const Mat& grad_audio);

// Scaled-uniform init (+-1/sqrt(fan_in)), zero biases, tau = 0.007.
ModelParams init_params(const ModelDims& dims, std::uint64_t seed);

ParamGrads zero_grads(const ModelParams& params);

// Content stamp over dims and every parameter value.
std::uint64_t params_hash(const ModelParams& params);

// Mutable views over every trainable scalar, in a fixed order, paired with
// stable tensor names ("text_projection.layer1.weight", ...). Parameter and
// gradient structures produce aligned spans.
std::vector<std::span<double>> param_spans(ModelParams& params);
std::vector<std::span<double>> grad_spans(ParamGrads& grads);
std::vector<std::string> param_tensor_names(const ModelParams& params);

std::size_t param_count(const ModelParams& params);
std::vector<double> flatten_params(const ModelParams& params);
void unflatten_params(ModelParams& params, std::span<const double> values);

}  // namespace xmodal
