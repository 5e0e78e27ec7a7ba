#include "xmodal/encoders.hpp"

#include <cmath>

#include "xmodal/errors.hpp"
#include "xmodal/hash.hpp"
#include "xmodal/rng.hpp"

namespace xmodal {

namespace {

void check_mlp_chain(const MlpParams& mlp, const char* name) {
  if (mlp.weights.empty() || mlp.weights.size() != mlp.biases.size()) {
    throw InvalidDimsError(std::string(name) + ": malformed layer stack");
  }
  for (std::size_t l = 0; l < mlp.weights.size(); ++l) {
    if (mlp.biases[l].size() != mlp.weights[l].rows) {
      throw InvalidDimsError(std::string(name) + ": bias/weight shape mismatch");
    }
    if (l > 0 && mlp.weights[l].cols != mlp.weights[l - 1].rows) {
      throw InvalidDimsError(std::string(name) + ": layer dimensions do not chain");
    }
  }
}

MlpParams init_mlp(std::span<const std::size_t> dims, Rng& rng) {
  MlpParams mlp;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const std::size_t in = dims[l];
    const std::size_t out = dims[l + 1];
    Mat w(out, in);
    const double scale = 1.0 / std::sqrt(static_cast<double>(in));
    for (double& x : w.data) x = rng.uniform(-scale, scale);
    mlp.weights.push_back(std::move(w));
    mlp.biases.emplace_back(out, 0.0);
  }
  return mlp;
}

MlpGrads zero_like(const MlpParams& mlp) {
  MlpGrads g;
  for (std::size_t l = 0; l < mlp.num_layers(); ++l) {
    g.weights.emplace_back(mlp.weights[l].rows, mlp.weights[l].cols);
    g.biases.emplace_back(mlp.biases[l].size(), 0.0);
  }
  return g;
}

void append_mlp_spans(MlpParams& mlp, std::vector<std::span<double>>& spans) {
  for (std::size_t l = 0; l < mlp.num_layers(); ++l) {
    spans.emplace_back(mlp.weights[l].data);
    spans.emplace_back(mlp.biases[l]);
  }
}

void append_mlp_names(const MlpParams& mlp, const std::string& prefix,
                      std::vector<std::string>& names) {
  for (std::size_t l = 0; l < mlp.num_layers(); ++l) {
    names.push_back(prefix + ".layer" + std::to_string(l) + ".weight");
    names.push_back(prefix + ".layer" + std::to_string(l) + ".bias");
  }
}

Mat featurize_text_batch(const ModelParams& params, std::span<const TextItem> items) {
  Mat x(items.size(), params.dims.text_vocab_dim);
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto f =
        featurize_text(items[i], params.dims.text_vocab_dim, params.dims.text_hash_seed);
    std::copy(f.begin(), f.end(), x.row(i).begin());
  }
  return x;
}

Mat featurize_audio_batch(const ModelParams& params, std::span<const AudioItem> items) {
  Mat x(items.size(), params.dims.audio_feature_dim);
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].features.size() != params.dims.audio_feature_dim) {
      throw DimensionMismatchError("audio item '" + items[i].id +
                                   "' feature length does not match model dims");
    }
    const auto f = featurize_audio(items[i]);
    std::copy(f.begin(), f.end(), x.row(i).begin());
  }
  return x;
}

TowerResult run_tower(const MlpParams& encoder, const MlpParams& projection, Mat features,
                      Modality modality) {
  TowerResult result;
  TowerCache& cache = result.cache;
  const Mat latents = mlp_forward(encoder, features, &cache.encoder);
  cache.raw = mlp_forward(projection, latents, &cache.projection);
  result.embeddings.rows = normalize_rows(cache.raw);
  result.embeddings.modality = modality;
  result.embeddings.normalized = true;
  return result;
}

// Backward through one tower; returns accumulated parameter gradients.
void tower_backward(const MlpParams& encoder, const MlpParams& projection,
                    const TowerCache& cache, const Mat& grad_embeddings,
                    MlpGrads& encoder_grads, MlpGrads& projection_grads) {
  const Mat grad_raw = normalize_rows_backward(cache.raw, grad_embeddings);
  const Mat grad_latents = mlp_backward(projection, cache.projection, grad_raw, projection_grads);
  mlp_backward(encoder, cache.encoder, grad_latents, encoder_grads);
}

}  // namespace

double ModelParams::temperature() const { return std::exp(log_temperature); }

std::vector<double> featurize_text(const TextItem& item, std::size_t vocab_dim,
                                   std::uint64_t seed) {
  if (vocab_dim < 8) {
    throw InvalidDimsError("featurize_text: vocab_dim must be at least 8");
  }
  if (item.tokens.empty()) {
    throw EmptyTokenListError("featurize_text: caption '" + item.id + "' has no tokens");
  }
  std::vector<double> counts(vocab_dim, 0.0);
  const std::uint64_t base = fnv1a_append(kFnvOffset, seed);
  for (const std::string& token : item.tokens) {
    const std::uint64_t h = fnv1a(token, base);
    counts[h % vocab_dim] += 1.0;
  }
  // Token counts are nonnegative with at least one positive entry, so the
  // norm can never vanish.
  const double norm = l2_norm(counts);
  for (double& c : counts) c /= norm;
  return counts;
}

std::vector<double> featurize_audio(const AudioItem& item) { return item.features; }

Mat mlp_forward(const MlpParams& mlp, const Mat& input, MlpCache* cache) {
  check_mlp_chain(mlp, "mlp_forward");
  if (input.cols != mlp.input_dim()) {
    throw DimensionMismatchError("mlp_forward: input width does not match first layer");
  }
  Mat h = input;
  for (std::size_t l = 0; l < mlp.num_layers(); ++l) {
    if (cache) cache->inputs.push_back(h);
    Mat z = matmul_nt(h, mlp.weights[l]);
    for (std::size_t i = 0; i < z.rows; ++i) {
      for (std::size_t j = 0; j < z.cols; ++j) z(i, j) += mlp.biases[l][j];
    }
    if (cache) cache->pre_activations.push_back(z);
    const bool hidden = l + 1 < mlp.num_layers();
    if (hidden) {
      for (double& x : z.data) x = x > 0.0 ? x : 0.0;
    }
    h = std::move(z);
  }
  if (cache) cache->output = h;
  return h;
}

Mat mlp_backward(const MlpParams& mlp, const MlpCache& cache, const Mat& upstream,
                 MlpGrads& grads) {
  if (cache.inputs.size() != mlp.num_layers()) {
    throw StaleCacheError("mlp_backward: cache does not match layer stack");
  }
  if (grads.weights.size() != mlp.num_layers()) {
    grads = zero_like(mlp);
  }
  Mat grad_out = upstream;
  for (std::size_t l = mlp.num_layers(); l-- > 0;) {
    Mat grad_z = std::move(grad_out);
    const bool hidden = l + 1 < mlp.num_layers();
    if (hidden) {
      const Mat& z = cache.pre_activations[l];
      for (std::size_t i = 0; i < grad_z.data.size(); ++i) {
        if (z.data[i] <= 0.0) grad_z.data[i] = 0.0;
      }
    }
    const Mat& x = cache.inputs[l];
    const Mat dw = matmul_tn(grad_z, x);
    for (std::size_t i = 0; i < dw.data.size(); ++i) grads.weights[l].data[i] += dw.data[i];
    for (std::size_t j = 0; j < grad_z.cols; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < grad_z.rows; ++i) acc += grad_z(i, j);
      grads.biases[l][j] += acc;
    }
    grad_out = matmul(grad_z, mlp.weights[l]);
  }
  return grad_out;
}

TowerResult forward_text(const ModelParams& params, std::span<const TextItem> items) {
  return run_tower(params.text_encoder, params.text_projection,
                   featurize_text_batch(params, items), Modality::text);
}

TowerResult forward_audio(const ModelParams& params, std::span<const AudioItem> items) {
  return run_tower(params.audio_encoder, params.audio_projection,
                   featurize_audio_batch(params, items), Modality::audio);
}

EncodeResult encode_batch(const ModelParams& params, std::span<const TextItem> texts,
                          std::span<const AudioItem> audios) {
  if (texts.empty() || texts.size() != audios.size()) {
    throw LengthMismatchError("encode_batch: need equal, nonzero item counts");
  }
  EncodeResult result;
  TowerResult text = forward_text(params, texts);
  TowerResult audio = forward_audio(params, audios);
  result.text = std::move(text.embeddings);
  result.audio = std::move(audio.embeddings);
  result.cache.text = std::move(text.cache);
  result.cache.audio = std::move(audio.cache);
  result.cache.params_stamp = params_hash(params);
  result.cache.batch = texts.size();
  return result;
}

ParamGrads backward_batch(const ModelParams& params, const EncodeCache& cache,
                          const Mat& grad_text, const Mat& grad_audio) {
  if (cache.params_stamp != params_hash(params)) {
    throw StaleCacheError("backward_batch: cache was built from different parameters");
  }
  if (grad_text.rows != cache.batch || grad_audio.rows != cache.batch ||
      grad_text.cols != params.dims.embed_dim || grad_audio.cols != params.dims.embed_dim) {
    throw ShapeMismatchError("backward_batch: upstream gradient shape mismatch");
  }
  ParamGrads grads = zero_grads(params);
  tower_backward(params.text_encoder, params.text_projection, cache.text, grad_text,
                 grads.text_encoder, grads.text_projection);
  tower_backward(params.audio_encoder, params.audio_projection, cache.audio, grad_audio,
                 grads.audio_encoder, grads.audio_projection);
  return grads;
}

ModelParams init_params(const ModelDims& dims, std::uint64_t seed) {
  if (dims.text_vocab_dim < 8 || dims.audio_feature_dim == 0 || dims.text_latent_dim == 0 ||
      dims.audio_latent_dim == 0 || dims.projection_hidden_dim == 0 || dims.embed_dim == 0) {
    throw InvalidDimsError("init_params: every dimension must be positive (vocab >= 8)");
  }
  ModelParams params;
  params.dims = dims;
  Rng rng = Rng::fork(seed, 0xe2c0de);
  const std::size_t text_enc[] = {dims.text_vocab_dim, dims.text_latent_dim};
  const std::size_t audio_enc[] = {dims.audio_feature_dim, dims.audio_latent_dim};
  const std::size_t text_proj[] = {dims.text_latent_dim, dims.projection_hidden_dim,
                                   dims.embed_dim};
  const std::size_t audio_proj[] = {dims.audio_latent_dim, dims.projection_hidden_dim,
                                    dims.embed_dim};
  params.text_encoder = init_mlp(text_enc, rng);
  params.audio_encoder = init_mlp(audio_enc, rng);
  params.text_projection = init_mlp(text_proj, rng);
  params.audio_projection = init_mlp(audio_proj, rng);
  params.log_temperature = std::log(0.007);
  return params;
}

ParamGrads zero_grads(const ModelParams& params) {
  ParamGrads g;
  g.text_encoder = zero_like(params.text_encoder);
  g.audio_encoder = zero_like(params.audio_encoder);
  g.text_projection = zero_like(params.text_projection);
  g.audio_projection = zero_like(params.audio_projection);
  g.log_temperature = 0.0;
  return g;
}

std::uint64_t params_hash(const ModelParams& params) {
  std::uint64_t h = kFnvOffset;
  h = fnv1a_append(h, static_cast<std::uint64_t>(params.dims.text_vocab_dim));
  h = fnv1a_append(h, static_cast<std::uint64_t>(params.dims.audio_feature_dim));
  h = fnv1a_append(h, static_cast<std::uint64_t>(params.dims.text_latent_dim));
  h = fnv1a_append(h, static_cast<std::uint64_t>(params.dims.audio_latent_dim));
  h = fnv1a_append(h, static_cast<std::uint64_t>(params.dims.projection_hidden_dim));
  h = fnv1a_append(h, static_cast<std::uint64_t>(params.dims.embed_dim));
  h = fnv1a_append(h, params.dims.text_hash_seed);
  for (const MlpParams* mlp : {&params.text_encoder, &params.audio_encoder,
                               &params.text_projection, &params.audio_projection}) {
    for (std::size_t l = 0; l < mlp->num_layers(); ++l) {
      h = fnv1a_append(h, std::span<const double>(mlp->weights[l].data));
      h = fnv1a_append(h, std::span<const double>(mlp->biases[l]));
    }
  }
  h = fnv1a_append(h, params.log_temperature);
  return h;
}

std::vector<std::span<double>> param_spans(ModelParams& params) {
  std::vector<std::span<double>> spans;
  append_mlp_spans(params.text_encoder, spans);
  append_mlp_spans(params.audio_encoder, spans);
  append_mlp_spans(params.text_projection, spans);
  append_mlp_spans(params.audio_projection, spans);
  spans.emplace_back(&params.log_temperature, 1);
  return spans;
}

std::vector<std::span<double>> grad_spans(ParamGrads& grads) {
  std::vector<std::span<double>> spans;
  append_mlp_spans(grads.text_encoder, spans);
  append_mlp_spans(grads.audio_encoder, spans);
  append_mlp_spans(grads.text_projection, spans);
  append_mlp_spans(grads.audio_projection, spans);
  spans.emplace_back(&grads.log_temperature, 1);
  return spans;
}

std::vector<std::string> param_tensor_names(const ModelParams& params) {
  std::vector<std::string> names;
  append_mlp_names(params.text_encoder, "text_encoder", names);
  append_mlp_names(params.audio_encoder, "audio_encoder", names);
  append_mlp_names(params.text_projection, "text_projection", names);
  append_mlp_names(params.audio_projection, "audio_projection", names);
  names.emplace_back("log_temperature");
  return names;
}

std::size_t param_count(const ModelParams& params) {
  std::size_t n = 0;
  for (const auto& span : param_spans(const_cast<ModelParams&>(params))) n += span.size();
  return n;
}

std::vector<double> flatten_params(const ModelParams& params) {
  std::vector<double> flat;
  for (const auto& span : param_spans(const_cast<ModelParams&>(params))) {
    flat.insert(flat.end(), span.begin(), span.end());
  }
  return flat;
}

void unflatten_params(ModelParams& params, std::span<const double> values) {
  std::size_t offset = 0;
  for (auto span : param_spans(params)) {
    if (offset + span.size() > values.size()) {
      throw ShapeMismatchError("unflatten_params: value vector too short");
    }
    std::copy(values.begin() + static_cast<std::ptrdiff_t>(offset),
              values.begin() + static_cast<std::ptrdiff_t>(offset + span.size()),
              span.begin());
    offset += span.size();
  }
  if (offset != values.size()) {
    throw ShapeMismatchError("unflatten_params: value vector too long");
  }
}

}  // namespace xmodal
