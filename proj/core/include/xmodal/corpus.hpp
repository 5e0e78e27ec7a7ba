#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "xmodal/encoders.hpp"
#include "xmodal/items.hpp"

namespace xmodal {

// Controls for the synthetic two-modality corpus. Audio features of a class
// scatter around a unit-sphere prototype; captions sample from a per-class
// vocabulary plus shared filler tokens, so text similarity tracks class
// identity with tunable noise.
struct SyntheticCorpusSpec {
  std::size_t num_classes = 10;
  std::size_t items_per_class = 270;
  std::size_t feature_dim = 64;
  double noise_scale = 0.4;

  std::size_t tokens_per_class = 6;
  double vocab_overlap = 0.0;  // fraction of each class vocabulary shared across classes
  std::size_t caption_length = 5;
  double filler_ratio = 0.25;  // chance a caption token comes from the filler pool
  std::size_t filler_vocab = 24;

  std::uint64_t seed = 1;

  // Per-class split fractions; must sum to 1.
  double teacher_fraction = 50.0 / 270.0;
  double wild_fraction = 200.0 / 270.0;
  double eval_fraction = 20.0 / 270.0;
};

struct PairedExample {
  AudioItem audio;
  TextItem text;
  int class_index = -1;
};

struct Corpus {
  SyntheticCorpusSpec spec;
  std::vector<std::string> class_names;
  std::vector<PairedExample> training;  // captioned pairs for teacher training
  std::vector<LabeledAudio> wild;       // uncaptioned pool; class kept for bookkeeping only
  std::vector<LabeledAudio> eval;       // held-out labeled audio
};

Corpus generate(const SyntheticCorpusSpec& spec);

// Strips classes off the wild pool; the only path from a corpus into
// curation.
std::vector<AudioItem> wild_audio_items(const Corpus& corpus);

std::vector<TrainPair> training_pairs(const Corpus& corpus);

// JSON-lines persistence. One header line with a format_version, then one
// record per item. Round trips are lossless.
void save_corpus(const std::filesystem::path& path, const Corpus& corpus);
Corpus load_corpus(const std::filesystem::path& path);

// Normalized teacher embeddings persisted as raw doubles plus a JSON
// sidecar keyed by item ids and the teacher parameter hash. A hash or id
// mismatch forces recomputation; stale entries are never reused.
struct CachedEmbeddings {
  Mat embeddings;
  bool cache_hit = false;
};

CachedEmbeddings cached_text_embeddings(const std::filesystem::path& base,
                                        const ModelParams& teacher,
                                        const std::vector<TextItem>& items);
CachedEmbeddings cached_audio_embeddings(const std::filesystem::path& base,
                                         const ModelParams& teacher,
                                         const std::vector<AudioItem>& items);

// Low-level cache file access (base.bin + base.json). read throws
// StaleCacheError when the stored teacher hash differs from expected_hash.
void write_embedding_cache(const std::filesystem::path& base, const std::string& teacher_hash,
                           const std::vector<std::string>& ids, const Mat& embeddings);
struct EmbeddingCacheContents {
  std::vector<std::string> ids;
  Mat embeddings;
};
EmbeddingCacheContents read_embedding_cache(const std::filesystem::path& base,
                                            const std::string& expected_hash);

}  // namespace xmodal
