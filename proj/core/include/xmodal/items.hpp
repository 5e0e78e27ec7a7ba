#pragma once

#include <string>
#include <vector>

namespace xmodal {

// A caption: whitespace-split tokens plus a stable id.
struct TextItem {
  std::string id;
  std::vector<std::string> tokens;
};

// A synthetic audio clip, already reduced to a fixed-length feature vector.
struct AudioItem {
  std::string id;
  std::vector<double> features;
};

// One aligned (audio, caption) training example.
struct TrainPair {
  AudioItem audio;
  TextItem text;
};

// Audio with a ground-truth class index, used for evaluation only. Curation
// interfaces accept plain AudioItem, so the label cannot leak into them.
struct LabeledAudio {
  AudioItem audio;
  int class_index = -1;
};

}  // namespace xmodal
