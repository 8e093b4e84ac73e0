#pragma once

#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "vidrl/core.hpp"

namespace vidrl {

struct EmptyVideo : Error {
  EmptyVideo() : Error("cannot standardize a video with zero frames") {}
};
struct UnpairedSample : Error {
  explicit UnpairedSample(const std::string& id)
      : Error("sample " + id + " references a pair_id with no matching sample") {}
};
struct EmptySplit : Error {
  explicit EmptySplit(const std::string& which)
      : Error("split \"" + which + "\" has no samples") {}
};

struct DatagenConfig {
  int n_pairs = 100;
  int frame_count = 49;
  double fps = 8.0;
  int width = 720;
  int height = 480;
  int feature_dim = 16;
  double noise_base = 1.0;
  uint64_t seed = 1;
  bool quality_mode = false;  // emit one graded variant per grid step
  double test_fraction = 0.1;
  AnswerSpace space;

  void validate() const;
};

enum class Split { Train, Test };

struct Corpus {
  DatagenConfig cfg;
  std::vector<VideoSample> samples;
  std::vector<Split> splits;  // parallel to samples

  std::vector<int> train_indices() const;
  std::vector<int> test_indices() const;
  const VideoSample* find(const std::string& id) const;
  void rebuild_index();

 private:
  std::unordered_map<std::string, int> index_;
};

// Noise amplitude for a graded fake: noise_base * (1 - quality/100).
double fake_noise_amplitude(const AnswerSpace& space, int step, double noise_base);

// Smooth low-frequency per-channel trajectory plus small observation noise.
VideoSample gen_real(const DatagenConfig& cfg, std::mt19937_64& rng);

// Graded fake counterpart: shares the real sample's first frame and
// trajectory, adds step-dependent artifact noise and mild temporal jitter.
VideoSample gen_fake(const VideoSample& real, int step, const DatagenConfig& cfg,
                     std::mt19937_64& rng);

// Nearest-index temporal resampling to cfg.frame_count; resets metadata to
// the configured standard values.
VideoSample standardize_metadata(const VideoSample& sample, const DatagenConfig& cfg);

// Paired corpus: one fake per real (at the last grid step) in binary mode,
// one fake per grid step in quality mode. Deterministic pair-level 90/10
// split, stratified by label.
Corpus build_corpus(const DatagenConfig& cfg);

struct PreferenceSide {
  AnswerLabel answer;
  std::string transcript;
};

struct PreferencePair {
  std::string input_id;
  PreferenceSide preferred;
  PreferenceSide dispreferred;
};

// "<answer>real</answer>" etc.
std::string canonical_transcript(const AnswerLabel& label);

// Two pairs per real/fake couple: the real's perspective and the fake's,
// built by swapping the paired annotations.
std::vector<PreferencePair> build_preference_pairs(const Corpus& corpus);

}  // namespace vidrl
