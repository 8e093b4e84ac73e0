#include "vidrl/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "vidrl/rng.hpp"

namespace vidrl {

void DatagenConfig::validate() const {
  if (n_pairs < 1) throw Error("DatagenConfig: n_pairs must be >= 1");
  if (frame_count < 8) throw Error("DatagenConfig: frame_count must be >= 8");
  if (feature_dim < 1) throw Error("DatagenConfig: feature_dim must be >= 1");
  if (noise_base <= 0.0) throw Error("DatagenConfig: noise_base must be > 0");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw Error("DatagenConfig: test_fraction must be in (0,1)");
  space.validate();
}

std::vector<int> Corpus::train_indices() const {
  std::vector<int> idx;
  for (size_t i = 0; i < samples.size(); ++i)
    if (splits[i] == Split::Train) idx.push_back(static_cast<int>(i));
  return idx;
}

std::vector<int> Corpus::test_indices() const {
  std::vector<int> idx;
  for (size_t i = 0; i < samples.size(); ++i)
    if (splits[i] == Split::Test) idx.push_back(static_cast<int>(i));
  return idx;
}

void Corpus::rebuild_index() {
  index_.clear();
  for (size_t i = 0; i < samples.size(); ++i) index_[samples[i].id] = static_cast<int>(i);
}

const VideoSample* Corpus::find(const std::string& id) const {
  const auto it = index_.find(id);
  return it == index_.end() ? nullptr : &samples[it->second];
}

double fake_noise_amplitude(const AnswerSpace& space, int step, double noise_base) {
  const auto it = space.quality_labels.find(step);
  if (it == space.quality_labels.end())
    throw UnknownStep("fake_noise_amplitude: step " + std::to_string(step) +
                      " not in grid");
  return noise_base * (1.0 - it->second / 100.0);
}

namespace {

std::string pair_tag(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06d", index);
  return buf;
}

constexpr double kObservationNoise = 0.01;
constexpr double kJitterProb = 0.15;

}  // namespace

VideoSample gen_real(const DatagenConfig& cfg, std::mt19937_64& rng) {
  const int t_count = cfg.frame_count;
  const int channels = cfg.feature_dim;

  std::uniform_real_distribution<double> amp_main(0.5, 1.5);
  std::uniform_real_distribution<double> amp_second(0.2, 0.6);
  std::uniform_real_distribution<double> freq_main(0.5, 1.5);
  std::uniform_real_distribution<double> freq_second(1.5, 3.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> offset(-1.0, 1.0);
  std::normal_distribution<double> obs_noise(0.0, kObservationNoise);

  struct Channel {
    double a1, f1, p1, a2, f2, p2, base;
  };
  std::vector<Channel> chans(channels);
  for (Channel& c : chans)
    c = {amp_main(rng),  freq_main(rng),   phase(rng), amp_second(rng),
         freq_second(rng), phase(rng),     offset(rng)};

  VideoSample sample;
  sample.frames.resize(t_count, Frame(channels));
  for (int t = 0; t < t_count; ++t) {
    const double u = static_cast<double>(t) / static_cast<double>(t_count);
    for (int c = 0; c < channels; ++c) {
      const Channel& ch = chans[c];
      sample.frames[t][c] = ch.base +
                            ch.a1 * std::sin(2.0 * std::numbers::pi * ch.f1 * u + ch.p1) +
                            ch.a2 * std::sin(2.0 * std::numbers::pi * ch.f2 * u + ch.p2) +
                            obs_noise(rng);
    }
  }
  sample.meta = Meta{cfg.frame_count, cfg.fps, cfg.width, cfg.height};
  sample.truth = AnswerLabel::real();
  return sample;
}

VideoSample gen_fake(const VideoSample& real, int step, const DatagenConfig& cfg,
                     std::mt19937_64& rng) {
  const double amplitude = fake_noise_amplitude(cfg.space, step, cfg.noise_base);
  const int t_count = static_cast<int>(real.frames.size());

  std::normal_distribution<double> artifact_noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> direction(0, 1);

  VideoSample fake;
  fake.frames.resize(t_count);
  fake.frames[0] = real.frames[0];  // first-frame conditioning
  for (int t = 1; t < t_count; ++t) {
    int src = t;
    if (unit(rng) < kJitterProb) {
      src = std::clamp(t + (direction(rng) == 0 ? -1 : 1), 1, t_count - 1);
    }
    Frame frame = real.frames[src];
    for (double& v : frame) v += amplitude * artifact_noise(rng);
    fake.frames[t] = std::move(frame);
  }
  fake.meta = real.meta;
  fake.truth = AnswerLabel::fake_step(step);
  fake.pair_id = real.id;
  return fake;
}

VideoSample standardize_metadata(const VideoSample& sample, const DatagenConfig& cfg) {
  if (sample.frames.empty()) throw EmptyVideo();
  const size_t n_in = sample.frames.size();
  const size_t n_out = static_cast<size_t>(cfg.frame_count);

  VideoSample out = sample;
  if (n_in != n_out) {
    std::vector<Frame> frames(n_out);
    for (size_t t = 0; t < n_out; ++t) frames[t] = sample.frames[t * n_in / n_out];
    out.frames = std::move(frames);
  }
  out.meta = Meta{cfg.frame_count, cfg.fps, cfg.width, cfg.height};
  return out;
}

Corpus build_corpus(const DatagenConfig& cfg) {
  cfg.validate();
  Corpus corpus;
  corpus.cfg = cfg;

  // Pair-level split keeps each label's samples at exactly the configured
  // train/test ratio and keeps contextual pairs within one split.
  const int stride = std::max(2, static_cast<int>(std::llround(1.0 / cfg.test_fraction)));

  const std::vector<int> fake_steps =
      cfg.quality_mode ? cfg.space.step_grid
                       : std::vector<int>{cfg.space.step_grid.back()};

  for (int i = 0; i < cfg.n_pairs; ++i) {
    const Split split = (i % stride == 0) ? Split::Test : Split::Train;

    std::mt19937_64 real_rng = make_stream(cfg.seed, {static_cast<uint64_t>(i), 0});
    VideoSample real = gen_real(cfg, real_rng);
    real.id = "real-" + pair_tag(i);
    real.pair_id = "";
    corpus.samples.push_back(real);
    corpus.splits.push_back(split);

    for (size_t v = 0; v < fake_steps.size(); ++v) {
      const int step = fake_steps[v];
      std::mt19937_64 fake_rng =
          make_stream(cfg.seed, {static_cast<uint64_t>(i), 1 + static_cast<uint64_t>(v)});
      VideoSample fake = gen_fake(real, step, cfg, fake_rng);
      if (cfg.quality_mode) {
        fake.id = "fake-" + pair_tag(i) + "-s" + std::to_string(step);
      } else {
        fake.id = "fake-" + pair_tag(i);
        fake.truth = AnswerLabel::fake();  // plain binary task
      }
      corpus.samples.push_back(std::move(fake));
      corpus.splits.push_back(split);
    }
  }
  corpus.rebuild_index();
  return corpus;
}

std::string canonical_transcript(const AnswerLabel& label) {
  return "<answer>" + to_string(label) + "</answer>";
}

std::vector<PreferencePair> build_preference_pairs(const Corpus& corpus) {
  std::vector<PreferencePair> pairs;
  for (const VideoSample& sample : corpus.samples) {
    if (sample.truth.kind != Kind::Fake) continue;
    const VideoSample* real = corpus.find(sample.pair_id);
    if (real == nullptr) throw UnpairedSample(sample.id);

    const PreferenceSide real_side{real->truth, canonical_transcript(real->truth)};
    const PreferenceSide fake_side{sample.truth, canonical_transcript(sample.truth)};

    // The real video prefers its own annotation over the paired fake's, and
    // symmetrically for the fake video.
    pairs.push_back({real->id, real_side, fake_side});
    pairs.push_back({sample.id, fake_side, real_side});
  }
  return pairs;
}

}  // namespace vidrl
