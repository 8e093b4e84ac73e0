#include "vidrl/artifacts.hpp"

#include <algorithm>
#include <cmath>

namespace vidrl {

void ArtifactConfig::validate() const {
  if (p_repeat < 0.0 || p_repeat > 1.0)
    throw Error("ArtifactConfig: p_repeat must be in [0,1]");
  if (!(0.0 < len_min_frac && len_min_frac <= len_max_frac && len_max_frac < 0.5))
    throw Error("ArtifactConfig: need 0 < len_min_frac <= len_max_frac < 0.5");
  if (center_std_frac <= 0.0)
    throw Error("ArtifactConfig: center_std_frac must be positive");
}

Window sample_window(int frame_count, const ArtifactConfig& cfg, std::mt19937_64& rng,
                     ArtifactKind kind) {
  cfg.validate();
  if (frame_count < 8) throw TooShort(frame_count);
  const double t = static_cast<double>(frame_count);

  std::uniform_real_distribution<double> len_dist(cfg.len_min_frac * t,
                                                  cfg.len_max_frac * t);
  int len = static_cast<int>(std::llround(len_dist(rng)));
  len = std::max(len, 2);

  std::normal_distribution<double> center_dist(cfg.center_mean_frac * t,
                                               cfg.center_std_frac * t);
  const double center = center_dist(rng);

  // Clamp, never resample: keeps the draw count per window fixed.
  int start = static_cast<int>(std::llround(center - len / 2.0));
  const int max_start =
      kind == ArtifactKind::RepeatSegment ? frame_count - 2 * len : frame_count - len;
  start = std::clamp(start, 0, max_start);
  return {start, len};
}

namespace {

void check_window(size_t frame_count, const Window& w, bool repeat) {
  if (w.start < 0 || w.len <= 0)
    throw InvalidWindow("window has negative start or non-positive length");
  const size_t span = repeat ? static_cast<size_t>(w.len) * 2 : static_cast<size_t>(w.len);
  if (static_cast<size_t>(w.start) + span > frame_count)
    throw InvalidWindow("window [" + std::to_string(w.start) + ", +" +
                        std::to_string(w.len) + ") exceeds " +
                        std::to_string(frame_count) + " frames");
}

}  // namespace

std::vector<Frame> inject_reverse(const std::vector<Frame>& frames, const Window& window) {
  check_window(frames.size(), window, /*repeat=*/false);
  std::vector<Frame> out = frames;
  std::reverse(out.begin() + window.start, out.begin() + window.start + window.len);
  return out;
}

std::vector<Frame> inject_repeat(const std::vector<Frame>& frames, const Window& window) {
  check_window(frames.size(), window, /*repeat=*/true);
  std::vector<Frame> out = frames;
  std::copy(frames.begin() + window.start, frames.begin() + window.start + window.len,
            out.begin() + window.start + window.len);
  return out;
}

VideoSample inject(const VideoSample& sample, const ArtifactConfig& cfg,
                   std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const ArtifactKind kind = coin(rng) < cfg.p_repeat ? ArtifactKind::RepeatSegment
                                                     : ArtifactKind::ReverseSegment;
  const Window window = sample_window(sample.meta.frame_count, cfg, rng, kind);

  VideoSample out = sample;
  out.frames = kind == ArtifactKind::RepeatSegment ? inject_repeat(sample.frames, window)
                                                   : inject_reverse(sample.frames, window);
  // Manipulated videos are fake regardless of the source label.
  out.truth = AnswerLabel::fake();
  out.artifact = ArtifactRecord{kind, window.start, window.len, sample.truth};
  return out;
}

}  // namespace vidrl
