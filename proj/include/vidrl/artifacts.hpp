#pragma once

#include <random>
#include <span>
#include <vector>

#include "vidrl/core.hpp"

namespace vidrl {

struct TooShort : Error {
  explicit TooShort(int frame_count)
      : Error("video too short for artifact injection: " + std::to_string(frame_count) +
              " frames") {}
};
struct InvalidWindow : Error {
  explicit InvalidWindow(const std::string& msg) : Error(msg) {}
};

// Placement distribution for the injected window. The manipulation site is
// drawn from a Gaussian over the timeline; the window length is uniform in
// a fraction band of the clip length.
struct ArtifactConfig {
  double p_repeat = 0.5;  // else reverse
  double center_mean_frac = 0.5;
  double center_std_frac = 0.25;
  double len_min_frac = 0.125;
  double len_max_frac = 0.25;

  void validate() const;
};

struct Window {
  int start = 0;
  int len = 0;
};

// Draws a window: length uniform in [len_min_frac*T, len_max_frac*T] rounded
// (>= 2), center from Normal(center_mean_frac*T, center_std_frac*T), then
// clamped to valid bounds. A repeat window additionally satisfies
// start + 2*len <= T so the overwritten copy fits.
Window sample_window(int frame_count, const ArtifactConfig& cfg, std::mt19937_64& rng,
                     ArtifactKind kind = ArtifactKind::ReverseSegment);

// Frames inside the window reversed in place; everything else untouched.
std::vector<Frame> inject_reverse(const std::vector<Frame>& frames, const Window& window);

// The window is copied over the immediately following window.len frames
// (overwrite, not insertion), preserving total frame count.
std::vector<Frame> inject_repeat(const std::vector<Frame>& frames, const Window& window);

// Chooses repeat with probability p_repeat else reverse, samples a window,
// applies it, relabels the sample as fake, and records the manipulation.
VideoSample inject(const VideoSample& sample, const ArtifactConfig& cfg,
                   std::mt19937_64& rng);

}  // namespace vidrl
