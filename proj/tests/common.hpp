#pragma once

// Shared test utilities: finite-difference gradient oracle and small
// generators for samples, features, and parameters.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "vidrl/core.hpp"
#include "vidrl/policy.hpp"

namespace vidrl::testing {

// Central finite differences of a scalar function of the flat parameter
// vector. Independent of every analytic gradient path it checks.
inline std::vector<double> fd_gradient(
    const std::function<double(const PolicyParams&)>& f, const PolicyParams& at,
    double h = 1e-6) {
  const std::vector<double> flat = at.flatten();
  std::vector<double> grad(flat.size());
  for (size_t i = 0; i < flat.size(); ++i) {
    std::vector<double> hi = flat, lo = flat;
    const double step = h * std::max(1.0, std::abs(flat[i]));
    hi[i] += step;
    lo[i] -= step;
    const double f_hi = f(PolicyParams::unflatten(at.num_classes, at.feature_dim, hi));
    const double f_lo = f(PolicyParams::unflatten(at.num_classes, at.feature_dim, lo));
    grad[i] = (f_hi - f_lo) / (2.0 * step);
  }
  return grad;
}

inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, norm = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    norm += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max(std::sqrt(norm), 1e-12);
}

inline PolicyParams random_params(int num_classes, std::mt19937_64& rng,
                                  double scale = 1.0) {
  PolicyParams p = PolicyParams::zeros(num_classes);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (double& w : p.weights) w = u(rng);
  for (double& b : p.bias) b = u(rng);
  for (double& l : p.length_logits) l = u(rng);
  return p;
}

inline FeatureVector random_features(std::mt19937_64& rng, double scale = 1.0) {
  FeatureVector f;
  f.values.resize(kFeatureDim);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (double& v : f.values) v = u(rng);
  return f;
}

// A deterministic sample whose frames follow per-channel sine trajectories.
inline VideoSample sine_sample(int frame_count = 49, int channels = 4,
                               double phase = 0.0) {
  VideoSample sample;
  sample.id = "test";
  sample.frames.resize(frame_count, Frame(channels));
  for (int t = 0; t < frame_count; ++t)
    for (int c = 0; c < channels; ++c)
      sample.frames[t][c] =
          std::sin(0.13 * t + 0.7 * c + phase) + 0.2 * std::cos(0.41 * t + c);
  sample.meta.frame_count = frame_count;
  sample.truth = AnswerLabel::real();
  return sample;
}

inline VideoSample noise_sample(int frame_count, int channels, std::mt19937_64& rng) {
  VideoSample sample;
  sample.id = "noise";
  sample.frames.resize(frame_count, Frame(channels));
  std::normal_distribution<double> n(0.0, 1.0);
  for (auto& frame : sample.frames)
    for (double& v : frame) v = n(rng);
  sample.meta.frame_count = frame_count;
  sample.truth = AnswerLabel::real();
  return sample;
}

}  // namespace vidrl::testing
