#pragma once

#include <array>
#include <random>
#include <span>
#include <vector>

#include "vidrl/core.hpp"

namespace vidrl {

struct ShapeMismatch : Error {
  explicit ShapeMismatch(const std::string& msg) : Error(msg) {}
};
struct TooFewFrames : Error {
  explicit TooFewFrames(size_t n)
      : Error("featurize needs >= 3 frames, got " + std::to_string(n)) {}
};

// ----------------------------------------------------------------------------
// Features

inline constexpr int kFeatureDim = 6;

// Temporal summary statistics of a frame sequence:
//   [0] mean adjacent-frame distance
//   [1] variance of adjacent-frame distance
//   [2] lag-2 autocorrelation of the adjacent-distance series
//   [3] high-frequency energy (mean squared second difference)
//   [4] segment-duplication score (max over lags of mean frame-pair similarity)
//   [5] reversal-symmetry score (correlation of the delta sequence with its reverse)
struct FeatureVector {
  std::vector<double> values;
};

FeatureVector featurize(const VideoSample& sample);

// ----------------------------------------------------------------------------
// Answer codec: maps labels onto softmax classes

// Binary mode: {real, fake}. Quality mode: {real} followed by fake-s per grid step.
class AnswerCodec {
 public:
  static AnswerCodec binary();
  static AnswerCodec quality(AnswerSpace space);

  int num_classes() const { return quality_mode_ ? 1 + static_cast<int>(space_.step_grid.size()) : 2; }
  bool quality_mode() const { return quality_mode_; }
  const AnswerSpace& space() const { return space_; }

  int index_of(const AnswerLabel& label) const;
  AnswerLabel label_of(int index) const;

 private:
  AnswerCodec(bool quality_mode, AnswerSpace space)
      : quality_mode_(quality_mode), space_(std::move(space)) {}

  bool quality_mode_ = false;
  AnswerSpace space_;
};

// ----------------------------------------------------------------------------
// Parameters

inline constexpr int kNumBuckets = 3;

// Flat parameters of the toy policy: a linear-softmax answer head over the
// features and an input-independent length head. Also used as the gradient
// container (same shapes).
struct PolicyParams {
  int num_classes = 2;
  int feature_dim = kFeatureDim;
  std::vector<double> weights;  // num_classes x feature_dim, row-major
  std::vector<double> bias;     // num_classes
  std::array<double, kNumBuckets> length_logits{0.0, 0.0, 0.0};

  static PolicyParams zeros(int num_classes, int feature_dim = kFeatureDim);

  size_t size() const { return weights.size() + bias.size() + kNumBuckets; }
  std::vector<double> flatten() const;
  static PolicyParams unflatten(int num_classes, int feature_dim,
                                std::span<const double> flat);
  void check_shape(int expected_classes, int expected_features) const;
};

using ParamGrad = PolicyParams;

// Deep immutable copy used as the reference policy (value semantics make the
// copy itself trivial; the name records the contract).
PolicyParams snapshot(const PolicyParams& params);

// ----------------------------------------------------------------------------
// Toy policy

// Two independent softmax heads over an enumerable response space of
// num_classes x 3 outcomes. All operations are pure; parameters are explicit.
class ToyPolicy {
 public:
  explicit ToyPolicy(AnswerCodec codec) : codec_(std::move(codec)) {}

  const AnswerCodec& codec() const { return codec_; }

  std::vector<double> answer_log_probs(const PolicyParams& params,
                                       const FeatureVector& features) const;
  std::array<double, kNumBuckets> length_log_probs(const PolicyParams& params) const;

  double logprob(const PolicyParams& params, const FeatureVector& features,
                 const Response& response) const;
  ParamGrad grad_logprob(const PolicyParams& params, const FeatureVector& features,
                         const Response& response) const;

  std::vector<Response> sample_group(const PolicyParams& params,
                                     const FeatureVector& features, int g,
                                     std::mt19937_64& rng) const;

  // All num_classes*3 responses with their logprobs under params.
  std::vector<Response> enumerate_responses(const PolicyParams& params,
                                            const FeatureVector& features) const;

  AnswerLabel greedy_answer(const PolicyParams& params,
                            const FeatureVector& features) const;

  // Exact KL(theta || ref) for one input, via the factored heads.
  double kl_exact(const PolicyParams& theta, const PolicyParams& ref,
                  const FeatureVector& features) const;
  // Gradient of the exact KL with respect to theta.
  ParamGrad kl_exact_grad(const PolicyParams& theta, const PolicyParams& ref,
                          const FeatureVector& features) const;

 private:
  AnswerCodec codec_;
};

// log softmax over arbitrary logits; numerically stabilized.
std::vector<double> log_softmax(std::span<const double> logits);

}  // namespace vidrl
