#include "vidrl/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vidrl {

// ----------------------------------------------------------------------------
// Features

namespace {

double frame_distance(const Frame& a, const Frame& b) {
  double sum = 0.0;
  for (size_t c = 0; c < a.size(); ++c) {
    const double d = a[c] - b[c];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(a.size()));
}

double mean(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs, double m) {
  double sum = 0.0;
  for (double x : xs) sum += (x - m) * (x - m);
  return sum / static_cast<double>(xs.size());
}

constexpr double kDegenerate = 1e-24;

}  // namespace

FeatureVector featurize(const VideoSample& sample) {
  const std::vector<Frame>& frames = sample.frames;
  const size_t t = frames.size();
  if (t < 3) throw TooFewFrames(t);
  const size_t channels = frames.front().size();

  // Adjacent-frame distance series (per-channel RMS).
  std::vector<double> dist(t - 1);
  for (size_t i = 0; i + 1 < t; ++i) dist[i] = frame_distance(frames[i], frames[i + 1]);
  const double dist_mean = mean(dist);
  const double dist_var = variance(dist, dist_mean);

  // Lag-2 autocorrelation of the distance series.
  double autocorr2 = 0.0;
  if (dist_var * static_cast<double>(dist.size()) > kDegenerate && dist.size() > 2) {
    double num = 0.0, den = 0.0;
    for (double d : dist) den += (d - dist_mean) * (d - dist_mean);
    for (size_t i = 0; i + 2 < dist.size(); ++i)
      num += (dist[i] - dist_mean) * (dist[i + 2] - dist_mean);
    autocorr2 = num / den;
  }

  // High-frequency energy: mean squared second difference.
  double hf = 0.0;
  for (size_t i = 1; i + 1 < t; ++i)
    for (size_t c = 0; c < channels; ++c) {
      const double d2 = frames[i + 1][c] - 2.0 * frames[i][c] + frames[i - 1][c];
      hf += d2 * d2;
    }
  hf /= static_cast<double>((t - 2) * channels);

  // Segment-duplication score: max over lags of mean frame-pair similarity.
  double dup = 0.0;
  for (size_t lag = 2; lag <= t / 2; ++lag) {
    double acc = 0.0;
    for (size_t i = 0; i + lag < t; ++i) acc += frame_distance(frames[i], frames[i + lag]);
    acc /= static_cast<double>(t - lag);
    dup = std::max(dup, 1.0 / (1.0 + acc));
  }

  // Reversal-symmetry score: correlation of the distance series with its reverse.
  double rev = 0.0;
  if (dist_var * static_cast<double>(dist.size()) > kDegenerate) {
    double num = 0.0, den = 0.0;
    const size_t n = dist.size();
    for (size_t i = 0; i < n; ++i) {
      num += (dist[i] - dist_mean) * (dist[n - 1 - i] - dist_mean);
      den += (dist[i] - dist_mean) * (dist[i] - dist_mean);
    }
    rev = num / den;
  }

  return FeatureVector{{dist_mean, dist_var, autocorr2, hf, dup, rev}};
}

// ----------------------------------------------------------------------------
// Codec

AnswerCodec AnswerCodec::binary() { return AnswerCodec(false, AnswerSpace{}); }

AnswerCodec AnswerCodec::quality(AnswerSpace space) {
  space.validate();
  return AnswerCodec(true, std::move(space));
}

int AnswerCodec::index_of(const AnswerLabel& label) const {
  if (label.kind == Kind::Real) return 0;
  if (!quality_mode_) return 1;
  if (!label.step)
    throw UnknownStep("quality codec: fake label carries no step");
  for (size_t i = 0; i < space_.step_grid.size(); ++i)
    if (space_.step_grid[i] == *label.step) return static_cast<int>(i) + 1;
  throw UnknownStep("quality codec: step " + std::to_string(*label.step) +
                    " not in grid");
}

AnswerLabel AnswerCodec::label_of(int index) const {
  if (index == 0) return AnswerLabel::real();
  if (!quality_mode_) {
    if (index == 1) return AnswerLabel::fake();
    throw ShapeMismatch("binary codec: class index out of range");
  }
  if (index < 1 || index > static_cast<int>(space_.step_grid.size()))
    throw ShapeMismatch("quality codec: class index out of range");
  return AnswerLabel::fake_step(space_.step_grid[index - 1]);
}

// ----------------------------------------------------------------------------
// Parameters

PolicyParams PolicyParams::zeros(int num_classes, int feature_dim) {
  PolicyParams p;
  p.num_classes = num_classes;
  p.feature_dim = feature_dim;
  p.weights.assign(static_cast<size_t>(num_classes) * feature_dim, 0.0);
  p.bias.assign(num_classes, 0.0);
  p.length_logits = {0.0, 0.0, 0.0};
  return p;
}

std::vector<double> PolicyParams::flatten() const {
  std::vector<double> flat;
  flat.reserve(size());
  flat.insert(flat.end(), weights.begin(), weights.end());
  flat.insert(flat.end(), bias.begin(), bias.end());
  flat.insert(flat.end(), length_logits.begin(), length_logits.end());
  return flat;
}

PolicyParams PolicyParams::unflatten(int num_classes, int feature_dim,
                                     std::span<const double> flat) {
  PolicyParams p = zeros(num_classes, feature_dim);
  if (flat.size() != p.size())
    throw ShapeMismatch("unflatten: expected " + std::to_string(p.size()) +
                        " values, got " + std::to_string(flat.size()));
  size_t k = 0;
  for (double& w : p.weights) w = flat[k++];
  for (double& b : p.bias) b = flat[k++];
  for (double& l : p.length_logits) l = flat[k++];
  return p;
}

void PolicyParams::check_shape(int expected_classes, int expected_features) const {
  if (num_classes != expected_classes || feature_dim != expected_features ||
      weights.size() != static_cast<size_t>(num_classes) * feature_dim ||
      bias.size() != static_cast<size_t>(num_classes))
    throw ShapeMismatch("policy parameter shape mismatch");
}

PolicyParams snapshot(const PolicyParams& params) { return params; }

// ----------------------------------------------------------------------------
// Toy policy

std::vector<double> log_softmax(std::span<const double> logits) {
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - max_logit);
  const double log_z = max_logit + std::log(sum);
  std::vector<double> out(logits.size());
  for (size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - log_z;
  return out;
}

std::vector<double> ToyPolicy::answer_log_probs(const PolicyParams& params,
                                                const FeatureVector& features) const {
  params.check_shape(codec_.num_classes(), static_cast<int>(features.values.size()));
  std::vector<double> logits(params.num_classes);
  for (int k = 0; k < params.num_classes; ++k) {
    double z = params.bias[k];
    const double* row = &params.weights[static_cast<size_t>(k) * params.feature_dim];
    for (int f = 0; f < params.feature_dim; ++f) z += row[f] * features.values[f];
    logits[k] = z;
  }
  return log_softmax(logits);
}

std::array<double, kNumBuckets> ToyPolicy::length_log_probs(
    const PolicyParams& params) const {
  const std::vector<double> lp =
      log_softmax(std::span<const double>(params.length_logits));
  return {lp[0], lp[1], lp[2]};
}

double ToyPolicy::logprob(const PolicyParams& params, const FeatureVector& features,
                          const Response& response) const {
  const int cls = codec_.index_of(response.answer);
  const std::vector<double> alp = answer_log_probs(params, features);
  const std::array<double, kNumBuckets> llp = length_log_probs(params);
  return alp[cls] + llp[static_cast<int>(response.bucket)];
}

ParamGrad ToyPolicy::grad_logprob(const PolicyParams& params,
                                  const FeatureVector& features,
                                  const Response& response) const {
  const int cls = codec_.index_of(response.answer);
  const std::vector<double> alp = answer_log_probs(params, features);
  const std::array<double, kNumBuckets> llp = length_log_probs(params);

  // d/dlogits log softmax[k] = e_k - p for both heads.
  ParamGrad grad = PolicyParams::zeros(params.num_classes, params.feature_dim);
  for (int k = 0; k < params.num_classes; ++k) {
    const double coeff = (k == cls ? 1.0 : 0.0) - std::exp(alp[k]);
    grad.bias[k] = coeff;
    double* row = &grad.weights[static_cast<size_t>(k) * params.feature_dim];
    for (int f = 0; f < params.feature_dim; ++f) row[f] = coeff * features.values[f];
  }
  const int bucket = static_cast<int>(response.bucket);
  for (int b = 0; b < kNumBuckets; ++b)
    grad.length_logits[b] = (b == bucket ? 1.0 : 0.0) - std::exp(llp[b]);
  return grad;
}

namespace {

int sample_index(std::span<const double> log_probs, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  double cum = 0.0;
  for (size_t i = 0; i < log_probs.size(); ++i) {
    cum += std::exp(log_probs[i]);
    if (u < cum) return static_cast<int>(i);
  }
  return static_cast<int>(log_probs.size()) - 1;
}

}  // namespace

std::vector<Response> ToyPolicy::sample_group(const PolicyParams& params,
                                              const FeatureVector& features, int g,
                                              std::mt19937_64& rng) const {
  const std::vector<double> alp = answer_log_probs(params, features);
  const std::array<double, kNumBuckets> llp = length_log_probs(params);

  std::vector<Response> responses;
  responses.reserve(g);
  for (int i = 0; i < g; ++i) {
    const int cls = sample_index(alp, rng);
    const int bucket = sample_index(std::span<const double>(llp), rng);
    Response r;
    r.answer = codec_.label_of(cls);
    r.bucket = static_cast<LengthBucket>(bucket);
    r.length = representative_length(r.bucket);
    r.logprob = alp[cls] + llp[bucket];
    responses.push_back(std::move(r));
  }
  return responses;
}

std::vector<Response> ToyPolicy::enumerate_responses(
    const PolicyParams& params, const FeatureVector& features) const {
  const std::vector<double> alp = answer_log_probs(params, features);
  const std::array<double, kNumBuckets> llp = length_log_probs(params);

  std::vector<Response> responses;
  responses.reserve(static_cast<size_t>(params.num_classes) * kNumBuckets);
  for (int k = 0; k < params.num_classes; ++k)
    for (int b = 0; b < kNumBuckets; ++b) {
      Response r;
      r.answer = codec_.label_of(k);
      r.bucket = static_cast<LengthBucket>(b);
      r.length = representative_length(r.bucket);
      r.logprob = alp[k] + llp[b];
      responses.push_back(std::move(r));
    }
  return responses;
}

AnswerLabel ToyPolicy::greedy_answer(const PolicyParams& params,
                                     const FeatureVector& features) const {
  const std::vector<double> alp = answer_log_probs(params, features);
  const auto it = std::max_element(alp.begin(), alp.end());
  return codec_.label_of(static_cast<int>(it - alp.begin()));
}

double ToyPolicy::kl_exact(const PolicyParams& theta, const PolicyParams& ref,
                           const FeatureVector& features) const {
  const std::vector<double> at = answer_log_probs(theta, features);
  const std::vector<double> ar = answer_log_probs(ref, features);
  const std::array<double, kNumBuckets> lt = length_log_probs(theta);
  const std::array<double, kNumBuckets> lr = length_log_probs(ref);

  // Joint KL factors over the independent heads.
  double kl = 0.0;
  for (size_t k = 0; k < at.size(); ++k) kl += std::exp(at[k]) * (at[k] - ar[k]);
  for (int b = 0; b < kNumBuckets; ++b) kl += std::exp(lt[b]) * (lt[b] - lr[b]);
  return kl;
}

ParamGrad ToyPolicy::kl_exact_grad(const PolicyParams& theta, const PolicyParams& ref,
                                   const FeatureVector& features) const {
  const std::vector<double> at = answer_log_probs(theta, features);
  const std::vector<double> ar = answer_log_probs(ref, features);
  const std::array<double, kNumBuckets> lt = length_log_probs(theta);
  const std::array<double, kNumBuckets> lr = length_log_probs(ref);

  // dKL/dz_k = p_k * (d_k - sum_j p_j d_j) with d = log p_theta - log p_ref;
  // the score-mean term drops because sum_k dp_k = 0.
  ParamGrad grad = PolicyParams::zeros(theta.num_classes, theta.feature_dim);

  double expected_diff = 0.0;
  for (size_t k = 0; k < at.size(); ++k) expected_diff += std::exp(at[k]) * (at[k] - ar[k]);
  for (int k = 0; k < theta.num_classes; ++k) {
    const double coeff = std::exp(at[k]) * ((at[k] - ar[k]) - expected_diff);
    grad.bias[k] = coeff;
    double* row = &grad.weights[static_cast<size_t>(k) * theta.feature_dim];
    for (int f = 0; f < theta.feature_dim; ++f) row[f] = coeff * features.values[f];
  }

  double expected_len_diff = 0.0;
  for (int b = 0; b < kNumBuckets; ++b) expected_len_diff += std::exp(lt[b]) * (lt[b] - lr[b]);
  for (int b = 0; b < kNumBuckets; ++b)
    grad.length_logits[b] = std::exp(lt[b]) * ((lt[b] - lr[b]) - expected_len_diff);
  return grad;
}

}  // namespace vidrl
