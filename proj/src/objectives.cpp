#include "vidrl/objectives.hpp"

#include <algorithm>
#include <cmath>

namespace vidrl {

void ObjectiveConfig::validate() const {
  if (!(clip_eps > 0.0 && clip_eps < 1.0))
    throw Error("ObjectiveConfig: clip_eps must be in (0,1)");
  if (beta_kl < 0.0) throw Error("ObjectiveConfig: beta_kl must be >= 0");
  if (sigma_floor <= 0.0) throw Error("ObjectiveConfig: sigma_floor must be > 0");
  if (beta_dpo <= 0.0) throw Error("ObjectiveConfig: beta_dpo must be > 0");
}

SftResult sft_loss(std::span<const double> target_logprobs) {
  if (target_logprobs.empty()) throw EmptyBatch();
  const double n = static_cast<double>(target_logprobs.size());
  SftResult result;
  double sum = 0.0;
  for (double lp : target_logprobs) sum += lp;
  result.loss = -sum / n;
  result.dlogprob.assign(target_logprobs.size(), -1.0 / n);
  return result;
}

namespace {

// softplus(x) = log(1 + e^x), stable for large |x|.
double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

DpoResult dpo_loss(double lp_w_theta, double lp_l_theta, double lp_w_ref,
                   double lp_l_ref, double beta) {
  const double margin = beta * ((lp_w_theta - lp_w_ref) - (lp_l_theta - lp_l_ref));
  DpoResult result;
  result.margin = margin;
  result.loss = softplus(-margin);  // -log sigmoid(margin)
  const double slope = -(1.0 - sigmoid(margin));
  result.dlp_preferred = slope * beta;
  result.dlp_dispreferred = -slope * beta;
  return result;
}

std::vector<double> group_advantages(std::span<const double> rewards,
                                     double sigma_floor) {
  if (rewards.empty()) throw EmptyBatch();
  const double n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double std_dev = std::sqrt(var / n);

  std::vector<double> advantages(rewards.size(), 0.0);
  if (std_dev < sigma_floor) return advantages;  // all-equal groups: no signal
  for (size_t i = 0; i < rewards.size(); ++i)
    advantages[i] = (rewards[i] - mean) / std_dev;
  return advantages;
}

GrpoResult grpo_objective(std::span<const double> lp_theta,
                          std::span<const double> lp_ref,
                          std::span<const double> advantages, double kl,
                          const ObjectiveConfig& cfg) {
  if (lp_theta.size() != lp_ref.size() || lp_theta.size() != advantages.size())
    throw LengthMismatch("grpo_objective: input lists differ in length");
  if (lp_theta.empty()) throw EmptyBatch();

  const double g = static_cast<double>(lp_theta.size());
  GrpoResult result;
  result.dlp_theta.assign(lp_theta.size(), 0.0);

  double surrogate = 0.0;
  for (size_t i = 0; i < lp_theta.size(); ++i) {
    const double ratio = std::exp(lp_theta[i] - lp_ref[i]);
    const double clipped = std::clamp(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps);
    const double unclipped_term = ratio * advantages[i];
    const double clipped_term = clipped * advantages[i];
    if (unclipped_term <= clipped_term) {
      surrogate += unclipped_term;
      // d(ratio * A)/d lp_theta = ratio * A.
      result.dlp_theta[i] = -unclipped_term / g;
    } else {
      // clip saturated: constant in lp_theta.
      surrogate += clipped_term;
    }
  }
  surrogate /= g;
  result.loss = -(surrogate - cfg.beta_kl * kl);
  result.dkl = cfg.beta_kl;
  return result;
}

double kl_exact(std::span<const double> dist_theta, std::span<const double> dist_ref) {
  if (dist_theta.size() != dist_ref.size())
    throw LengthMismatch("kl_exact: distributions differ in length");
  double sum_theta = 0.0, sum_ref = 0.0;
  for (double p : dist_theta) sum_theta += p;
  for (double q : dist_ref) sum_ref += q;
  if (std::abs(sum_theta - 1.0) > 1e-9 || std::abs(sum_ref - 1.0) > 1e-9)
    throw Error("kl_exact: distributions must sum to 1 within 1e-9");

  double kl = 0.0;
  for (size_t i = 0; i < dist_theta.size(); ++i) {
    const double p = dist_theta[i];
    if (p <= 0.0) continue;
    const double q = dist_ref[i];
    if (q <= 0.0)
      throw SupportMismatch("kl_exact: reference lacks support at outcome " +
                            std::to_string(i));
    kl += p * std::log(p / q);
  }
  return std::max(kl, 0.0);
}

double kl_sampled(std::span<const double> lp_theta_samples,
                  std::span<const double> lp_ref_samples) {
  if (lp_theta_samples.size() != lp_ref_samples.size())
    throw LengthMismatch("kl_sampled: sample lists differ in length");
  if (lp_theta_samples.empty()) throw EmptyBatch();

  double sum = 0.0;
  for (size_t i = 0; i < lp_theta_samples.size(); ++i) {
    const double d = lp_ref_samples[i] - lp_theta_samples[i];
    sum += std::expm1(d) - d;  // e^d - d - 1 >= 0
  }
  return sum / static_cast<double>(lp_theta_samples.size());
}

}  // namespace vidrl
