#pragma once

#include <span>
#include <vector>

#include "vidrl/core.hpp"

namespace vidrl {

struct EmptyBatch : Error {
  EmptyBatch() : Error("objective evaluated on an empty batch") {}
};
struct LengthMismatch : Error {
  explicit LengthMismatch(const std::string& msg) : Error(msg) {}
};
struct SupportMismatch : Error {
  explicit SupportMismatch(const std::string& msg) : Error(msg) {}
};

struct ObjectiveConfig {
  double beta_dpo = 0.1;
  double beta_kl = 0.04;
  double clip_eps = 0.2;
  double sigma_floor = 1e-8;

  void validate() const;
};

// Each objective returns its value together with the exact derivative with
// respect to every policy-dependent log-probability input; the trainer chains
// those through grad_logprob to reach the parameters.

struct SftResult {
  double loss = 0.0;
  std::vector<double> dlogprob;  // d loss / d logprob_i
};

// Negative log-likelihood of the target responses, averaged over the batch.
SftResult sft_loss(std::span<const double> target_logprobs);

struct DpoResult {
  double loss = 0.0;
  double dlp_preferred = 0.0;     // d loss / d lp_w under theta
  double dlp_dispreferred = 0.0;  // d loss / d lp_l under theta
  double margin = 0.0;            // beta-scaled implicit-reward margin
};

// -log sigma(beta * ((lp_w_theta - lp_w_ref) - (lp_l_theta - lp_l_ref))),
// evaluated in log-sum-exp form.
DpoResult dpo_loss(double lp_w_theta, double lp_l_theta, double lp_w_ref,
                   double lp_l_ref, double beta);

// Group-normalized advantages (population std). Groups whose std falls below
// the floor carry no learning signal and return all zeros.
std::vector<double> group_advantages(std::span<const double> rewards,
                                     double sigma_floor);

struct GrpoResult {
  double loss = 0.0;
  std::vector<double> dlp_theta;  // d loss / d lp_theta_i
  double dkl = 0.0;               // d loss / d kl (= beta_kl)
};

// Clipped-surrogate loss with KL penalty:
//   -[(1/G) sum_i min(ratio_i A_i, clip(ratio_i, 1-eps, 1+eps) A_i) - beta*kl]
// Advantages and reference log-probabilities are treated as constants.
GrpoResult grpo_objective(std::span<const double> lp_theta,
                          std::span<const double> lp_ref,
                          std::span<const double> advantages, double kl,
                          const ObjectiveConfig& cfg);

// Exact KL(p_theta || p_ref) over an enumerable outcome space.
double kl_exact(std::span<const double> dist_theta, std::span<const double> dist_ref);

// Nonnegative sampled estimator: mean of exp(d) - d - 1 with d = lp_ref - lp_theta.
double kl_sampled(std::span<const double> lp_theta_samples,
                  std::span<const double> lp_ref_samples);

}  // namespace vidrl
