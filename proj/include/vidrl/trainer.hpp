#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "vidrl/artifacts.hpp"
#include "vidrl/datagen.hpp"
#include "vidrl/io.hpp"
#include "vidrl/objectives.hpp"
#include "vidrl/policy.hpp"
#include "vidrl/rewards.hpp"

namespace vidrl {

struct EmptyPairs : Error {
  EmptyPairs() : Error("DPO training needs a non-empty preference-pair set") {}
};
struct VersionMismatch : Error {
  explicit VersionMismatch(const std::string& msg) : Error(msg) {}
};
struct DigestMismatch : Error {
  DigestMismatch() : Error("checkpoint was written under a different config") {}
};

enum class TrainMode { SFT, DPO, GRPO, GRPO_TA, GRPO_Q };
enum class OptimizerKind { SGD, AdamLike };

std::string to_string(TrainMode mode);
TrainMode train_mode_from_string(const std::string& text);

struct TrainConfig {
  TrainMode mode = TrainMode::GRPO;
  int steps = 2000;
  int batch_inputs = 16;
  int G = 8;        // responses per input
  int G_prime = 4;  // manipulated responses per input (TA mode)
  double learning_rate = 1e-2;
  OptimizerKind optimizer = OptimizerKind::AdamLike;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  uint64_t seed = 1;
  ObjectiveConfig objective;
  RewardConfig reward;
  ArtifactConfig artifact;
  bool length_reward_enabled = true;
  bool ta_update_manipulated = true;   // manipulated groups get their own updates
  bool q_exact_match_only = false;     // ablation: no partial credit in GRPO_Q
  bool full_batch = false;             // deterministic full-split batches
  int checkpoint_every = 0;            // 0: only the final checkpoint
  std::string init_checkpoint;         // optional starting params for RL modes

  void validate() const;
};

json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const json& j);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long t = 0;
};

struct TrainState {
  PolicyParams params;
  PolicyParams reference;  // frozen at phase start
  AdamState opt;
  std::mt19937_64 master_rng;
  int step = 0;  // completed steps
};

struct TrainResult {
  TrainState state;
  std::vector<json> log;  // one record per step
  long responses_sampled = 0;
  long manipulated_sampled = 0;
};

// Invoked after every optimizer step, e.g. to stream logs or checkpoints.
using StepSink = std::function<void(const TrainState&, const json& record)>;

// Codec implied by a corpus: quality-graded when it was generated that way.
AnswerCodec codec_for(const Corpus& corpus);

// Ground-truth response used as the SFT target (mid-length annotation).
Response sft_target(const AnswerLabel& truth);

TrainResult train_sft(const Corpus& corpus, const TrainConfig& cfg,
                      const StepSink& sink = {});
TrainResult train_dpo(const PolicyParams& params0, const Corpus& corpus,
                      const std::vector<PreferencePair>& pairs, const TrainConfig& cfg,
                      const StepSink& sink = {});
TrainResult train_grpo(const PolicyParams& params0, const Corpus& corpus,
                       const TrainConfig& cfg, const StepSink& sink = {});

// Continues a checkpointed run; reproduces the uninterrupted run bit-for-bit.
TrainResult resume_training(TrainState state, const Corpus& corpus,
                            const std::vector<PreferencePair>& pairs,
                            const TrainConfig& cfg, const StepSink& sink = {});

// ----------------------------------------------------------------------------
// Checkpoints

std::string config_digest(const TrainConfig& cfg);

void save_checkpoint(const TrainState& state, const TrainConfig& cfg,
                     const AnswerCodec& codec, const std::filesystem::path& path);

struct LoadedCheckpoint {
  TrainState state;
  AnswerCodec codec;
  TrainMode mode;
};

// Digest-checked load for resuming; the config must match the saved one.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path,
                                 const TrainConfig& cfg);
// Unchecked load, e.g. for evaluation.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

// ----------------------------------------------------------------------------
// Building blocks exposed for verification

struct GroupGradient {
  double loss = 0.0;
  ParamGrad grad;
  double kl = 0.0;
};

// Loss and parameter gradient of the clipped surrogate (plus exact KL to the
// reference) for one response group with fixed rewards.
GroupGradient grpo_group_gradient(const ToyPolicy& policy, const PolicyParams& params,
                                  const PolicyParams& ref, const FeatureVector& features,
                                  const std::vector<Response>& responses,
                                  const std::vector<double>& rewards,
                                  const ObjectiveConfig& cfg);

// Noise-free GRPO update direction: the group is the whole enumerable
// response space, each outcome weighted by its sampling probability.
GroupGradient exact_expectation_grpo_gradient(
    const ToyPolicy& policy, const PolicyParams& params, const PolicyParams& ref,
    const FeatureVector& features,
    const std::function<double(const Response&)>& reward_fn, const ObjectiveConfig& cfg);

// Single optimizer update, shared by all loops.
void apply_update(PolicyParams& params, const ParamGrad& grad, const TrainConfig& cfg,
                  AdamState& opt);

}  // namespace vidrl
