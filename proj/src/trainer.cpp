#include "vidrl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vidrl/rng.hpp"

namespace vidrl {

std::string to_string(TrainMode mode) {
  switch (mode) {
    case TrainMode::SFT: return "sft";
    case TrainMode::DPO: return "dpo";
    case TrainMode::GRPO: return "grpo";
    case TrainMode::GRPO_TA: return "grpo-ta";
    case TrainMode::GRPO_Q: return "grpo-q";
  }
  throw Error("invalid train mode");
}

TrainMode train_mode_from_string(const std::string& text) {
  if (text == "sft") return TrainMode::SFT;
  if (text == "dpo") return TrainMode::DPO;
  if (text == "grpo") return TrainMode::GRPO;
  if (text == "grpo-ta") return TrainMode::GRPO_TA;
  if (text == "grpo-q") return TrainMode::GRPO_Q;
  throw ConfigError("unrecognized train mode: \"" + text + "\"");
}

void TrainConfig::validate() const {
  if (steps < 0) throw ConfigError("TrainConfig: steps must be >= 0");
  if (batch_inputs < 1) throw ConfigError("TrainConfig: batch_inputs must be >= 1");
  if (G < 2) throw ConfigError("TrainConfig: G must be >= 2 for group statistics");
  if (mode == TrainMode::GRPO_TA && G_prime < 1)
    throw ConfigError("TrainConfig: G_prime must be >= 1 in grpo-ta mode");
  if (learning_rate <= 0.0) throw ConfigError("TrainConfig: learning_rate must be > 0");
  if (checkpoint_every < 0) throw ConfigError("TrainConfig: checkpoint_every must be >= 0");
  objective.validate();
  reward.validate();
  artifact.validate();
}

json to_json(const TrainConfig& cfg) {
  return {{"mode", to_string(cfg.mode)},
          {"steps", cfg.steps},
          {"batch_inputs", cfg.batch_inputs},
          {"G", cfg.G},
          {"G_prime", cfg.G_prime},
          {"learning_rate", cfg.learning_rate},
          {"optimizer", cfg.optimizer == OptimizerKind::SGD ? "sgd" : "adam"},
          {"adam_beta1", cfg.adam_beta1},
          {"adam_beta2", cfg.adam_beta2},
          {"adam_eps", cfg.adam_eps},
          {"seed", cfg.seed},
          {"objective", to_json(cfg.objective)},
          {"reward", to_json(cfg.reward)},
          {"artifact", to_json(cfg.artifact)},
          {"length_reward_enabled", cfg.length_reward_enabled},
          {"ta_update_manipulated", cfg.ta_update_manipulated},
          {"q_exact_match_only", cfg.q_exact_match_only},
          {"full_batch", cfg.full_batch},
          {"checkpoint_every", cfg.checkpoint_every},
          {"init_checkpoint", cfg.init_checkpoint}};
}

TrainConfig train_config_from_json(const json& j) {
  reject_unknown_keys(
      j, {"mode", "steps", "batch_inputs", "G", "G_prime", "learning_rate", "optimizer",
          "adam_beta1", "adam_beta2", "adam_eps", "seed", "objective", "reward",
          "artifact", "length_reward_enabled", "ta_update_manipulated",
          "q_exact_match_only", "full_batch", "checkpoint_every", "init_checkpoint"},
      "train config");
  TrainConfig cfg;
  if (j.contains("mode")) cfg.mode = train_mode_from_string(j.at("mode").get<std::string>());
  if (j.contains("steps")) cfg.steps = j.at("steps").get<int>();
  if (j.contains("batch_inputs")) cfg.batch_inputs = j.at("batch_inputs").get<int>();
  if (j.contains("G")) cfg.G = j.at("G").get<int>();
  if (j.contains("G_prime")) cfg.G_prime = j.at("G_prime").get<int>();
  if (j.contains("learning_rate")) cfg.learning_rate = j.at("learning_rate").get<double>();
  if (j.contains("optimizer")) {
    const std::string kind = j.at("optimizer").get<std::string>();
    if (kind == "sgd") cfg.optimizer = OptimizerKind::SGD;
    else if (kind == "adam") cfg.optimizer = OptimizerKind::AdamLike;
    else throw ConfigError("unrecognized optimizer: \"" + kind + "\"");
  }
  if (j.contains("adam_beta1")) cfg.adam_beta1 = j.at("adam_beta1").get<double>();
  if (j.contains("adam_beta2")) cfg.adam_beta2 = j.at("adam_beta2").get<double>();
  if (j.contains("adam_eps")) cfg.adam_eps = j.at("adam_eps").get<double>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
  if (j.contains("objective")) cfg.objective = objective_config_from_json(j.at("objective"));
  if (j.contains("reward")) cfg.reward = reward_config_from_json(j.at("reward"));
  if (j.contains("artifact")) cfg.artifact = artifact_config_from_json(j.at("artifact"));
  if (j.contains("length_reward_enabled"))
    cfg.length_reward_enabled = j.at("length_reward_enabled").get<bool>();
  if (j.contains("ta_update_manipulated"))
    cfg.ta_update_manipulated = j.at("ta_update_manipulated").get<bool>();
  if (j.contains("q_exact_match_only"))
    cfg.q_exact_match_only = j.at("q_exact_match_only").get<bool>();
  if (j.contains("full_batch")) cfg.full_batch = j.at("full_batch").get<bool>();
  if (j.contains("checkpoint_every"))
    cfg.checkpoint_every = j.at("checkpoint_every").get<int>();
  if (j.contains("init_checkpoint"))
    cfg.init_checkpoint = j.at("init_checkpoint").get<std::string>();
  cfg.validate();
  return cfg;
}

AnswerCodec codec_for(const Corpus& corpus) {
  return corpus.cfg.quality_mode ? AnswerCodec::quality(corpus.cfg.space)
                                 : AnswerCodec::binary();
}

Response sft_target(const AnswerLabel& truth) {
  Response r;
  r.answer = truth;
  r.bucket = LengthBucket::Mid;
  r.length = representative_length(LengthBucket::Mid);
  return r;
}

// ----------------------------------------------------------------------------
// Parameter-vector arithmetic

namespace {

void add_scaled(ParamGrad& acc, const ParamGrad& g, double scale) {
  for (size_t i = 0; i < acc.weights.size(); ++i) acc.weights[i] += scale * g.weights[i];
  for (size_t i = 0; i < acc.bias.size(); ++i) acc.bias[i] += scale * g.bias[i];
  for (int b = 0; b < kNumBuckets; ++b) acc.length_logits[b] += scale * g.length_logits[b];
}

void scale(ParamGrad& g, double s) {
  for (double& w : g.weights) w *= s;
  for (double& b : g.bias) b *= s;
  for (double& l : g.length_logits) l *= s;
}

constexpr uint64_t kMasterLane = 0x5eedULL;
constexpr uint64_t kRolloutLane = 0;
constexpr uint64_t kInjectLane = 1;
constexpr uint64_t kManipulatedLane = 2;

}  // namespace

void apply_update(PolicyParams& params, const ParamGrad& grad, const TrainConfig& cfg,
                  AdamState& opt) {
  std::vector<double> p = params.flatten();
  const std::vector<double> g = grad.flatten();
  if (cfg.optimizer == OptimizerKind::SGD) {
    for (size_t i = 0; i < p.size(); ++i) p[i] -= cfg.learning_rate * g[i];
  } else {
    if (opt.m.size() != p.size()) {
      opt.m.assign(p.size(), 0.0);
      opt.v.assign(p.size(), 0.0);
      opt.t = 0;
    }
    ++opt.t;
    const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(opt.t));
    const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(opt.t));
    for (size_t i = 0; i < p.size(); ++i) {
      opt.m[i] = cfg.adam_beta1 * opt.m[i] + (1.0 - cfg.adam_beta1) * g[i];
      opt.v[i] = cfg.adam_beta2 * opt.v[i] + (1.0 - cfg.adam_beta2) * g[i] * g[i];
      const double m_hat = opt.m[i] / bc1;
      const double v_hat = opt.v[i] / bc2;
      p[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
    }
  }
  params = PolicyParams::unflatten(params.num_classes, params.feature_dim, p);
}

// ----------------------------------------------------------------------------
// Group gradients

GroupGradient grpo_group_gradient(const ToyPolicy& policy, const PolicyParams& params,
                                  const PolicyParams& ref, const FeatureVector& features,
                                  const std::vector<Response>& responses,
                                  const std::vector<double>& rewards,
                                  const ObjectiveConfig& cfg) {
  std::vector<double> lp_theta(responses.size()), lp_ref(responses.size());
  for (size_t i = 0; i < responses.size(); ++i) {
    lp_theta[i] = policy.logprob(params, features, responses[i]);
    lp_ref[i] = policy.logprob(ref, features, responses[i]);
  }
  const std::vector<double> advantages = group_advantages(rewards, cfg.sigma_floor);
  const double kl = policy.kl_exact(params, ref, features);
  const GrpoResult res = grpo_objective(lp_theta, lp_ref, advantages, kl, cfg);

  GroupGradient out;
  out.loss = res.loss;
  out.kl = kl;
  out.grad = PolicyParams::zeros(params.num_classes, params.feature_dim);
  for (size_t i = 0; i < responses.size(); ++i) {
    if (res.dlp_theta[i] == 0.0) continue;
    add_scaled(out.grad, policy.grad_logprob(params, features, responses[i]),
               res.dlp_theta[i]);
  }
  if (res.dkl != 0.0)
    add_scaled(out.grad, policy.kl_exact_grad(params, ref, features), res.dkl);
  return out;
}

GroupGradient exact_expectation_grpo_gradient(
    const ToyPolicy& policy, const PolicyParams& params, const PolicyParams& ref,
    const FeatureVector& features,
    const std::function<double(const Response&)>& reward_fn, const ObjectiveConfig& cfg) {
  const std::vector<Response> outcomes = policy.enumerate_responses(params, features);

  std::vector<double> probs(outcomes.size()), rewards(outcomes.size());
  for (size_t i = 0; i < outcomes.size(); ++i) {
    probs[i] = std::exp(outcomes[i].logprob);
    rewards[i] = reward_fn(outcomes[i]);
  }

  // Probability-weighted group statistics over the whole response space.
  double mean = 0.0;
  for (size_t i = 0; i < outcomes.size(); ++i) mean += probs[i] * rewards[i];
  double var = 0.0;
  for (size_t i = 0; i < outcomes.size(); ++i)
    var += probs[i] * (rewards[i] - mean) * (rewards[i] - mean);
  const double std_dev = std::sqrt(var);

  GroupGradient out;
  out.grad = PolicyParams::zeros(params.num_classes, params.feature_dim);
  out.kl = policy.kl_exact(params, ref, features);

  double surrogate = 0.0;
  for (size_t i = 0; i < outcomes.size(); ++i) {
    const double advantage = std_dev < cfg.sigma_floor ? 0.0 : (rewards[i] - mean) / std_dev;
    const double lp_ref = policy.logprob(ref, features, outcomes[i]);
    const double ratio = std::exp(outcomes[i].logprob - lp_ref);
    const double clipped = std::clamp(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps);
    const double unclipped_term = ratio * advantage;
    const double clipped_term = clipped * advantage;
    const double term = std::min(unclipped_term, clipped_term);
    surrogate += probs[i] * term;
    if (unclipped_term <= clipped_term && advantage != 0.0)
      add_scaled(out.grad, policy.grad_logprob(params, features, outcomes[i]),
                 -probs[i] * unclipped_term);
  }
  out.loss = -(surrogate - cfg.beta_kl * out.kl);
  if (cfg.beta_kl != 0.0)
    add_scaled(out.grad, policy.kl_exact_grad(params, ref, features), cfg.beta_kl);
  return out;
}

// ----------------------------------------------------------------------------
// Training loops

namespace {

struct LoopContext {
  const Corpus& corpus;
  const TrainConfig& cfg;
  ToyPolicy policy;
  std::vector<int> train;
  std::vector<FeatureVector> cache;

  LoopContext(const Corpus& corpus_in, const TrainConfig& cfg_in)
      : corpus(corpus_in),
        cfg(cfg_in),
        policy(codec_for(corpus_in)),
        train(corpus_in.train_indices()),
        cache(corpus_in.samples.size()) {
    if (train.empty()) throw EmptySplit("train");
  }

  const FeatureVector& features(int idx) {
    FeatureVector& f = cache[idx];
    if (f.values.empty()) f = featurize(corpus.samples[idx]);
    return f;
  }
};

std::vector<int> draw_batch(const std::vector<int>& pool, int batch, bool full_batch,
                            std::mt19937_64& rng) {
  if (full_batch) return pool;
  std::vector<int> out(batch);
  std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
  for (int i = 0; i < batch; ++i) out[i] = pool[pick(rng)];
  return out;
}

void emit(TrainResult& result, const json& record, const StepSink& sink) {
  result.log.push_back(record);
  if (sink) sink(result.state, record);
}

double reward_for(const Response& response, const VideoSample& sample,
                  const LoopContext& ctx) {
  const TrainConfig& cfg = ctx.cfg;
  double r = 0.0;
  if (cfg.mode == TrainMode::GRPO_Q) {
    r = cfg.q_exact_match_only
            ? (response.answer == sample.truth ? cfg.reward.delta : 0.0)
            : q_reward(response.answer, sample.truth, ctx.corpus.cfg.space, cfg.reward);
  } else {
    r = grpo_reward(response, sample.truth);
  }
  if (cfg.length_reward_enabled)
    r = length_bonus(r, is_binary_correct(response.answer, sample.truth),
                     response.length, cfg.reward);
  return r;
}

TrainResult run_grpo_loop(TrainState state, LoopContext& ctx, const StepSink& sink) {
  const TrainConfig& cfg = ctx.cfg;
  if (cfg.mode == TrainMode::GRPO_Q && !ctx.corpus.cfg.quality_mode)
    throw ConfigError("grpo-q training needs a quality-graded corpus");

  TrainResult result;
  result.state = std::move(state);

  for (int step = result.state.step + 1; step <= cfg.steps; ++step) {
    const std::vector<int> batch =
        draw_batch(ctx.train, cfg.batch_inputs, cfg.full_batch, result.state.master_rng);

    ParamGrad grad = PolicyParams::zeros(result.state.params.num_classes,
                                         result.state.params.feature_dim);
    int groups = 0, correct = 0, answered = 0;
    double loss_sum = 0.0, reward_sum = 0.0, kl_sum = 0.0, p_tilde_sum = 0.0;
    size_t reward_count = 0;

    for (size_t b = 0; b < batch.size(); ++b) {
      const VideoSample& sample = ctx.corpus.samples[batch[b]];
      const FeatureVector& x = ctx.features(batch[b]);

      std::mt19937_64 rollout_rng = make_stream(
          cfg.seed, {static_cast<uint64_t>(step), b, kRolloutLane});
      RolloutGroup group;
      group.input_id = sample.id;
      group.truth = sample.truth;
      group.responses = ctx.policy.sample_group(result.state.params, x, cfg.G, rollout_rng);
      result.responses_sampled += cfg.G;

      VideoSample manipulated;
      FeatureVector x_m;
      if (cfg.mode == TrainMode::GRPO_TA) {
        std::mt19937_64 inject_rng = make_stream(
            cfg.seed, {static_cast<uint64_t>(step), b, kInjectLane});
        manipulated = inject(sample, cfg.artifact, inject_rng);
        x_m = featurize(manipulated);
        std::mt19937_64 manip_rng = make_stream(
            cfg.seed, {static_cast<uint64_t>(step), b, kManipulatedLane});
        group.manipulated_responses =
            ctx.policy.sample_group(result.state.params, x_m, cfg.G_prime, manip_rng);
        result.manipulated_sampled += cfg.G_prime;
      }

      std::vector<double> rewards;
      if (cfg.mode == TrainMode::GRPO_TA) {
        rewards = ta_rewards(group, cfg.reward);
        if (cfg.length_reward_enabled)
          for (size_t i = 0; i < rewards.size(); ++i)
            rewards[i] = length_bonus(
                rewards[i], is_binary_correct(group.responses[i].answer, sample.truth),
                group.responses[i].length, cfg.reward);
        p_tilde_sum += manipulated_fake_fraction(*group.manipulated_responses);
      } else {
        rewards.reserve(group.responses.size());
        for (const Response& r : group.responses)
          rewards.push_back(reward_for(r, sample, ctx));
      }

      for (const Response& r : group.responses) {
        ++answered;
        if (is_binary_correct(r.answer, sample.truth)) ++correct;
      }
      for (double r : rewards) reward_sum += r;
      reward_count += rewards.size();

      const GroupGradient gg =
          grpo_group_gradient(ctx.policy, result.state.params, result.state.reference, x,
                              group.responses, rewards, cfg.objective);
      add_scaled(grad, gg.grad, 1.0);
      loss_sum += gg.loss;
      kl_sum += gg.kl;
      ++groups;

      if (cfg.mode == TrainMode::GRPO_TA && cfg.ta_update_manipulated) {
        std::vector<double> m_rewards;
        m_rewards.reserve(group.manipulated_responses->size());
        for (const Response& r : *group.manipulated_responses) {
          double mr = grpo_reward(r, manipulated.truth);
          if (cfg.length_reward_enabled)
            mr = length_bonus(mr, is_binary_correct(r.answer, manipulated.truth),
                              r.length, cfg.reward);
          m_rewards.push_back(mr);
        }
        const GroupGradient mg = grpo_group_gradient(
            ctx.policy, result.state.params, result.state.reference, x_m,
            *group.manipulated_responses, m_rewards, cfg.objective);
        add_scaled(grad, mg.grad, 1.0);
        loss_sum += mg.loss;
        ++groups;
      }
    }

    scale(grad, 1.0 / static_cast<double>(groups));
    apply_update(result.state.params, grad, cfg, result.state.opt);
    result.state.step = step;

    json record = {{"step", step},
                   {"loss", loss_sum / groups},
                   {"mean_reward", reward_sum / static_cast<double>(reward_count)},
                   {"kl", kl_sum / static_cast<double>(batch.size())},
                   {"accuracy", static_cast<double>(correct) / answered}};
    if (cfg.mode == TrainMode::GRPO_TA)
      record["p_tilde"] = p_tilde_sum / static_cast<double>(batch.size());
    emit(result, record, sink);
  }
  return result;
}

TrainResult run_sft_loop(TrainState state, LoopContext& ctx, const StepSink& sink) {
  const TrainConfig& cfg = ctx.cfg;
  TrainResult result;
  result.state = std::move(state);

  for (int step = result.state.step + 1; step <= cfg.steps; ++step) {
    const std::vector<int> batch =
        draw_batch(ctx.train, cfg.batch_inputs, cfg.full_batch, result.state.master_rng);

    std::vector<double> lp(batch.size());
    for (size_t b = 0; b < batch.size(); ++b)
      lp[b] = ctx.policy.logprob(result.state.params, ctx.features(batch[b]),
                                 sft_target(ctx.corpus.samples[batch[b]].truth));
    const SftResult res = sft_loss(lp);

    ParamGrad grad = PolicyParams::zeros(result.state.params.num_classes,
                                         result.state.params.feature_dim);
    for (size_t b = 0; b < batch.size(); ++b)
      add_scaled(grad,
                 ctx.policy.grad_logprob(result.state.params, ctx.features(batch[b]),
                                         sft_target(ctx.corpus.samples[batch[b]].truth)),
                 res.dlogprob[b]);

    apply_update(result.state.params, grad, cfg, result.state.opt);
    result.state.step = step;
    emit(result, json{{"step", step}, {"loss", res.loss}}, sink);
  }
  return result;
}

TrainResult run_dpo_loop(TrainState state, LoopContext& ctx,
                         const std::vector<PreferencePair>& pairs, const StepSink& sink) {
  const TrainConfig& cfg = ctx.cfg;
  if (pairs.empty()) throw EmptyPairs();

  // Resolve inputs and annotation responses once.
  struct ResolvedPair {
    int sample_idx;
    Response preferred;
    Response dispreferred;
  };
  auto annotate = [&](const PreferenceSide& side) {
    Response r;
    r.answer = side.answer;
    r.length = static_cast<int>(side.transcript.size());
    r.bucket = bucket_of(r.length, cfg.reward.l_min, cfg.reward.l_max);
    r.transcript = side.transcript;
    return r;
  };
  std::vector<ResolvedPair> resolved;
  resolved.reserve(pairs.size());
  for (const PreferencePair& p : pairs) {
    const VideoSample* sample = ctx.corpus.find(p.input_id);
    if (sample == nullptr) throw UnpairedSample(p.input_id);
    const int idx = static_cast<int>(sample - ctx.corpus.samples.data());
    resolved.push_back({idx, annotate(p.preferred), annotate(p.dispreferred)});
  }
  std::vector<int> pool(resolved.size());
  for (size_t i = 0; i < pool.size(); ++i) pool[i] = static_cast<int>(i);

  TrainResult result;
  result.state = std::move(state);

  for (int step = result.state.step + 1; step <= cfg.steps; ++step) {
    const std::vector<int> batch =
        draw_batch(pool, cfg.batch_inputs, cfg.full_batch, result.state.master_rng);

    ParamGrad grad = PolicyParams::zeros(result.state.params.num_classes,
                                         result.state.params.feature_dim);
    double loss_sum = 0.0, margin_sum = 0.0;
    const double inv_b = 1.0 / static_cast<double>(batch.size());

    for (int pi : batch) {
      const ResolvedPair& rp = resolved[pi];
      const FeatureVector& x = ctx.features(rp.sample_idx);
      const double lp_w = ctx.policy.logprob(result.state.params, x, rp.preferred);
      const double lp_l = ctx.policy.logprob(result.state.params, x, rp.dispreferred);
      const double lp_w_ref = ctx.policy.logprob(result.state.reference, x, rp.preferred);
      const double lp_l_ref = ctx.policy.logprob(result.state.reference, x, rp.dispreferred);

      const DpoResult res =
          dpo_loss(lp_w, lp_l, lp_w_ref, lp_l_ref, cfg.objective.beta_dpo);
      loss_sum += res.loss;
      margin_sum += res.margin;
      add_scaled(grad, ctx.policy.grad_logprob(result.state.params, x, rp.preferred),
                 res.dlp_preferred * inv_b);
      add_scaled(grad, ctx.policy.grad_logprob(result.state.params, x, rp.dispreferred),
                 res.dlp_dispreferred * inv_b);
    }

    apply_update(result.state.params, grad, cfg, result.state.opt);
    result.state.step = step;
    emit(result,
         json{{"step", step}, {"loss", loss_sum * inv_b}, {"margin", margin_sum * inv_b}},
         sink);
  }
  return result;
}

TrainState fresh_state(const PolicyParams& params0, const TrainConfig& cfg) {
  TrainState state;
  state.params = params0;
  state.reference = snapshot(params0);
  state.master_rng = make_stream(cfg.seed, {kMasterLane});
  state.step = 0;
  return state;
}

TrainResult dispatch(TrainState state, const Corpus& corpus,
                     const std::vector<PreferencePair>& pairs, const TrainConfig& cfg,
                     const StepSink& sink) {
  cfg.validate();
  LoopContext ctx(corpus, cfg);
  state.params.check_shape(ctx.policy.codec().num_classes(), kFeatureDim);
  switch (cfg.mode) {
    case TrainMode::SFT: return run_sft_loop(std::move(state), ctx, sink);
    case TrainMode::DPO: return run_dpo_loop(std::move(state), ctx, pairs, sink);
    default: return run_grpo_loop(std::move(state), ctx, sink);
  }
}

}  // namespace

TrainResult train_sft(const Corpus& corpus, const TrainConfig& cfg, const StepSink& sink) {
  const PolicyParams params0 =
      PolicyParams::zeros(codec_for(corpus).num_classes(), kFeatureDim);
  return dispatch(fresh_state(params0, cfg), corpus, {}, cfg, sink);
}

TrainResult train_dpo(const PolicyParams& params0, const Corpus& corpus,
                      const std::vector<PreferencePair>& pairs, const TrainConfig& cfg,
                      const StepSink& sink) {
  return dispatch(fresh_state(params0, cfg), corpus, pairs, cfg, sink);
}

TrainResult train_grpo(const PolicyParams& params0, const Corpus& corpus,
                       const TrainConfig& cfg, const StepSink& sink) {
  return dispatch(fresh_state(params0, cfg), corpus, {}, cfg, sink);
}

TrainResult resume_training(TrainState state, const Corpus& corpus,
                            const std::vector<PreferencePair>& pairs,
                            const TrainConfig& cfg, const StepSink& sink) {
  return dispatch(std::move(state), corpus, pairs, cfg, sink);
}

// ----------------------------------------------------------------------------
// Checkpoints

namespace {

constexpr const char* kCheckpointVersion = "1";

json params_to_json(const PolicyParams& p) {
  return {{"num_classes", p.num_classes},
          {"feature_dim", p.feature_dim},
          {"data", p.flatten()}};
}

PolicyParams params_from_json(const json& j) {
  return PolicyParams::unflatten(j.at("num_classes").get<int>(),
                                 j.at("feature_dim").get<int>(),
                                 j.at("data").get<std::vector<double>>());
}

uint64_t fnv1a(const std::string& text) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::string config_digest(const TrainConfig& cfg) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(to_json(cfg).dump())));
  return buf;
}

void save_checkpoint(const TrainState& state, const TrainConfig& cfg,
                     const AnswerCodec& codec, const std::filesystem::path& path) {
  std::ostringstream rng_state;
  rng_state << state.master_rng;

  json j = {{"version", kCheckpointVersion},
            {"mode", to_string(cfg.mode)},
            {"step", state.step},
            {"params", params_to_json(state.params)},
            {"reference", params_to_json(state.reference)},
            {"optimizer_state", {{"m", state.opt.m}, {"v", state.opt.v}, {"t", state.opt.t}}},
            {"rng_state", rng_state.str()},
            {"config_digest", config_digest(cfg)},
            {"codec", {{"quality", codec.quality_mode()}, {"space", to_json(codec.space())}}}};
  write_json_file(path, j);
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  const json j = load_json_file(path);
  if (j.at("version").get<std::string>() != kCheckpointVersion)
    throw VersionMismatch("unsupported checkpoint version " +
                          j.at("version").get<std::string>());

  TrainState state;
  state.params = params_from_json(j.at("params"));
  state.reference = params_from_json(j.at("reference"));
  state.opt.m = j.at("optimizer_state").at("m").get<std::vector<double>>();
  state.opt.v = j.at("optimizer_state").at("v").get<std::vector<double>>();
  state.opt.t = j.at("optimizer_state").at("t").get<long>();
  std::istringstream rng_state(j.at("rng_state").get<std::string>());
  rng_state >> state.master_rng;
  state.step = j.at("step").get<int>();

  const json& codec_j = j.at("codec");
  AnswerCodec codec = codec_j.at("quality").get<bool>()
                          ? AnswerCodec::quality(answer_space_from_json(codec_j.at("space")))
                          : AnswerCodec::binary();
  return {std::move(state), std::move(codec),
          train_mode_from_string(j.at("mode").get<std::string>())};
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path,
                                 const TrainConfig& cfg) {
  const json j = load_json_file(path);
  if (j.at("version").get<std::string>() != kCheckpointVersion)
    throw VersionMismatch("unsupported checkpoint version " +
                          j.at("version").get<std::string>());
  if (j.at("config_digest").get<std::string>() != config_digest(cfg))
    throw DigestMismatch();
  return load_checkpoint(path);
}

}  // namespace vidrl
