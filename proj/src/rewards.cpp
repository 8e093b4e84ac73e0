#include "vidrl/rewards.hpp"

#include <cmath>
#include <cstdio>

namespace vidrl {

void RewardConfig::validate() const {
  if (!(alpha1 > alpha2 && alpha2 > 0.0))
    throw Error("RewardConfig: need alpha1 > alpha2 > 0");
  if (!(mu > 0.0 && mu < 1.0)) throw Error("RewardConfig: need 0 < mu < 1");
  if (delta <= 0.0) throw Error("RewardConfig: need delta > 0");
  if (l_min > l_max) throw Error("RewardConfig: need l_min <= l_max");
}

double grpo_reward(const Response& response, const AnswerLabel& truth) {
  return is_binary_correct(response.answer, truth) ? 1.0 : 0.0;
}

double manipulated_fake_fraction(const std::vector<Response>& manipulated) {
  if (manipulated.empty()) throw MissingManipulatedGroup();
  int fake = 0;
  for (const Response& r : manipulated)
    if (r.answer.kind == Kind::Fake) ++fake;
  return static_cast<double>(fake) / static_cast<double>(manipulated.size());
}

std::vector<double> ta_rewards(const RolloutGroup& group, const RewardConfig& cfg) {
  if (!group.manipulated_responses || group.manipulated_responses->empty())
    throw MissingManipulatedGroup();
  const double p_tilde = manipulated_fake_fraction(*group.manipulated_responses);
  const double bonus = group.truth.kind == Kind::Real ? cfg.alpha1 : cfg.alpha2;

  std::vector<double> rewards;
  rewards.reserve(group.responses.size());
  for (const Response& r : group.responses) {
    const double base = grpo_reward(r, group.truth);
    // Bonus only when the original prediction is correct and the manipulated
    // group clears the threshold (strict inequality).
    rewards.push_back(base == 1.0 && p_tilde > cfg.mu ? base + bonus : base);
  }
  return rewards;
}

double q_reward(const AnswerLabel& answer, const AnswerLabel& truth,
                const AnswerSpace& space, const RewardConfig& cfg) {
  if (answer.kind != truth.kind) return 0.0;
  if (answer == truth) return cfg.delta;
  // Both fake with differing steps: partial credit by progress distance.
  const double sa = progress(answer, space);
  const double st = progress(truth, space);
  return cfg.delta * (1.0 - std::abs(sa - st));
}

double length_bonus(double base, bool correct, int length, const RewardConfig& cfg) {
  if (correct && length >= cfg.l_min && length <= cfg.l_max) return base + cfg.omega;
  return base;
}

RewardTable reward_table(const AnswerSpace& space, const RewardConfig& cfg) {
  RewardTable table;
  table.labels.push_back(AnswerLabel::real());
  for (int s : space.step_grid) table.labels.push_back(AnswerLabel::fake_step(s));

  const size_t n = table.labels.size();
  table.cells.assign(n, std::vector<double>(n, 0.0));
  for (size_t a = 0; a < n; ++a)
    for (size_t t = 0; t < n; ++t)
      table.cells[a][t] = q_reward(table.labels[a], table.labels[t], space, cfg);
  return table;
}

void write_reward_table_csv(const RewardTable& table, std::ostream& os) {
  os << "answer\\truth";
  for (const AnswerLabel& l : table.labels) os << "," << to_string(l);
  os << "\n";
  char buf[32];
  for (size_t a = 0; a < table.labels.size(); ++a) {
    os << to_string(table.labels[a]);
    for (size_t t = 0; t < table.labels.size(); ++t) {
      std::snprintf(buf, sizeof(buf), "%.6f", table.cells[a][t]);
      os << "," << buf;
    }
    os << "\n";
  }
}

}  // namespace vidrl
