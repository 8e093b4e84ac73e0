#pragma once

#include <ostream>
#include <vector>

#include "vidrl/core.hpp"

namespace vidrl {

struct MissingManipulatedGroup : Error {
  MissingManipulatedGroup()
      : Error("temporal-artifact reward needs a non-empty manipulated response group") {}
};

// All reward hyperparameters. alpha1/alpha2 weight the temporal-artifact
// bonus for real/fake source videos, mu gates it, delta scales the
// quality-graded reward, omega is the length bonus.
struct RewardConfig {
  double alpha1 = 0.5;
  double alpha2 = 0.3;
  double mu = 0.8;
  double delta = 1.0;
  double omega = 0.1;
  int l_min = 320;
  int l_max = 512;

  void validate() const;
};

// 1 if the response agrees with the truth on real/fake, else 0.
double grpo_reward(const Response& response, const AnswerLabel& truth);

// Fraction of a manipulated-response group classified fake.
double manipulated_fake_fraction(const std::vector<Response>& manipulated);

// Per original response: base reward plus the conditional bonus alpha1
// (real source) or alpha2 (fake source) when the response is correct and the
// manipulated group's fake-fraction exceeds mu.
std::vector<double> ta_rewards(const RolloutGroup& group, const RewardConfig& cfg);

// Quality-graded reward: 0 on kind mismatch, delta on exact match, otherwise
// delta * (1 - |s(answer) - s(truth)|) on the fake x fake block.
double q_reward(const AnswerLabel& answer, const AnswerLabel& truth,
                const AnswerSpace& space, const RewardConfig& cfg);

// base + omega iff correct and l_min <= length <= l_max.
double length_bonus(double base, bool correct, int length, const RewardConfig& cfg);

// Exhaustive (answer x truth) table of q_reward over the full label space.
struct RewardTable {
  std::vector<AnswerLabel> labels;          // real first, then fake-s ascending
  std::vector<std::vector<double>> cells;   // cells[answer][truth]
};

RewardTable reward_table(const AnswerSpace& space, const RewardConfig& cfg);

// CSV: header row/column of canonical label strings, 6 decimal places.
void write_reward_table_csv(const RewardTable& table, std::ostream& os);

}  // namespace vidrl
