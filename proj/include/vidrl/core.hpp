#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vidrl {

// ----------------------------------------------------------------------------
// Errors

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RealHasNoProgress : Error {
  RealHasNoProgress() : Error("progress is undefined for real labels") {}
};
struct ParseFailure : Error {
  explicit ParseFailure(const std::string& msg) : Error(msg) {}
};
struct UnknownStep : Error {
  explicit UnknownStep(const std::string& msg) : Error(msg) {}
};

// ----------------------------------------------------------------------------
// Answer space

enum class Kind { Real, Fake };

// A prediction or ground-truth label: "real", "fake", or "fake-<step>".
struct AnswerLabel {
  Kind kind = Kind::Real;
  std::optional<int> step;  // present only for Fake in the quality-graded space

  static AnswerLabel real() { return {Kind::Real, std::nullopt}; }
  static AnswerLabel fake() { return {Kind::Fake, std::nullopt}; }
  static AnswerLabel fake_step(int s) { return {Kind::Fake, s}; }

  bool operator==(const AnswerLabel&) const = default;
};

// The prediction domain {real} ∪ {fake-s : s in step_grid}, with the
// progress map s(.) = step / max_step.
struct AnswerSpace {
  int max_step = 50;
  std::vector<int> step_grid = {10, 20, 30, 40, 50};
  std::map<int, double> quality_labels = {
      {10, 20.0}, {20, 40.0}, {30, 60.0}, {40, 80.0}, {50, 95.0}};

  bool has_step(int s) const;
  // Space with a single grid step (at max_step's quality grade if graded).
  static AnswerSpace single_step(int step, int max_step = 50);
  void validate() const;
};

// Fraction of reverse-diffusion steps used; defined only on the fake subset.
double progress(const AnswerLabel& label, const AnswerSpace& space);

// Binary real/fake agreement; steps ignored. Symmetric in kind.
bool is_binary_correct(const AnswerLabel& answer, const AnswerLabel& truth);

// Canonical textual form: "real" | "fake" | "fake-<step>".
std::string to_string(const AnswerLabel& label);
AnswerLabel parse_label(const std::string& text, const AnswerSpace& space);

// Extracts the final answer from a "<answer>...</answer>" section; the last
// such section wins. Case-insensitive. nullopt when nothing parses.
std::optional<AnswerLabel> try_parse_answer(const std::string& transcript,
                                            const AnswerSpace& space);
AnswerLabel parse_answer(const std::string& transcript, const AnswerSpace& space);

// ----------------------------------------------------------------------------
// Responses

enum class LengthBucket { Short, Mid, Long };

// Bucket midpoints; exercise the length-reward path without token generation.
int representative_length(LengthBucket bucket);
LengthBucket bucket_of(int length, int l_min = 320, int l_max = 512);
std::string to_string(LengthBucket bucket);
LengthBucket bucket_from_string(const std::string& text);

// One sampled policy output.
struct Response {
  AnswerLabel answer;
  LengthBucket bucket = LengthBucket::Mid;
  int length = 416;
  double logprob = 0.0;  // under the producing policy; <= 0
  std::optional<std::string> transcript;
};

// ----------------------------------------------------------------------------
// Video samples

struct Meta {
  int frame_count = 49;
  double fps = 8.0;
  int width = 720;
  int height = 480;

  bool operator==(const Meta&) const = default;
};

using Frame = std::vector<double>;

enum class ArtifactKind { RepeatSegment, ReverseSegment };

std::string to_string(ArtifactKind kind);
ArtifactKind artifact_kind_from_string(const std::string& text);

struct ArtifactRecord {
  ArtifactKind kind = ArtifactKind::ReverseSegment;
  int window_start = 0;
  int window_len = 0;
  AnswerLabel source_truth;  // label of the unmanipulated video

  bool operator==(const ArtifactRecord&) const = default;
};

// A frame sequence with metadata; frames are abstract feature vectors.
struct VideoSample {
  std::string id;
  std::vector<Frame> frames;
  Meta meta;
  AnswerLabel truth;
  std::string pair_id;  // links a fake to its real counterpart
  std::optional<ArtifactRecord> artifact;

  void validate() const;  // frames.size() == meta.frame_count, equal dims
};

// A group of G responses for one input, plus the optional G' manipulated
// group used by the temporal-artifact reward.
struct RolloutGroup {
  std::string input_id;
  std::vector<Response> responses;
  std::optional<std::vector<Response>> manipulated_responses;
  AnswerLabel truth;
};

}  // namespace vidrl
