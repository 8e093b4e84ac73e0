#include "vidrl/core.hpp"

#include <algorithm>
#include <cctype>

namespace vidrl {

bool AnswerSpace::has_step(int s) const {
  return std::find(step_grid.begin(), step_grid.end(), s) != step_grid.end();
}

AnswerSpace AnswerSpace::single_step(int step, int max_step) {
  AnswerSpace space;
  space.max_step = max_step;
  space.step_grid = {step};
  double grade = 95.0;
  if (auto it = space.quality_labels.find(step); it != space.quality_labels.end())
    grade = it->second;
  space.quality_labels = {{step, grade}};
  return space;
}

void AnswerSpace::validate() const {
  if (max_step <= 0) throw Error("AnswerSpace: max_step must be positive");
  if (step_grid.empty()) throw Error("AnswerSpace: step_grid must be non-empty");
  int prev = 0;
  for (int s : step_grid) {
    if (s <= prev) throw Error("AnswerSpace: step_grid must be strictly increasing and positive");
    if (s > max_step) throw Error("AnswerSpace: step_grid entry exceeds max_step");
    prev = s;
  }
  if (quality_labels.size() != step_grid.size())
    throw Error("AnswerSpace: quality_labels keys must equal step_grid");
  for (int s : step_grid)
    if (!quality_labels.count(s))
      throw Error("AnswerSpace: quality_labels missing grid step " + std::to_string(s));
}

double progress(const AnswerLabel& label, const AnswerSpace& space) {
  if (label.kind == Kind::Real) throw RealHasNoProgress();
  if (!label.step) throw UnknownStep("progress: fake label carries no step");
  if (!space.has_step(*label.step))
    throw UnknownStep("progress: step " + std::to_string(*label.step) + " not in grid");
  return static_cast<double>(*label.step) / static_cast<double>(space.max_step);
}

bool is_binary_correct(const AnswerLabel& answer, const AnswerLabel& truth) {
  return answer.kind == truth.kind;
}

std::string to_string(const AnswerLabel& label) {
  if (label.kind == Kind::Real) return "real";
  if (!label.step) return "fake";
  return "fake-" + std::to_string(*label.step);
}

namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n.");
  return s.substr(b, e - b + 1);
}

// Parses a bare token: "real" | "fake" | "fake-<step>". nullopt otherwise.
std::optional<AnswerLabel> parse_token(const std::string& raw, const AnswerSpace& space) {
  std::string t = lowercase(trim(raw));
  if (t == "real") return AnswerLabel::real();
  if (t == "fake") return AnswerLabel::fake();
  if (t.rfind("fake-", 0) == 0) {
    const std::string digits = t.substr(5);
    if (digits.empty() ||
        !std::all_of(digits.begin(), digits.end(),
                     [](unsigned char c) { return std::isdigit(c); }))
      return std::nullopt;
    int step = 0;
    try {
      step = std::stoi(digits);
    } catch (const std::exception&) {
      return std::nullopt;
    }
    if (!space.has_step(step)) return std::nullopt;
    return AnswerLabel::fake_step(step);
  }
  return std::nullopt;
}

size_t rfind_ci(const std::string& haystack, const std::string& lowered_needle) {
  const std::string lowered = lowercase(haystack);
  return lowered.rfind(lowered_needle);
}

}  // namespace

AnswerLabel parse_label(const std::string& text, const AnswerSpace& space) {
  if (auto label = parse_token(text, space)) return *label;
  throw ParseFailure("unrecognized label: \"" + text + "\"");
}

std::optional<AnswerLabel> try_parse_answer(const std::string& transcript,
                                            const AnswerSpace& space) {
  static const std::string open = "<answer>";
  static const std::string close = "</answer>";
  const size_t start = rfind_ci(transcript, open);
  if (start == std::string::npos) return std::nullopt;
  const size_t body = start + open.size();
  const size_t end = rfind_ci(transcript, close);
  if (end == std::string::npos || end < body) return std::nullopt;
  return parse_token(transcript.substr(body, end - body), space);
}

AnswerLabel parse_answer(const std::string& transcript, const AnswerSpace& space) {
  if (auto label = try_parse_answer(transcript, space)) return *label;
  throw ParseFailure("no recognizable answer section in transcript");
}

int representative_length(LengthBucket bucket) {
  switch (bucket) {
    case LengthBucket::Short: return 160;
    case LengthBucket::Mid: return 416;
    case LengthBucket::Long: return 640;
  }
  throw Error("invalid bucket");
}

LengthBucket bucket_of(int length, int l_min, int l_max) {
  if (length < l_min) return LengthBucket::Short;
  if (length <= l_max) return LengthBucket::Mid;
  return LengthBucket::Long;
}

std::string to_string(LengthBucket bucket) {
  switch (bucket) {
    case LengthBucket::Short: return "short";
    case LengthBucket::Mid: return "mid";
    case LengthBucket::Long: return "long";
  }
  throw Error("invalid bucket");
}

LengthBucket bucket_from_string(const std::string& text) {
  if (text == "short") return LengthBucket::Short;
  if (text == "mid") return LengthBucket::Mid;
  if (text == "long") return LengthBucket::Long;
  throw ParseFailure("unrecognized length bucket: \"" + text + "\"");
}

std::string to_string(ArtifactKind kind) {
  return kind == ArtifactKind::RepeatSegment ? "repeat" : "reverse";
}

ArtifactKind artifact_kind_from_string(const std::string& text) {
  if (text == "repeat") return ArtifactKind::RepeatSegment;
  if (text == "reverse") return ArtifactKind::ReverseSegment;
  throw ParseFailure("unrecognized artifact kind: \"" + text + "\"");
}

void VideoSample::validate() const {
  if (static_cast<int>(frames.size()) != meta.frame_count)
    throw Error("VideoSample " + id + ": frame count mismatch");
  if (!frames.empty()) {
    const size_t dim = frames.front().size();
    for (const Frame& f : frames)
      if (f.size() != dim) throw Error("VideoSample " + id + ": ragged frames");
  }
}

}  // namespace vidrl
