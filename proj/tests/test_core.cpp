#include <doctest.h>

#include <random>

#include "vidrl/core.hpp"

using namespace vidrl;

TEST_CASE("progress follows the fraction-of-steps rule") {
  const AnswerSpace space;
  CHECK(progress(AnswerLabel::fake_step(50), space) == doctest::Approx(1.0));
  CHECK(progress(AnswerLabel::fake_step(10), space) == doctest::Approx(0.2));
  CHECK_THROWS_AS(progress(AnswerLabel::real(), space), RealHasNoProgress);
  CHECK_THROWS_AS(progress(AnswerLabel::fake(), space), UnknownStep);
  CHECK_THROWS_AS(progress(AnswerLabel::fake_step(15), space), UnknownStep);
}

TEST_CASE("progress is strictly increasing in step and bounded in (0,1]") {
  const AnswerSpace space;
  double prev = 0.0;
  for (int s : space.step_grid) {
    const double p = progress(AnswerLabel::fake_step(s), space);
    CHECK(p > prev);
    CHECK(p <= 1.0);
    prev = p;
  }
}

TEST_CASE("is_binary_correct compares kinds only") {
  CHECK(is_binary_correct(AnswerLabel::fake_step(30), AnswerLabel::fake_step(50)));
  CHECK(is_binary_correct(AnswerLabel::real(), AnswerLabel::real()));
  CHECK_FALSE(is_binary_correct(AnswerLabel::real(), AnswerLabel::fake_step(10)));
}

TEST_CASE("is_binary_correct is symmetric in kind") {
  const AnswerSpace space;
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(space.step_grid.size()));
  for (int i = 0; i < 200; ++i) {
    auto draw = [&]() {
      const int k = pick(rng);
      return k == 0 ? AnswerLabel::real() : AnswerLabel::fake_step(space.step_grid[k - 1]);
    };
    const AnswerLabel a = draw(), b = draw();
    CHECK(is_binary_correct(a, b) == is_binary_correct(b, a));
  }
}

TEST_CASE("parse_answer extracts the final delimited answer") {
  const AnswerSpace space;
  const AnswerLabel fake = parse_answer("<answer>fake</answer>", space);
  CHECK(fake.kind == Kind::Fake);
  CHECK_FALSE(fake.step.has_value());

  const AnswerLabel graded = parse_answer("<answer>fake-30</answer>", space);
  CHECK(graded == AnswerLabel::fake_step(30));

  CHECK_THROWS_AS(parse_answer("no tags here", space), ParseFailure);
}

TEST_CASE("parse_answer handles case, whitespace, and multiple sections") {
  const AnswerSpace space;
  CHECK(parse_answer("<ANSWER> Real </ANSWER>", space) == AnswerLabel::real());
  CHECK(parse_answer("think...<answer>real</answer> hmm <answer>fake-50</answer>",
                     space) == AnswerLabel::fake_step(50));
  // Steps outside the grid are not recognizable tokens.
  CHECK_THROWS_AS(parse_answer("<answer>fake-15</answer>", space), ParseFailure);
  CHECK_THROWS_AS(parse_answer("<answer>bogus</answer>", space), ParseFailure);
}

TEST_CASE("parse_answer is total over arbitrary strings") {
  const AnswerSpace space;
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> len(0, 60);
  std::uniform_int_distribution<int> ch(32, 126);
  for (int i = 0; i < 500; ++i) {
    std::string s;
    const int n = len(rng);
    for (int k = 0; k < n; ++k) s.push_back(static_cast<char>(ch(rng)));
    CHECK_NOTHROW(try_parse_answer(s, space));
  }
}

TEST_CASE("canonical label round trip") {
  const AnswerSpace space;
  for (const AnswerLabel& l : {AnswerLabel::real(), AnswerLabel::fake(),
                               AnswerLabel::fake_step(20), AnswerLabel::fake_step(50)}) {
    CHECK(parse_label(to_string(l), space) == l);
  }
  CHECK(to_string(AnswerLabel::fake_step(30)) == "fake-30");
}

TEST_CASE("length buckets partition around [l_min, l_max]") {
  CHECK(bucket_of(319) == LengthBucket::Short);
  CHECK(bucket_of(320) == LengthBucket::Mid);
  CHECK(bucket_of(512) == LengthBucket::Mid);
  CHECK(bucket_of(513) == LengthBucket::Long);
  CHECK(representative_length(LengthBucket::Short) == 160);
  CHECK(representative_length(LengthBucket::Mid) == 416);
  CHECK(representative_length(LengthBucket::Long) == 640);
}

TEST_CASE("answer space invariants are enforced") {
  AnswerSpace bad;
  bad.step_grid = {10, 10};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.step_grid = {10, 60};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = AnswerSpace{};
  bad.quality_labels.erase(30);
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_NOTHROW(AnswerSpace{}.validate());
  CHECK_NOTHROW(AnswerSpace::single_step(50).validate());
}

TEST_CASE("video sample validation catches shape defects") {
  VideoSample s;
  s.id = "x";
  s.frames = {{1.0, 2.0}, {3.0, 4.0}};
  s.meta.frame_count = 2;
  CHECK_NOTHROW(s.validate());
  s.meta.frame_count = 3;
  CHECK_THROWS_AS(s.validate(), Error);
  s.meta.frame_count = 2;
  s.frames[1] = {1.0};
  CHECK_THROWS_AS(s.validate(), Error);
}
