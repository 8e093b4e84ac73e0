#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vidrl/datagen.hpp"
#include "vidrl/io.hpp"
#include "vidrl/policy.hpp"

namespace vidrl {

// Benchmark-style metrics; "fake" is the positive class for recall/F1.
struct EvalReport {
  int n = 0;
  double top1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int tp = 0, fn = 0, fp = 0, tn = 0;  // positive = fake
  std::map<std::string, double> per_source;  // truth-label tag -> top1
  std::optional<double> step_mae;  // mean |s(pred)-s(truth)| over fake-classified fakes
  int parse_failures = 0;
};

// recall/precision/F1/top1 from a confusion matrix.
EvalReport metrics_from_confusion(int tp, int fn, int fp, int tn);

// Greedy argmax decoding over the corpus split.
EvalReport evaluate(const ToyPolicy& policy, const PolicyParams& params,
                    const Corpus& corpus, Split split);

// Scores externally produced transcripts: JSON-lines {"id","truth","transcript"}.
// A ParseFailure counts as an incorrect prediction.
EvalReport score_transcripts(const std::filesystem::path& path, const AnswerSpace& space);

json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const json& j);

// Flat metric rows, then one row per source tag.
void write_report_csv(const EvalReport& report, std::ostream& os);

// Self-contained SVG of the numeric series in a training log. Byte-identical
// across regenerations from the same log.
std::string render_log_svg(const std::vector<json>& log);

// Per-step CSV of a training log's numeric columns.
void write_log_csv(const std::vector<json>& log, std::ostream& os);

}  // namespace vidrl
