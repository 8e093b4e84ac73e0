#include "vidrl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace vidrl {

EvalReport metrics_from_confusion(int tp, int fn, int fp, int tn) {
  EvalReport r;
  r.tp = tp;
  r.fn = fn;
  r.fp = fp;
  r.tn = tn;
  r.n = tp + fn + fp + tn;
  r.top1 = r.n > 0 ? static_cast<double>(tp + tn) / r.n : 0.0;
  r.precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  r.recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  r.f1 = 2 * tp + fp + fn > 0 ? 2.0 * tp / (2.0 * tp + fp + fn) : 0.0;
  return r;
}

namespace {

struct Tally {
  int tp = 0, fn = 0, fp = 0, tn = 0;
  std::map<std::string, std::pair<int, int>> per_source;  // tag -> (correct, total)
  double step_err_sum = 0.0;
  int step_err_count = 0;
  int parse_failures = 0;

  void add(const AnswerLabel& truth, const std::optional<AnswerLabel>& pred,
           const AnswerSpace& space) {
    // An unparseable prediction counts as the wrong kind.
    const bool predicted_fake =
        pred ? pred->kind == Kind::Fake : truth.kind != Kind::Fake;
    if (!pred) ++parse_failures;

    if (truth.kind == Kind::Fake) {
      predicted_fake ? ++tp : ++fn;
    } else {
      predicted_fake ? ++fp : ++tn;
    }
    const bool correct = pred && is_binary_correct(*pred, truth);
    auto& [src_correct, src_total] = per_source[to_string(truth)];
    src_total += 1;
    src_correct += correct ? 1 : 0;

    if (pred && truth.kind == Kind::Fake && pred->kind == Kind::Fake && truth.step &&
        pred->step) {
      step_err_sum += std::abs(progress(*pred, space) - progress(truth, space));
      ++step_err_count;
    }
  }

  EvalReport report() const {
    EvalReport r = metrics_from_confusion(tp, fn, fp, tn);
    for (const auto& [tag, counts] : per_source)
      r.per_source[tag] = counts.second > 0
                              ? static_cast<double>(counts.first) / counts.second
                              : 0.0;
    if (step_err_count > 0) r.step_mae = step_err_sum / step_err_count;
    r.parse_failures = parse_failures;
    return r;
  }
};

}  // namespace

EvalReport evaluate(const ToyPolicy& policy, const PolicyParams& params,
                    const Corpus& corpus, Split split) {
  Tally tally;
  int count = 0;
  for (size_t i = 0; i < corpus.samples.size(); ++i) {
    if (corpus.splits[i] != split) continue;
    ++count;
    const VideoSample& sample = corpus.samples[i];
    const AnswerLabel pred = policy.greedy_answer(params, featurize(sample));
    tally.add(sample.truth, pred, corpus.cfg.space);
  }
  if (count == 0) throw EmptySplit(split == Split::Test ? "test" : "train");
  return tally.report();
}

EvalReport score_transcripts(const std::filesystem::path& path,
                             const AnswerSpace& space) {
  Tally tally;
  size_t line_number = 0;
  for (const json& record : load_jsonl(path)) {
    ++line_number;
    std::string truth_text, transcript;
    try {
      reject_unknown_keys(record, {"id", "truth", "transcript"}, "transcript record");
      record.at("id").get<std::string>();
      truth_text = record.at("truth").get<std::string>();
      transcript = record.at("transcript").get<std::string>();
    } catch (const json::exception& e) {
      throw MalformedRecord(line_number, e.what());
    } catch (const ConfigError& e) {
      throw MalformedRecord(line_number, e.what());
    }
    AnswerLabel truth;
    try {
      truth = parse_label(truth_text, space);
    } catch (const ParseFailure& e) {
      throw MalformedRecord(line_number, e.what());
    }
    tally.add(truth, try_parse_answer(transcript, space), space);
  }
  if (tally.tp + tally.fn + tally.fp + tally.tn == 0) throw EmptySplit("transcripts");
  return tally.report();
}

json to_json(const EvalReport& report) {
  json j = {{"n", report.n},
            {"top1", report.top1},
            {"precision", report.precision},
            {"recall", report.recall},
            {"f1", report.f1},
            {"confusion", {{"tp", report.tp}, {"fn", report.fn}, {"fp", report.fp}, {"tn", report.tn}}},
            {"per_source", report.per_source},
            {"parse_failures", report.parse_failures}};
  if (report.step_mae) j["step_mae"] = *report.step_mae;
  return j;
}

EvalReport eval_report_from_json(const json& j) {
  EvalReport r;
  r.n = j.at("n").get<int>();
  r.top1 = j.at("top1").get<double>();
  r.precision = j.at("precision").get<double>();
  r.recall = j.at("recall").get<double>();
  r.f1 = j.at("f1").get<double>();
  const json& c = j.at("confusion");
  r.tp = c.at("tp").get<int>();
  r.fn = c.at("fn").get<int>();
  r.fp = c.at("fp").get<int>();
  r.tn = c.at("tn").get<int>();
  r.per_source = j.at("per_source").get<std::map<std::string, double>>();
  r.parse_failures = j.at("parse_failures").get<int>();
  if (j.contains("step_mae")) r.step_mae = j.at("step_mae").get<double>();
  return r;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

void write_report_csv(const EvalReport& report, std::ostream& os) {
  os << "metric,value\n";
  os << "n," << report.n << "\n";
  os << "top1," << fmt(report.top1) << "\n";
  os << "precision," << fmt(report.precision) << "\n";
  os << "recall," << fmt(report.recall) << "\n";
  os << "f1," << fmt(report.f1) << "\n";
  os << "tp," << report.tp << "\n";
  os << "fn," << report.fn << "\n";
  os << "fp," << report.fp << "\n";
  os << "tn," << report.tn << "\n";
  os << "parse_failures," << report.parse_failures << "\n";
  if (report.step_mae) os << "step_mae," << fmt(*report.step_mae) << "\n";
  for (const auto& [tag, top1] : report.per_source)
    os << "top1[" << tag << "]," << fmt(top1) << "\n";
}

// ----------------------------------------------------------------------------
// Training-log rendering

namespace {

std::vector<std::string> numeric_columns(const std::vector<json>& log) {
  std::set<std::string> keys;
  for (const json& record : log)
    for (const auto& item : record.items())
      if (item.key() != "step" && item.value().is_number()) keys.insert(item.key());
  return {keys.begin(), keys.end()};
}

const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

}  // namespace

void write_log_csv(const std::vector<json>& log, std::ostream& os) {
  const std::vector<std::string> cols = numeric_columns(log);
  os << "step";
  for (const std::string& c : cols) os << "," << c;
  os << "\n";
  for (const json& record : log) {
    os << record.value("step", 0);
    for (const std::string& c : cols) {
      os << ",";
      if (record.contains(c)) os << fmt(record.at(c).get<double>());
    }
    os << "\n";
  }
}

std::string render_log_svg(const std::vector<json>& log) {
  constexpr int width = 860, height = 420;
  constexpr int margin_l = 60, margin_r = 150, margin_t = 20, margin_b = 40;
  const int plot_w = width - margin_l - margin_r;
  const int plot_h = height - margin_t - margin_b;

  const std::vector<std::string> cols = numeric_columns(log);

  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  bool first = true;
  for (const json& record : log) {
    const double step = record.value("step", 0);
    for (const std::string& c : cols) {
      if (!record.contains(c)) continue;
      const double v = record.at(c).get<double>();
      if (!std::isfinite(v)) continue;
      if (first) {
        x_min = x_max = step;
        y_min = y_max = v;
        first = false;
      } else {
        x_min = std::min(x_min, step);
        x_max = std::max(x_max, step);
        y_min = std::min(y_min, v);
        y_max = std::max(y_max, v);
      }
    }
  }
  if (x_max <= x_min) x_max = x_min + 1.0;
  if (y_max <= y_min) y_max = y_min + 1.0;

  auto px = [&](double step) {
    return margin_l + plot_w * (step - x_min) / (x_max - x_min);
  };
  auto py = [&](double v) {
    return margin_t + plot_h * (1.0 - (v - y_min) / (y_max - y_min));
  };
  auto coord = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
         std::to_string(width) + " " + std::to_string(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<rect x=\"" + std::to_string(margin_l) + "\" y=\"" + std::to_string(margin_t) +
         "\" width=\"" + std::to_string(plot_w) + "\" height=\"" + std::to_string(plot_h) +
         "\" fill=\"none\" stroke=\"#cccccc\"/>\n";

  // Axis extents as text labels.
  svg += "<text x=\"" + std::to_string(margin_l) + "\" y=\"" +
         std::to_string(height - margin_b + 16) + "\" font-size=\"11\">" + coord(x_min) +
         "</text>\n";
  svg += "<text x=\"" + std::to_string(margin_l + plot_w - 30) + "\" y=\"" +
         std::to_string(height - margin_b + 16) + "\" font-size=\"11\">" + coord(x_max) +
         "</text>\n";
  svg += "<text x=\"4\" y=\"" + std::to_string(margin_t + 10) + "\" font-size=\"11\">" +
         coord(y_max) + "</text>\n";
  svg += "<text x=\"4\" y=\"" + std::to_string(margin_t + plot_h) +
         "\" font-size=\"11\">" + coord(y_min) + "</text>\n";

  for (size_t s = 0; s < cols.size(); ++s) {
    const char* color = kSeriesColors[s % (sizeof(kSeriesColors) / sizeof(char*))];
    std::string points;
    for (const json& record : log) {
      if (!record.contains(cols[s])) continue;
      const double v = record.at(cols[s]).get<double>();
      if (!std::isfinite(v)) continue;
      if (!points.empty()) points += " ";
      points += coord(px(record.value("step", 0))) + "," + coord(py(v));
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    const int ly = margin_t + 16 + static_cast<int>(s) * 18;
    svg += "<rect x=\"" + std::to_string(width - margin_r + 12) + "\" y=\"" +
           std::to_string(ly - 9) + "\" width=\"12\" height=\"4\" fill=\"" + color +
           "\"/>\n";
    svg += "<text x=\"" + std::to_string(width - margin_r + 30) + "\" y=\"" +
           std::to_string(ly) + "\" font-size=\"12\">" + cols[s] + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace vidrl
