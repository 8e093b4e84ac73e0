#include "vidrl/io.hpp"

#include <fstream>
#include <sstream>

namespace vidrl {

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& context) {
  if (!obj.is_object()) throw ConfigError(context + ": expected a JSON object");
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      throw ConfigError(context + ": unknown key \"" + item.key() + "\"");
  }
}

// ----------------------------------------------------------------------------
// AnswerSpace

json to_json(const AnswerSpace& space) {
  json labels = json::object();
  for (const auto& [step, grade] : space.quality_labels)
    labels[std::to_string(step)] = grade;
  return {{"max_step", space.max_step},
          {"step_grid", space.step_grid},
          {"quality_labels", labels}};
}

AnswerSpace answer_space_from_json(const json& j) {
  reject_unknown_keys(j, {"max_step", "step_grid", "quality_labels"}, "space");
  AnswerSpace space;
  if (j.contains("max_step")) space.max_step = j.at("max_step").get<int>();
  if (j.contains("step_grid")) space.step_grid = j.at("step_grid").get<std::vector<int>>();
  if (j.contains("quality_labels")) {
    space.quality_labels.clear();
    for (const auto& item : j.at("quality_labels").items())
      space.quality_labels[std::stoi(item.key())] = item.value().get<double>();
  } else if (j.contains("step_grid")) {
    // Derive even grades when only a grid is given; last step keeps 95%.
    space.quality_labels.clear();
    const AnswerSpace defaults;
    for (int s : space.step_grid) {
      const auto it = defaults.quality_labels.find(s);
      space.quality_labels[s] =
          it != defaults.quality_labels.end()
              ? it->second
              : 100.0 * static_cast<double>(s) / static_cast<double>(space.max_step);
    }
  }
  space.validate();
  return space;
}

// ----------------------------------------------------------------------------
// Artifacts

json to_json(const ArtifactRecord& record) {
  return {{"kind", to_string(record.kind)},
          {"window_start", record.window_start},
          {"window_len", record.window_len},
          {"source_truth", to_string(record.source_truth)}};
}

namespace {

AnswerLabel label_from_string(const std::string& text) {
  // Label strings in files may carry any positive step; grid membership is
  // checked against the corpus space by consumers that need it.
  if (text == "real") return AnswerLabel::real();
  if (text == "fake") return AnswerLabel::fake();
  if (text.rfind("fake-", 0) == 0) return AnswerLabel::fake_step(std::stoi(text.substr(5)));
  throw ParseFailure("unrecognized label: \"" + text + "\"");
}

}  // namespace

ArtifactRecord artifact_record_from_json(const json& j) {
  reject_unknown_keys(j, {"kind", "window_start", "window_len", "source_truth"},
                      "artifact");
  ArtifactRecord record;
  record.kind = artifact_kind_from_string(j.at("kind").get<std::string>());
  record.window_start = j.at("window_start").get<int>();
  record.window_len = j.at("window_len").get<int>();
  record.source_truth = label_from_string(j.at("source_truth").get<std::string>());
  return record;
}

// ----------------------------------------------------------------------------
// Samples

json sample_to_json(const VideoSample& sample, Split split) {
  json j = {{"id", sample.id},
            {"pair_id", sample.pair_id},
            {"truth", to_string(sample.truth)},
            {"split", split == Split::Test ? "test" : "train"},
            {"meta",
             {{"frame_count", sample.meta.frame_count},
              {"fps", sample.meta.fps},
              {"width", sample.meta.width},
              {"height", sample.meta.height}}},
            {"frames", sample.frames}};
  if (sample.artifact) j["artifact"] = to_json(*sample.artifact);
  return j;
}

std::pair<VideoSample, Split> sample_from_json(const json& j) {
  reject_unknown_keys(j, {"id", "pair_id", "truth", "split", "meta", "frames", "artifact"},
                      "sample");
  VideoSample sample;
  sample.id = j.at("id").get<std::string>();
  sample.pair_id = j.at("pair_id").get<std::string>();
  sample.truth = label_from_string(j.at("truth").get<std::string>());
  const json& meta = j.at("meta");
  reject_unknown_keys(meta, {"frame_count", "fps", "width", "height"}, "meta");
  sample.meta.frame_count = meta.at("frame_count").get<int>();
  sample.meta.fps = meta.at("fps").get<double>();
  sample.meta.width = meta.at("width").get<int>();
  sample.meta.height = meta.at("height").get<int>();
  sample.frames = j.at("frames").get<std::vector<Frame>>();
  if (j.contains("artifact")) sample.artifact = artifact_record_from_json(j.at("artifact"));
  const std::string split = j.at("split").get<std::string>();
  if (split != "train" && split != "test")
    throw ParseFailure("unrecognized split: \"" + split + "\"");
  return {std::move(sample), split == "test" ? Split::Test : Split::Train};
}

// ----------------------------------------------------------------------------
// Configs

json to_json(const DatagenConfig& cfg) {
  return {{"n_pairs", cfg.n_pairs},
          {"frame_count", cfg.frame_count},
          {"fps", cfg.fps},
          {"width", cfg.width},
          {"height", cfg.height},
          {"feature_dim", cfg.feature_dim},
          {"noise_base", cfg.noise_base},
          {"seed", cfg.seed},
          {"quality_mode", cfg.quality_mode},
          {"test_fraction", cfg.test_fraction},
          {"space", to_json(cfg.space)}};
}

DatagenConfig datagen_config_from_json(const json& j) {
  reject_unknown_keys(j,
                      {"n_pairs", "frame_count", "fps", "width", "height", "feature_dim",
                       "noise_base", "seed", "quality_mode", "test_fraction", "space"},
                      "datagen config");
  DatagenConfig cfg;
  if (j.contains("n_pairs")) cfg.n_pairs = j.at("n_pairs").get<int>();
  if (j.contains("frame_count")) cfg.frame_count = j.at("frame_count").get<int>();
  if (j.contains("fps")) cfg.fps = j.at("fps").get<double>();
  if (j.contains("width")) cfg.width = j.at("width").get<int>();
  if (j.contains("height")) cfg.height = j.at("height").get<int>();
  if (j.contains("feature_dim")) cfg.feature_dim = j.at("feature_dim").get<int>();
  if (j.contains("noise_base")) cfg.noise_base = j.at("noise_base").get<double>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
  if (j.contains("quality_mode")) cfg.quality_mode = j.at("quality_mode").get<bool>();
  if (j.contains("test_fraction")) cfg.test_fraction = j.at("test_fraction").get<double>();
  if (j.contains("space")) cfg.space = answer_space_from_json(j.at("space"));
  cfg.validate();
  return cfg;
}

json to_json(const RewardConfig& cfg) {
  return {{"alpha1", cfg.alpha1}, {"alpha2", cfg.alpha2}, {"mu", cfg.mu},
          {"delta", cfg.delta},   {"omega", cfg.omega},   {"l_min", cfg.l_min},
          {"l_max", cfg.l_max}};
}

RewardConfig reward_config_from_json(const json& j) {
  reject_unknown_keys(j, {"alpha1", "alpha2", "mu", "delta", "omega", "l_min", "l_max"},
                      "reward config");
  RewardConfig cfg;
  if (j.contains("alpha1")) cfg.alpha1 = j.at("alpha1").get<double>();
  if (j.contains("alpha2")) cfg.alpha2 = j.at("alpha2").get<double>();
  if (j.contains("mu")) cfg.mu = j.at("mu").get<double>();
  if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
  if (j.contains("omega")) cfg.omega = j.at("omega").get<double>();
  if (j.contains("l_min")) cfg.l_min = j.at("l_min").get<int>();
  if (j.contains("l_max")) cfg.l_max = j.at("l_max").get<int>();
  cfg.validate();
  return cfg;
}

json to_json(const ObjectiveConfig& cfg) {
  return {{"beta_dpo", cfg.beta_dpo},
          {"beta_kl", cfg.beta_kl},
          {"clip_eps", cfg.clip_eps},
          {"sigma_floor", cfg.sigma_floor}};
}

ObjectiveConfig objective_config_from_json(const json& j) {
  reject_unknown_keys(j, {"beta_dpo", "beta_kl", "clip_eps", "sigma_floor"},
                      "objective config");
  ObjectiveConfig cfg;
  if (j.contains("beta_dpo")) cfg.beta_dpo = j.at("beta_dpo").get<double>();
  if (j.contains("beta_kl")) cfg.beta_kl = j.at("beta_kl").get<double>();
  if (j.contains("clip_eps")) cfg.clip_eps = j.at("clip_eps").get<double>();
  if (j.contains("sigma_floor")) cfg.sigma_floor = j.at("sigma_floor").get<double>();
  cfg.validate();
  return cfg;
}

json to_json(const ArtifactConfig& cfg) {
  return {{"p_repeat", cfg.p_repeat},
          {"center_mean_frac", cfg.center_mean_frac},
          {"center_std_frac", cfg.center_std_frac},
          {"len_min_frac", cfg.len_min_frac},
          {"len_max_frac", cfg.len_max_frac}};
}

ArtifactConfig artifact_config_from_json(const json& j) {
  reject_unknown_keys(
      j, {"p_repeat", "center_mean_frac", "center_std_frac", "len_min_frac", "len_max_frac"},
      "artifact config");
  ArtifactConfig cfg;
  if (j.contains("p_repeat")) cfg.p_repeat = j.at("p_repeat").get<double>();
  if (j.contains("center_mean_frac"))
    cfg.center_mean_frac = j.at("center_mean_frac").get<double>();
  if (j.contains("center_std_frac"))
    cfg.center_std_frac = j.at("center_std_frac").get<double>();
  if (j.contains("len_min_frac")) cfg.len_min_frac = j.at("len_min_frac").get<double>();
  if (j.contains("len_max_frac")) cfg.len_max_frac = j.at("len_max_frac").get<double>();
  cfg.validate();
  return cfg;
}

// ----------------------------------------------------------------------------
// Preference pairs

json to_json(const PreferencePair& pair) {
  return {{"input_id", pair.input_id},
          {"preferred",
           {{"answer", to_string(pair.preferred.answer)},
            {"transcript", pair.preferred.transcript}}},
          {"dispreferred",
           {{"answer", to_string(pair.dispreferred.answer)},
            {"transcript", pair.dispreferred.transcript}}}};
}

PreferencePair preference_pair_from_json(const json& j) {
  reject_unknown_keys(j, {"input_id", "preferred", "dispreferred"}, "preference pair");
  auto side = [](const json& s) {
    reject_unknown_keys(s, {"answer", "transcript"}, "preference side");
    return PreferenceSide{label_from_string(s.at("answer").get<std::string>()),
                          s.at("transcript").get<std::string>()};
  };
  return {j.at("input_id").get<std::string>(), side(j.at("preferred")),
          side(j.at("dispreferred"))};
}

// ----------------------------------------------------------------------------
// Files

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IOFailure("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw IOFailure("cannot parse " + path.string() + ": " + e.what());
  }
  return j;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IOFailure("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IOFailure("write failed: " + path.string());
}

std::vector<json> load_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IOFailure("cannot open " + path.string());
  std::vector<json> records;
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    try {
      records.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw MalformedRecord(line_number, e.what());
    }
  }
  return records;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records) {
  std::ofstream out(path);
  if (!out) throw IOFailure("cannot open " + path.string() + " for writing");
  for (const json& r : records) out << r.dump() << "\n";
  if (!out) throw IOFailure("write failed: " + path.string());
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<json> records;
  records.reserve(corpus.samples.size());
  for (size_t i = 0; i < corpus.samples.size(); ++i)
    records.push_back(sample_to_json(corpus.samples[i], corpus.splits[i]));
  write_jsonl(dir / "samples.jsonl", records);

  json manifest = {{"config", to_json(corpus.cfg)},
                   {"n_samples", corpus.samples.size()},
                   {"n_train", corpus.train_indices().size()},
                   {"n_test", corpus.test_indices().size()}};
  write_json_file(dir / "manifest.json", manifest);
}

Corpus load_corpus(const std::filesystem::path& dir) {
  const json manifest = load_json_file(dir / "manifest.json");
  Corpus corpus;
  corpus.cfg = datagen_config_from_json(manifest.at("config"));
  size_t line_number = 0;
  for (const json& record : load_jsonl(dir / "samples.jsonl")) {
    ++line_number;
    try {
      auto [sample, split] = sample_from_json(record);
      corpus.samples.push_back(std::move(sample));
      corpus.splits.push_back(split);
    } catch (const json::exception& e) {
      throw MalformedRecord(line_number, e.what());
    }
  }
  corpus.rebuild_index();
  return corpus;
}

void save_preference_pairs(const std::vector<PreferencePair>& pairs,
                           const std::filesystem::path& path) {
  std::vector<json> records;
  records.reserve(pairs.size());
  for (const PreferencePair& p : pairs) records.push_back(to_json(p));
  write_jsonl(path, records);
}

std::vector<PreferencePair> load_preference_pairs(const std::filesystem::path& path) {
  std::vector<PreferencePair> pairs;
  size_t line_number = 0;
  for (const json& record : load_jsonl(path)) {
    ++line_number;
    try {
      pairs.push_back(preference_pair_from_json(record));
    } catch (const json::exception& e) {
      throw MalformedRecord(line_number, e.what());
    }
  }
  return pairs;
}

}  // namespace vidrl
