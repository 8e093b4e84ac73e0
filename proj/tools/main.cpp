// Command-line front end: dataset generation, artifact injection, training,
// evaluation, transcript scoring, reward tables, and report rendering.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vidrl/artifacts.hpp"
#include "vidrl/datagen.hpp"
#include "vidrl/harness.hpp"
#include "vidrl/io.hpp"
#include "vidrl/rewards.hpp"
#include "vidrl/rng.hpp"
#include "vidrl/trainer.hpp"

namespace fs = std::filesystem;
using vidrl::json;

namespace {

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw vidrl::IOFailure("cannot open " + path.string() + " for writing");
  out << text;
}

int run_datagen(const std::string& config_path, const std::string& out_dir) {
  const vidrl::DatagenConfig cfg =
      vidrl::datagen_config_from_json(vidrl::load_json_file(config_path));
  const vidrl::Corpus corpus = vidrl::build_corpus(cfg);
  vidrl::save_corpus(corpus, out_dir);
  vidrl::save_preference_pairs(vidrl::build_preference_pairs(corpus),
                               fs::path(out_dir) / "preference_pairs.jsonl");
  std::cout << "wrote " << corpus.samples.size() << " samples ("
            << corpus.train_indices().size() << " train, "
            << corpus.test_indices().size() << " test) to " << out_dir << "\n";
  return 0;
}

int run_inject(const std::string& in_path, const std::string& out_path, uint64_t seed,
               const std::string& config_path) {
  vidrl::ArtifactConfig cfg;
  if (!config_path.empty())
    cfg = vidrl::artifact_config_from_json(vidrl::load_json_file(config_path));

  std::vector<json> out_records;
  uint64_t index = 0;
  for (const json& record : vidrl::load_jsonl(in_path)) {
    auto [sample, split] = vidrl::sample_from_json(record);
    std::mt19937_64 rng = vidrl::make_stream(seed, {index++});
    out_records.push_back(vidrl::sample_to_json(vidrl::inject(sample, cfg, rng), split));
  }
  vidrl::write_jsonl(out_path, out_records);
  std::cout << "injected " << out_records.size() << " samples to " << out_path << "\n";
  return 0;
}

int run_train(const std::string& mode_flag, const std::string& config_path,
              const std::string& data_dir, const std::string& out_dir,
              const std::string& resume_path) {
  json config_json = vidrl::load_json_file(config_path);
  if (!mode_flag.empty()) config_json["mode"] = mode_flag;
  const vidrl::TrainConfig cfg = vidrl::train_config_from_json(config_json);

  const vidrl::Corpus corpus = vidrl::load_corpus(data_dir);
  std::vector<vidrl::PreferencePair> pairs;
  if (cfg.mode == vidrl::TrainMode::DPO)
    pairs = vidrl::load_preference_pairs(fs::path(data_dir) / "preference_pairs.jsonl");

  const vidrl::AnswerCodec codec = vidrl::codec_for(corpus);
  fs::create_directories(out_dir);
  std::ofstream log_stream(fs::path(out_dir) / "log.jsonl");
  if (!log_stream) throw vidrl::IOFailure("cannot open training log for writing");

  const vidrl::StepSink sink = [&](const vidrl::TrainState& state, const json& record) {
    log_stream << record.dump() << "\n";
    if (cfg.checkpoint_every > 0 && state.step % cfg.checkpoint_every == 0 &&
        state.step < cfg.steps) {
      vidrl::save_checkpoint(
          state, cfg, codec,
          fs::path(out_dir) / ("checkpoint-" + std::to_string(state.step) + ".json"));
    }
  };

  vidrl::TrainResult result;
  if (!resume_path.empty()) {
    vidrl::LoadedCheckpoint loaded = vidrl::load_checkpoint(resume_path, cfg);
    result = vidrl::resume_training(std::move(loaded.state), corpus, pairs, cfg, sink);
  } else if (cfg.mode == vidrl::TrainMode::SFT) {
    result = vidrl::train_sft(corpus, cfg, sink);
  } else {
    vidrl::PolicyParams params0 =
        cfg.init_checkpoint.empty()
            ? vidrl::PolicyParams::zeros(codec.num_classes())
            : vidrl::load_checkpoint(cfg.init_checkpoint).state.params;
    result = cfg.mode == vidrl::TrainMode::DPO
                 ? vidrl::train_dpo(params0, corpus, pairs, cfg, sink)
                 : vidrl::train_grpo(params0, corpus, cfg, sink);
  }

  vidrl::save_checkpoint(result.state, cfg, codec, fs::path(out_dir) / "checkpoint.json");
  std::cout << "trained " << vidrl::to_string(cfg.mode) << " to step "
            << result.state.step << "; checkpoint and log written to " << out_dir << "\n";
  return 0;
}

int run_eval(const std::string& ckpt_path, const std::string& data_dir,
             const std::string& split_name, const std::string& out_path) {
  if (split_name != "train" && split_name != "test")
    throw vidrl::ConfigError("unrecognized split: \"" + split_name + "\"");
  const vidrl::LoadedCheckpoint loaded = vidrl::load_checkpoint(ckpt_path);
  const vidrl::Corpus corpus = vidrl::load_corpus(data_dir);
  const vidrl::Split split =
      split_name == "train" ? vidrl::Split::Train : vidrl::Split::Test;

  const vidrl::ToyPolicy policy(loaded.codec);
  const vidrl::EvalReport report =
      vidrl::evaluate(policy, loaded.state.params, corpus, split);
  vidrl::write_json_file(out_path, vidrl::to_json(report));
  std::cout << "top1=" << report.top1 << " recall=" << report.recall
            << " f1=" << report.f1 << " n=" << report.n << "\n";
  return 0;
}

int run_score(const std::string& transcripts_path, const std::string& out_path,
              const std::string& config_path) {
  vidrl::AnswerSpace space;
  if (!config_path.empty()) {
    const json j = vidrl::load_json_file(config_path);
    vidrl::reject_unknown_keys(j, {"space"}, "score config");
    if (j.contains("space")) space = vidrl::answer_space_from_json(j.at("space"));
  }
  const vidrl::EvalReport report = vidrl::score_transcripts(transcripts_path, space);
  vidrl::write_json_file(out_path, vidrl::to_json(report));
  std::cout << "top1=" << report.top1 << " parse_failures=" << report.parse_failures
            << " n=" << report.n << "\n";
  return 0;
}

int run_reward_table(const std::string& config_path, const std::string& out_path) {
  vidrl::AnswerSpace space;
  vidrl::RewardConfig reward;
  if (!config_path.empty()) {
    const json j = vidrl::load_json_file(config_path);
    vidrl::reject_unknown_keys(j, {"space", "reward"}, "reward-table config");
    if (j.contains("space")) space = vidrl::answer_space_from_json(j.at("space"));
    if (j.contains("reward")) reward = vidrl::reward_config_from_json(j.at("reward"));
  }
  std::ostringstream csv;
  vidrl::write_reward_table_csv(vidrl::reward_table(space, reward), csv);
  write_text_file(out_path, csv.str());
  std::cout << "wrote reward table to " << out_path << "\n";
  return 0;
}

int run_report(const std::string& log_path, const std::string& out_path) {
  const bool svg = fs::path(out_path).extension() == ".svg";

  // A single-object JSON file is an evaluation report; JSON-lines is a
  // training log.
  std::ifstream probe(log_path);
  if (!probe) throw vidrl::IOFailure("cannot open " + log_path);
  json whole;
  bool is_eval_report = false;
  try {
    probe >> whole;
    is_eval_report = whole.is_object() && whole.contains("confusion");
  } catch (const json::parse_error&) {
    is_eval_report = false;
  }

  if (is_eval_report) {
    std::ostringstream csv;
    vidrl::write_report_csv(vidrl::eval_report_from_json(whole), csv);
    write_text_file(out_path, csv.str());
  } else {
    const std::vector<json> log = vidrl::load_jsonl(log_path);
    if (svg) {
      write_text_file(out_path, vidrl::render_log_svg(log));
    } else {
      std::ostringstream csv;
      vidrl::write_log_csv(log, csv);
      write_text_file(out_path, csv.str());
    }
  }
  std::cout << "wrote report to " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale RL fine-tuning engine for video-authenticity tasks"};
  app.require_subcommand(1);

  std::string config_path, out_path, in_path, data_dir, mode, resume_path;
  std::string split_name = "test";
  uint64_t seed = 1;

  auto* datagen = app.add_subcommand("datagen", "generate a synthetic paired corpus");
  datagen->add_option("--config", config_path, "datagen config JSON")->required();
  datagen->add_option("--out", out_path, "output directory")->required();

  auto* inject = app.add_subcommand("inject", "inject temporal artifacts into samples");
  inject->add_option("--in", in_path, "input samples.jsonl")->required();
  inject->add_option("--out", out_path, "output samples.jsonl")->required();
  inject->add_option("--seed", seed, "master seed")->required();
  std::string inject_config;
  inject->add_option("--config", inject_config, "artifact config JSON (optional)");

  auto* train = app.add_subcommand("train", "run a training stage");
  train->add_option("--mode", mode, "sft|dpo|grpo|grpo-ta|grpo-q")
      ->check(CLI::IsMember({"sft", "dpo", "grpo", "grpo-ta", "grpo-q"}));
  train->add_option("--config", config_path, "train config JSON")->required();
  train->add_option("--data", data_dir, "corpus directory")->required();
  train->add_option("--out", out_path, "output directory")->required();
  train->add_option("--resume", resume_path, "checkpoint to resume from");

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a corpus split");
  eval->add_option("--ckpt", in_path, "checkpoint JSON")->required();
  eval->add_option("--data", data_dir, "corpus directory")->required();
  eval->add_option("--split", split_name, "train|test (default test)");
  eval->add_option("--out", out_path, "output report JSON")->required();

  auto* score = app.add_subcommand("score", "score externally produced transcripts");
  score->add_option("--transcripts", in_path, "JSON-lines transcript records")->required();
  score->add_option("--out", out_path, "output report JSON")->required();
  score->add_option("--config", config_path, "optional config with an answer space");

  auto* table = app.add_subcommand("reward-table", "emit the quality-reward matrix");
  table->add_option("--config", config_path, "optional config with space/reward");
  table->add_option("--out", out_path, "output CSV")->required();

  auto* report = app.add_subcommand("report", "render CSV or SVG from logs/reports");
  report->add_option("--log", in_path, "training log or eval report")->required();
  report->add_option("--out", out_path, "output .csv or .svg")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(datagen)) return run_datagen(config_path, out_path);
    if (app.got_subcommand(inject)) return run_inject(in_path, out_path, seed, inject_config);
    if (app.got_subcommand(train))
      return run_train(mode, config_path, data_dir, out_path, resume_path);
    if (app.got_subcommand(eval)) return run_eval(in_path, data_dir, split_name, out_path);
    if (app.got_subcommand(score)) return run_score(in_path, out_path, config_path);
    if (app.got_subcommand(table)) return run_reward_table(config_path, out_path);
    if (app.got_subcommand(report)) return run_report(in_path, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
