#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "vidrl/artifacts.hpp"
#include "vidrl/core.hpp"
#include "vidrl/datagen.hpp"
#include "vidrl/objectives.hpp"
#include "vidrl/rewards.hpp"

namespace vidrl {

using json = nlohmann::json;

struct IOFailure : Error {
  explicit IOFailure(const std::string& msg) : Error(msg) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};
struct MalformedRecord : Error {
  MalformedRecord(size_t line, const std::string& msg)
      : Error("line " + std::to_string(line) + ": " + msg), line_number(line) {}
  size_t line_number;
};

// Throws ConfigError when obj carries a key outside `allowed`.
void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& context);

// ----------------------------------------------------------------------------
// Type <-> json (configs parse strictly: unknown keys are an error)

json to_json(const AnswerSpace& space);
AnswerSpace answer_space_from_json(const json& j);

json to_json(const ArtifactRecord& record);
ArtifactRecord artifact_record_from_json(const json& j);

json sample_to_json(const VideoSample& sample, Split split);
std::pair<VideoSample, Split> sample_from_json(const json& j);

json to_json(const DatagenConfig& cfg);
DatagenConfig datagen_config_from_json(const json& j);

json to_json(const RewardConfig& cfg);
RewardConfig reward_config_from_json(const json& j);

json to_json(const ObjectiveConfig& cfg);
ObjectiveConfig objective_config_from_json(const json& j);

json to_json(const ArtifactConfig& cfg);
ArtifactConfig artifact_config_from_json(const json& j);

json to_json(const PreferencePair& pair);
PreferencePair preference_pair_from_json(const json& j);

// ----------------------------------------------------------------------------
// Files

json load_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);
std::vector<json> load_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records);

// Corpus directory layout: samples.jsonl + manifest.json.
void save_corpus(const Corpus& corpus, const std::filesystem::path& dir);
Corpus load_corpus(const std::filesystem::path& dir);

void save_preference_pairs(const std::vector<PreferencePair>& pairs,
                           const std::filesystem::path& path);
std::vector<PreferencePair> load_preference_pairs(const std::filesystem::path& path);

}  // namespace vidrl
