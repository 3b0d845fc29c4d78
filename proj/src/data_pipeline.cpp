#include "todsim/data_pipeline.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "todsim/errors.hpp"
#include "todsim/rng.hpp"
#include "todsim/text.hpp"

namespace todsim {
namespace {

std::string composite_dialogue_id(const DialogueTranscript& transcript) {
  const auto& meta = transcript.metadata();
  const auto it = meta.find("dialogue_index");
  if (it != meta.end()) return transcript.goal_id() + "#" + it->second;
  return transcript.goal_id();
}

}  // namespace

std::vector<TrainingRecord> decompose_dialogue(const UserGoal& goal,
                                               const DialogueTranscript& transcript,
                                               const PromptTemplate& tmpl) {
  if (transcript.exchanges() < 1) throw EmptyDialogue();

  PromptTemplate zero_shot = tmpl;
  zero_shot.shot_count = 0;  // training records teach the format directly

  std::vector<TrainingRecord> records;
  DialogueTranscript history(transcript.goal_id());
  const auto& utterances = transcript.utterances();
  for (std::size_t i = 0; i + 1 < utterances.size(); i += 2) {
    const Utterance& system = utterances[i];
    const Utterance& user = utterances[i + 1];
    history.append(Speaker::system, system.text);
    TrainingRecord record;
    record.prompt = build_prompt(zero_shot, goal, history);
    record.completion = user.text + zero_shot.separator;
    record.dialogue_id = composite_dialogue_id(transcript);
    record.turn = user.turn_index;
    record.subtask = goal.subtask;
    records.push_back(std::move(record));
    history.append(Speaker::user, user.text);
  }
  return records;
}

CorpusSplits split_corpus(const std::vector<DialogueTranscript>& corpus, const SplitSpec& spec) {
  const std::size_t wanted = spec.train_size + spec.test_size + spec.val_size;
  if (wanted > corpus.size()) throw InsufficientCorpus(wanted, corpus.size());

  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(mix_seed(spec.seed, 0x5b17));
  for (std::size_t i = order.size(); i > 1; --i) {  // Fisher-Yates
    std::swap(order[i - 1], order[rng.uniform(i)]);
  }

  CorpusSplits splits;
  std::size_t cursor = 0;
  const auto take = [&](std::size_t count) {
    std::vector<DialogueTranscript> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(corpus[order[cursor++]]);
    return out;
  };
  splits.train = take(spec.train_size);
  splits.test = take(spec.test_size);
  splits.val = take(spec.val_size);
  return splits;
}

std::vector<DialogueTranscript> filter_by_subtask(
    const std::vector<DialogueTranscript>& corpus, const std::set<Subtask>& keep,
    const std::map<std::string, UserGoal>& goals_by_id) {
  std::vector<DialogueTranscript> out;
  for (const DialogueTranscript& transcript : corpus) {
    const auto goal_it = goals_by_id.find(transcript.goal_id());
    if (goal_it == goals_by_id.end() || !goal_it->second.subtask.has_value()) {
      throw MissingSubtaskLabel(composite_dialogue_id(transcript));
    }
    if (keep.count(*goal_it->second.subtask) > 0) out.push_back(transcript);
  }
  return out;
}

void export_records(const std::vector<TrainingRecord>& records,
                    const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const TrainingRecord& record : records) {
    nlohmann::json line;
    line["prompt"] = record.prompt;
    line["completion"] = record.completion;
    line["meta"]["dialogue_id"] = record.dialogue_id;
    line["meta"]["turn"] = record.turn;
    if (record.subtask) line["meta"]["subtask"] = to_string(*record.subtask);
    out << line.dump() << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<TrainingRecord> import_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<TrainingRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto parsed = nlohmann::json::parse(line);
      TrainingRecord record;
      record.prompt = parsed.at("prompt").get<std::string>();
      record.completion = parsed.at("completion").get<std::string>();
      const auto& meta = parsed.at("meta");
      record.dialogue_id = meta.at("dialogue_id").get<std::string>();
      record.turn = meta.at("turn").get<int>();
      if (meta.contains("subtask") && !meta.at("subtask").is_null()) {
        record.subtask = subtask_from_string(meta.at("subtask").get<std::string>());
      }
      records.push_back(std::move(record));
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(line_no, ex.what());
    }
  }
  return records;
}

FinetuneManifest write_manifest(const FinetuneParams& params,
                                const std::filesystem::path& dataset_path,
                                const std::filesystem::path& manifest_path) {
  std::ifstream dataset(dataset_path, std::ios::binary);
  if (!dataset) throw IoError("dataset file missing: " + dataset_path.string());
  std::ostringstream contents;
  contents << dataset.rdbuf();

  FinetuneManifest manifest;
  manifest.params = params;
  manifest.dataset_path = dataset_path.string();
  manifest.dataset_digest = "fnv1a64:" + fnv1a64_hex(contents.str());

  nlohmann::json out;
  out["method"] = params.method;
  out["rank"] = params.rank;
  out["alpha"] = params.alpha;
  out["dropout"] = params.dropout;
  out["learning_rate"] = params.learning_rate;
  out["batch_size"] = params.batch_size;
  out["base_model"] = params.base_model;
  out["dataset"] = {{"path", manifest.dataset_path}, {"digest", manifest.dataset_digest}};

  std::ofstream file(manifest_path);
  if (!file) throw IoError("cannot write " + manifest_path.string());
  file << out.dump(2) << '\n';
  return manifest;
}

}  // namespace todsim
