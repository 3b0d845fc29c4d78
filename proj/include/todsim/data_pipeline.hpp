#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "todsim/dialogue.hpp"
#include "todsim/goal.hpp"
#include "todsim/prompting.hpp"

namespace todsim {

// One (prompt, completion) pair from the turn-level decomposition.
struct TrainingRecord {
  std::string prompt;      // ends with the user-speaker cue
  std::string completion;  // u_t followed by the separator
  std::string dialogue_id;
  int turn = 1;
  std::optional<Subtask> subtask;

  bool operator==(const TrainingRecord&) const = default;
};

// One record per completed exchange: record t's prompt covers the history
// through s_t (zero shots), its completion is u_t plus the separator.
std::vector<TrainingRecord> decompose_dialogue(const UserGoal& goal,
                                               const DialogueTranscript& transcript,
                                               const PromptTemplate& tmpl);

struct SplitSpec {
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t val_size = 0;
  std::uint64_t seed = 0;
};

struct CorpusSplits {
  std::vector<DialogueTranscript> train;
  std::vector<DialogueTranscript> test;
  std::vector<DialogueTranscript> val;
};

// Disjoint dialogue-level splits of the exact requested sizes via a seeded
// shuffle.
CorpusSplits split_corpus(const std::vector<DialogueTranscript>& corpus, const SplitSpec& spec);

// Keeps dialogues whose goal subtask is in `keep`, order preserved. Every
// dialogue's goal must carry a subtask label.
std::vector<DialogueTranscript> filter_by_subtask(
    const std::vector<DialogueTranscript>& corpus, const std::set<Subtask>& keep,
    const std::map<std::string, UserGoal>& goals_by_id);

void export_records(const std::vector<TrainingRecord>& records,
                    const std::filesystem::path& path);
std::vector<TrainingRecord> import_records(const std::filesystem::path& path);

struct FinetuneParams {
  std::string method = "lora";
  int rank = 64;
  double alpha = 32.0;
  double dropout = 0.05;
  double learning_rate = 3e-5;
  int batch_size = 12;
  std::string base_model = "llama-2-13b";
};

struct FinetuneManifest {
  FinetuneParams params;
  std::string dataset_path;
  std::string dataset_digest;  // fnv1a64 over the dataset bytes
};

// Writes the manifest JSON next to nothing in particular; the digest pins the
// dataset contents the hyperparameters were chosen for.
FinetuneManifest write_manifest(const FinetuneParams& params,
                                const std::filesystem::path& dataset_path,
                                const std::filesystem::path& manifest_path);

}  // namespace todsim
