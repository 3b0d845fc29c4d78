#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace todsim {

enum class Speaker { system, user };
enum class Termination { system_end, agent_end, max_turns, transport_error };

std::string to_string(Speaker speaker);
std::string to_string(Termination termination);
Speaker speaker_from_string(const std::string& text);
Termination termination_from_string(const std::string& text);

struct DialogueAct {
  std::string intent;
  std::vector<std::pair<std::string, std::string>> entities;  // (slot, normalized value)
};

struct Utterance {
  Speaker speaker = Speaker::system;
  std::string text;
  int turn_index = 1;  // s_t and u_t share index t
  std::optional<std::vector<DialogueAct>> acts;
};

// Alternating system/user utterance sequence. Starts with the system; a
// trailing unanswered system utterance is allowed but does not count as a
// completed exchange.
class DialogueTranscript {
 public:
  DialogueTranscript() = default;
  explicit DialogueTranscript(std::string goal_id) : goal_id_(std::move(goal_id)) {}

  const std::string& goal_id() const { return goal_id_; }
  const std::vector<Utterance>& utterances() const { return utterances_; }
  const std::optional<Termination>& termination() const { return termination_; }
  std::map<std::string, std::string>& metadata() { return metadata_; }
  const std::map<std::string, std::string>& metadata() const { return metadata_; }

  // Number of completed (system, user) exchanges; this is the paper-style N.
  int exchanges() const;

  bool ends_with_system() const;
  const Utterance* last_user_utterance() const;

  // Appends with alternation checking; assigns the turn index.
  void append(Speaker speaker, std::string text,
              std::optional<std::vector<DialogueAct>> acts = std::nullopt);

  // Attaches acts to the most recent utterance of the given speaker.
  void annotate_last(Speaker speaker, std::vector<DialogueAct> acts);

  void terminate(Termination reason);

 private:
  std::string goal_id_;
  std::vector<Utterance> utterances_;
  std::optional<Termination> termination_;
  std::map<std::string, std::string> metadata_;
};

// Free-function form used by tests and external callers.
void append_utterance(DialogueTranscript& transcript, Speaker speaker, const std::string& text,
                      std::optional<std::vector<DialogueAct>> acts = std::nullopt);

struct CorpusStats {
  double avg_turns = 0.0;
  double avg_user_words = 0.0;
  double avg_system_words = 0.0;
  int dialogue_count = 0;
};

using Tokenizer = std::function<std::vector<std::string>(const std::string&)>;

// include_trailing_half: count a trailing unanswered system utterance as half
// an exchange (off by default).
CorpusStats corpus_stats(const std::vector<DialogueTranscript>& corpus, const Tokenizer& tokenizer,
                         bool include_trailing_half = false);

nlohmann::json transcript_to_json(const DialogueTranscript& transcript);
DialogueTranscript transcript_from_json(const nlohmann::json& value);

void save_transcripts_jsonl(const std::vector<DialogueTranscript>& transcripts,
                            const std::filesystem::path& path);
std::vector<DialogueTranscript> load_transcripts_jsonl(const std::filesystem::path& path);

}  // namespace todsim
