#include "todsim/dialogue.hpp"

#include <fstream>

#include "todsim/errors.hpp"
#include "todsim/text.hpp"

namespace todsim {

std::string to_string(Speaker speaker) {
  return speaker == Speaker::system ? "system" : "user";
}

std::string to_string(Termination termination) {
  switch (termination) {
    case Termination::system_end: return "system_end";
    case Termination::agent_end: return "agent_end";
    case Termination::max_turns: return "max_turns";
    case Termination::transport_error: return "transport_error";
  }
  return "transport_error";
}

Speaker speaker_from_string(const std::string& text) {
  if (text == "system") return Speaker::system;
  if (text == "user") return Speaker::user;
  throw Error("ParseError", "unknown speaker '" + text + "'");
}

Termination termination_from_string(const std::string& text) {
  if (text == "system_end") return Termination::system_end;
  if (text == "agent_end") return Termination::agent_end;
  if (text == "max_turns") return Termination::max_turns;
  if (text == "transport_error") return Termination::transport_error;
  throw Error("ParseError", "unknown termination '" + text + "'");
}

int DialogueTranscript::exchanges() const {
  return static_cast<int>(utterances_.size() / 2);
}

bool DialogueTranscript::ends_with_system() const {
  return !utterances_.empty() && utterances_.back().speaker == Speaker::system;
}

const Utterance* DialogueTranscript::last_user_utterance() const {
  for (auto it = utterances_.rbegin(); it != utterances_.rend(); ++it) {
    if (it->speaker == Speaker::user) return &*it;
  }
  return nullptr;
}

void DialogueTranscript::append(Speaker speaker, std::string text,
                                std::optional<std::vector<DialogueAct>> acts) {
  if (termination_.has_value()) throw AlreadyTerminated();
  if (trim(text).empty()) {
    throw AlternationViolation("utterance text is empty");
  }
  const Speaker expected =
      (utterances_.empty() || utterances_.back().speaker == Speaker::user) ? Speaker::system
                                                                           : Speaker::user;
  if (speaker != expected) {
    throw AlternationViolation("expected " + to_string(expected) + " utterance, got " +
                               to_string(speaker));
  }
  Utterance utterance;
  utterance.speaker = speaker;
  utterance.text = std::move(text);
  utterance.turn_index =
      speaker == Speaker::system ? exchanges() + 1 : static_cast<int>((utterances_.size() + 1) / 2);
  utterance.acts = std::move(acts);
  utterances_.push_back(std::move(utterance));
}

void DialogueTranscript::annotate_last(Speaker speaker, std::vector<DialogueAct> acts) {
  for (auto it = utterances_.rbegin(); it != utterances_.rend(); ++it) {
    if (it->speaker == speaker) {
      it->acts = std::move(acts);
      return;
    }
  }
  throw Error("NoSuchUtterance", "no " + to_string(speaker) + " utterance to annotate");
}

void DialogueTranscript::terminate(Termination reason) {
  if (termination_.has_value()) throw AlreadyTerminated();
  termination_ = reason;
}

void append_utterance(DialogueTranscript& transcript, Speaker speaker, const std::string& text,
                      std::optional<std::vector<DialogueAct>> acts) {
  transcript.append(speaker, text, std::move(acts));
}

CorpusStats corpus_stats(const std::vector<DialogueTranscript>& corpus, const Tokenizer& tokenizer,
                         bool include_trailing_half) {
  if (corpus.empty()) throw EmptyCorpus();
  CorpusStats stats;
  stats.dialogue_count = static_cast<int>(corpus.size());
  double turn_sum = 0.0;
  std::size_t user_words = 0, user_utts = 0;
  std::size_t system_words = 0, system_utts = 0;
  for (const DialogueTranscript& transcript : corpus) {
    double turns = transcript.exchanges();
    if (include_trailing_half && transcript.ends_with_system()) turns += 0.5;
    turn_sum += turns;
    for (const Utterance& utterance : transcript.utterances()) {
      const std::size_t words = tokenizer(utterance.text).size();
      if (utterance.speaker == Speaker::user) {
        user_words += words;
        ++user_utts;
      } else {
        system_words += words;
        ++system_utts;
      }
    }
  }
  stats.avg_turns = turn_sum / static_cast<double>(corpus.size());
  stats.avg_user_words =
      user_utts == 0 ? 0.0 : static_cast<double>(user_words) / static_cast<double>(user_utts);
  stats.avg_system_words =
      system_utts == 0 ? 0.0 : static_cast<double>(system_words) / static_cast<double>(system_utts);
  return stats;
}

nlohmann::json transcript_to_json(const DialogueTranscript& transcript) {
  nlohmann::json out;
  out["goal_id"] = transcript.goal_id();
  if (transcript.termination()) {
    out["termination"] = to_string(*transcript.termination());
  }
  out["metadata"] = transcript.metadata();
  nlohmann::json utterances = nlohmann::json::array();
  for (const Utterance& utterance : transcript.utterances()) {
    nlohmann::json u;
    u["speaker"] = to_string(utterance.speaker);
    u["text"] = utterance.text;
    u["turn_index"] = utterance.turn_index;
    if (utterance.acts) {
      nlohmann::json acts = nlohmann::json::array();
      for (const DialogueAct& act : *utterance.acts) {
        nlohmann::json a;
        a["intent"] = act.intent;
        nlohmann::json entities = nlohmann::json::array();
        for (const auto& [slot, value] : act.entities) {
          entities.push_back(nlohmann::json::array({slot, value}));
        }
        a["entities"] = std::move(entities);
        acts.push_back(std::move(a));
      }
      u["acts"] = std::move(acts);
    }
    utterances.push_back(std::move(u));
  }
  out["utterances"] = std::move(utterances);
  return out;
}

DialogueTranscript transcript_from_json(const nlohmann::json& value) {
  DialogueTranscript transcript(value.at("goal_id").get<std::string>());
  if (value.contains("metadata")) {
    transcript.metadata() = value.at("metadata").get<std::map<std::string, std::string>>();
  }
  for (const auto& u : value.value("utterances", nlohmann::json::array())) {
    std::optional<std::vector<DialogueAct>> acts;
    if (u.contains("acts")) {
      std::vector<DialogueAct> list;
      for (const auto& a : u.at("acts")) {
        DialogueAct act;
        act.intent = a.at("intent").get<std::string>();
        for (const auto& e : a.value("entities", nlohmann::json::array())) {
          act.entities.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
        }
        list.push_back(std::move(act));
      }
      acts = std::move(list);
    }
    transcript.append(speaker_from_string(u.at("speaker").get<std::string>()),
                      u.at("text").get<std::string>(), std::move(acts));
  }
  if (value.contains("termination") && !value.at("termination").is_null()) {
    transcript.terminate(termination_from_string(value.at("termination").get<std::string>()));
  }
  return transcript;
}

void save_transcripts_jsonl(const std::vector<DialogueTranscript>& transcripts,
                            const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw OutputUnwritable(path.string());
  for (const DialogueTranscript& transcript : transcripts) {
    out << transcript_to_json(transcript).dump() << '\n';
  }
  if (!out) throw OutputUnwritable(path.string());
}

std::vector<DialogueTranscript> load_transcripts_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open transcripts " + path.string());
  std::vector<DialogueTranscript> transcripts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      transcripts.push_back(transcript_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(line_no, ex.what());
    }
  }
  return transcripts;
}

}  // namespace todsim
