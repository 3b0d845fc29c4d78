#include "todsim/prompting.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "todsim/errors.hpp"
#include "todsim/text.hpp"

namespace todsim {
namespace {

void append_history(std::string& out, const PromptTemplate& tmpl,
                    const DialogueTranscript& history) {
  for (const Utterance& utterance : history.utterances()) {
    out += utterance.speaker == Speaker::system ? tmpl.system_label : tmpl.user_label;
    out += ' ';
    out += utterance.text;
    out += tmpl.separator;
    out += '\n';
  }
}

bool strip_prefix(std::string& text, const std::string& prefix) {
  if (!prefix.empty() && text.rfind(prefix, 0) == 0) {
    text.erase(0, prefix.size());
    return true;
  }
  return false;
}

}  // namespace

PromptTemplate load_prompt_template(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open prompt template " + path.string());
  nlohmann::json value;
  try {
    in >> value;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(1, ex.what());
  }
  PromptTemplate tmpl;
  tmpl.task_description = value.value("task_description", tmpl.task_description);
  tmpl.separator = value.value("separator", tmpl.separator);
  if (value.contains("speaker_labels")) {
    tmpl.system_label = value.at("speaker_labels").at(0).get<std::string>();
    tmpl.user_label = value.at("speaker_labels").at(1).get<std::string>();
  }
  tmpl.shot_count = value.value("shot_count", tmpl.shot_count);
  if (tmpl.separator.empty()) throw ParseError(1, "separator must be non-empty");
  if (tmpl.shot_count < 0) throw ParseError(1, "shot_count must be >= 0");
  return tmpl;
}

std::string build_prompt(const PromptTemplate& tmpl, const UserGoal& goal,
                         const DialogueTranscript& history, const ShotSet& shots) {
  if (!history.utterances().empty() && !history.ends_with_system()) throw NotUserTurn();
  if (static_cast<std::size_t>(tmpl.shot_count) > shots.dialogues.size()) {
    throw InsufficientShots(static_cast<std::size_t>(tmpl.shot_count), shots.dialogues.size());
  }

  std::string out = tmpl.task_description;
  out += "\n\n";
  for (int i = 0; i < tmpl.shot_count; ++i) {
    const auto& [shot_goal, shot_history] = shots.dialogues[static_cast<std::size_t>(i)];
    out += shot_goal.text;
    out += '\n';
    append_history(out, tmpl, shot_history);
    out += '\n';
  }
  out += goal.text;
  out += '\n';
  append_history(out, tmpl, history);
  out += tmpl.user_label;
  return out;
}

std::string postprocess_utterance(const std::string& raw, const PromptTemplate& tmpl) {
  std::string text = raw;
  const std::size_t cut = text.find(tmpl.separator);
  if (cut != std::string::npos) text.erase(cut);

  bool stripped = true;
  while (stripped) {
    text = trim(text);
    stripped = strip_prefix(text, tmpl.system_label) || strip_prefix(text, tmpl.user_label);
  }

  std::string printable;
  printable.reserve(text.size());
  for (char c : text) {
    const auto uc = static_cast<unsigned char>(c);
    printable.push_back(uc < 0x20 || uc == 0x7f ? ' ' : c);
  }
  const std::string cleaned = trim(collapse_whitespace(printable));
  if (cleaned.empty()) throw EmptyAfterCleaning();
  return cleaned;
}

}  // namespace todsim
