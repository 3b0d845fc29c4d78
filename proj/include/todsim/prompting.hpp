#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "todsim/dialogue.hpp"
#include "todsim/goal.hpp"

namespace todsim {

struct PromptTemplate {
  std::string task_description =
      "You are a customer talking to an automated assistant over the phone. "
      "Fulfill the goal described below, one short message per turn.";
  std::string separator = "<endturn>";
  std::string system_label = "ASSISTANT:";
  std::string user_label = "CUSTOMER:";
  int shot_count = 0;
};

PromptTemplate load_prompt_template(const std::filesystem::path& path);

struct ShotSet {
  std::vector<std::pair<UserGoal, DialogueTranscript>> dialogues;
};

// task description, shot blocks, goal text, history (each utterance suffixed
// by the separator), then the user-speaker cue. Deterministic; growing the
// history extends the previous prompt as a strict prefix up to the cue.
std::string build_prompt(const PromptTemplate& tmpl, const UserGoal& goal,
                         const DialogueTranscript& history, const ShotSet& shots = {});

// Cuts at the first separator, strips speaker-label prefixes, drops control
// characters, trims. Idempotent.
std::string postprocess_utterance(const std::string& raw, const PromptTemplate& tmpl);

}  // namespace todsim
