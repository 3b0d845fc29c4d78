#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "todsim/agents.hpp"
#include "todsim/dialogue.hpp"
#include "todsim/goal.hpp"

namespace todsim {

struct StopPolicy {
  bool terminate_on_system_goodbye = true;
  bool terminate_on_thanks_intent = false;  // gratitude alone does not end a dialogue
  int max_turns = 20;
  std::string agent_end_marker = "/end";
};

// Decides after each utterance whether the dialogue is over. system_terminal
// is the TOD's own end-of-dialogue flag for its latest utterance.
std::optional<Termination> should_terminate(const DialogueTranscript& transcript,
                                            bool system_terminal, const StopPolicy& stop);

// Runs one dialogue: the TOD speaks first, the agent replies to each system
// utterance, stopping per the policy. Agent or TOD exceptions terminate the
// dialogue as transport_error with the partial transcript preserved.
DialogueTranscript run_dialogue(UserAgent& agent, TodSystem& tod, const UserGoal& goal,
                                const StopPolicy& stop, std::uint64_t seed,
                                std::map<std::string, std::string> metadata = {});

struct CampaignConfig {
  std::vector<UserGoal> goals;
  int dialogues_per_goal = 100;
  int max_turns = 20;
  GenerationParams params;
  std::uint64_t base_seed = 0;
  std::filesystem::path output_dir;
  int concurrency = 1;
  StopPolicy stop;
};

using AgentFactory =
    std::function<std::unique_ptr<UserAgent>(const UserGoal& goal, std::uint64_t seed)>;
using TodFactory =
    std::function<std::unique_ptr<TodSystem>(const UserGoal& goal, std::uint64_t seed)>;

struct CampaignSummary {
  int total_dialogues = 0;
  int generated = 0;   // this run; the rest were resumed from disk
  std::map<std::string, int> per_goal;
  std::map<std::string, int> terminations;
  std::filesystem::path transcripts_path;
  std::filesystem::path manifest_path;
};

// Runs goals x dialogues_per_goal dialogues, possibly concurrently, and
// persists transcripts sorted by (goal index, dialogue index) so output is
// byte-identical across runs and concurrency levels. Already-persisted
// (goal, index) pairs are skipped, which makes interrupted campaigns
// resumable.
CampaignSummary run_campaign(const CampaignConfig& config, const AgentFactory& agent_factory,
                             const TodFactory& tod_factory);

// Seed for dialogue (goal_index, dialogue_index) under a base seed.
std::uint64_t dialogue_seed(std::uint64_t base_seed, std::size_t goal_index,
                            std::size_t dialogue_index);

}  // namespace todsim
