#include "todsim/engine.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "todsim/errors.hpp"
#include "todsim/rng.hpp"
#include "todsim/text.hpp"

namespace todsim {
namespace {

bool last_user_said_thanks(const DialogueTranscript& transcript) {
  const Utterance* last = transcript.last_user_utterance();
  if (last == nullptr) return false;
  if (last->acts.has_value()) {
    for (const DialogueAct& act : *last->acts) {
      if (act.intent == "thanks") return true;
    }
    return false;
  }
  return normalize_value(last->text).find("thank") != std::string::npos;
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::uint64_t dialogue_seed(std::uint64_t base_seed, std::size_t goal_index,
                            std::size_t dialogue_index) {
  return mix_seed(base_seed, goal_index, dialogue_index);
}

std::optional<Termination> should_terminate(const DialogueTranscript& transcript,
                                            bool system_terminal, const StopPolicy& stop) {
  if (system_terminal && stop.terminate_on_system_goodbye) return Termination::system_end;
  if (transcript.ends_with_system()) return std::nullopt;  // user still to reply
  const Utterance* last = transcript.last_user_utterance();
  if (last != nullptr && last->text == stop.agent_end_marker) return Termination::agent_end;
  if (stop.terminate_on_thanks_intent && last_user_said_thanks(transcript)) {
    return Termination::agent_end;
  }
  if (transcript.exchanges() >= stop.max_turns) return Termination::max_turns;
  return std::nullopt;
}

DialogueTranscript run_dialogue(UserAgent& agent, TodSystem& tod, const UserGoal& goal,
                                const StopPolicy& stop, std::uint64_t seed,
                                std::map<std::string, std::string> metadata) {
  DialogueTranscript transcript(goal.id);
  transcript.metadata() = std::move(metadata);
  transcript.metadata()["seed"] = std::to_string(seed);

  try {
    while (true) {
      const SystemTurn system_turn = tod.next_system();
      transcript.append(Speaker::system, system_turn.text, system_turn.acts);
      if (auto reason = should_terminate(transcript, system_turn.terminal, stop)) {
        transcript.terminate(*reason);
        break;
      }

      const std::string user_text = agent.next_utterance(goal, transcript);
      if (user_text == stop.agent_end_marker) {
        transcript.terminate(Termination::agent_end);
        break;
      }
      std::vector<DialogueAct> acts = tod.interpret(user_text);
      transcript.append(Speaker::user, user_text, std::move(acts));
      if (auto reason = should_terminate(transcript, false, stop)) {
        transcript.terminate(*reason);
        break;
      }
    }
  } catch (const std::exception& ex) {
    transcript.metadata()["failure"] = AgentFailure(ex.what()).what();
    if (!transcript.termination().has_value()) {
      transcript.terminate(Termination::transport_error);
    }
  }
  // merged last so counters accumulated during the run (e.g. retries) land
  for (const auto& [key, value] : agent.metadata()) transcript.metadata()[key] = value;
  return transcript;
}

CampaignSummary run_campaign(const CampaignConfig& config, const AgentFactory& agent_factory,
                             const TodFactory& tod_factory) {
  if (config.goals.empty()) throw EmptyInput("goal list");
  if (config.dialogues_per_goal < 1 || config.max_turns < 1) {
    throw Error("InvalidConfig", "dialogues_per_goal and max_turns must be >= 1");
  }

  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  const std::filesystem::path transcripts_path = config.output_dir / "transcripts.jsonl";
  const std::filesystem::path manifest_path = config.output_dir / "manifest.json";

  StopPolicy stop = config.stop;
  stop.max_turns = config.max_turns;

  const std::size_t per_goal = static_cast<std::size_t>(config.dialogues_per_goal);
  const std::size_t total = config.goals.size() * per_goal;

  // resume: keep transcripts whose (goal_index, dialogue_index) already exist
  std::vector<std::optional<DialogueTranscript>> slots(total);
  if (std::filesystem::exists(transcripts_path)) {
    for (DialogueTranscript& existing : load_transcripts_jsonl(transcripts_path)) {
      const auto& meta = existing.metadata();
      const auto goal_it = meta.find("goal_index");
      const auto dlg_it = meta.find("dialogue_index");
      if (goal_it == meta.end() || dlg_it == meta.end()) continue;
      const std::size_t g = std::stoul(goal_it->second);
      const std::size_t d = std::stoul(dlg_it->second);
      if (g < config.goals.size() && d < per_goal) {
        slots[g * per_goal + d] = std::move(existing);
      }
    }
  }

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < total; ++i) {
    if (!slots[i].has_value()) todo.push_back(i);
  }

  const std::string started_at = iso_timestamp();
  std::atomic<std::size_t> cursor{0};
  const auto worker = [&]() {
    while (true) {
      const std::size_t job = cursor.fetch_add(1);
      if (job >= todo.size()) return;
      const std::size_t index = todo[job];
      const std::size_t goal_index = index / per_goal;
      const std::size_t dlg_index = index % per_goal;
      const UserGoal& goal = config.goals[goal_index];
      const std::uint64_t seed = dialogue_seed(config.base_seed, goal_index, dlg_index);

      std::map<std::string, std::string> metadata;
      metadata["goal_index"] = std::to_string(goal_index);
      metadata["dialogue_index"] = std::to_string(dlg_index);
      std::unique_ptr<UserAgent> agent = agent_factory(goal, mix_seed(seed, 2));
      std::unique_ptr<TodSystem> tod = tod_factory(goal, mix_seed(seed, 1));
      slots[index] = run_dialogue(*agent, *tod, goal, stop, seed, std::move(metadata));
    }
  };

  const int thread_count = std::max(1, std::min<int>(config.concurrency,
                                                     static_cast<int>(todo.size())));
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(thread_count));
    for (int i = 0; i < thread_count; ++i) threads.emplace_back(worker);
    for (std::thread& thread : threads) thread.join();
  }

  std::vector<DialogueTranscript> ordered;
  ordered.reserve(total);
  CampaignSummary summary;
  summary.total_dialogues = static_cast<int>(total);
  summary.generated = static_cast<int>(todo.size());
  for (std::size_t i = 0; i < total; ++i) {
    summary.per_goal[config.goals[i / per_goal].id] += 1;
    if (slots[i]->termination().has_value()) {
      summary.terminations[to_string(*slots[i]->termination())] += 1;
    }
    ordered.push_back(std::move(*slots[i]));
  }
  save_transcripts_jsonl(ordered, transcripts_path);

  nlohmann::json manifest;
  manifest["version"] = 1;
  manifest["base_seed"] = config.base_seed;
  manifest["dialogues_per_goal"] = config.dialogues_per_goal;
  manifest["max_turns"] = config.max_turns;
  manifest["concurrency"] = config.concurrency;
  manifest["model_id"] = config.params.model_id;
  manifest["temperature"] = config.params.temperature;
  nlohmann::json goal_ids = nlohmann::json::array();
  for (const UserGoal& goal : config.goals) goal_ids.push_back(goal.id);
  manifest["goals"] = std::move(goal_ids);
  manifest["started_at"] = started_at;
  manifest["finished_at"] = iso_timestamp();
  manifest["stop_policy"] = {
      {"terminate_on_system_goodbye", stop.terminate_on_system_goodbye},
      {"terminate_on_thanks_intent", stop.terminate_on_thanks_intent},
      {"max_turns", stop.max_turns},
      {"agent_end_marker", stop.agent_end_marker},
  };
  std::ofstream manifest_out(manifest_path);
  if (!manifest_out) throw OutputUnwritable(manifest_path.string());
  manifest_out << manifest.dump(2) << '\n';

  summary.transcripts_path = transcripts_path;
  summary.manifest_path = manifest_path;
  return summary;
}

}  // namespace todsim
