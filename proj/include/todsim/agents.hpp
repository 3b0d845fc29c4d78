#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "todsim/dialogue.hpp"
#include "todsim/goal.hpp"
#include "todsim/prompting.hpp"
#include "todsim/remote.hpp"

namespace todsim {

// ---- interfaces ----

class UserAgent {
 public:
  virtual ~UserAgent() = default;
  // history ends after a system utterance; returns the user's reply
  virtual std::string next_utterance(const UserGoal& goal,
                                     const DialogueTranscript& history) = 0;
  virtual std::map<std::string, std::string> metadata() const { return {}; }
};

struct SystemTurn {
  std::string text;
  std::vector<DialogueAct> acts;
  bool terminal = false;
};

class TodSystem {
 public:
  virtual ~TodSystem() = default;
  // NLU acts for a user utterance; also advances internal understanding
  virtual std::vector<DialogueAct> interpret(const std::string& user_text) = 0;
  // next system utterance given everything interpreted so far
  virtual SystemTurn next_system() = 0;
};

// ---- scripted agent ----

class ScriptedAgent : public UserAgent {
 public:
  explicit ScriptedAgent(std::vector<std::string> script) : script_(std::move(script)) {}

  std::string next_utterance(const UserGoal&, const DialogueTranscript&) override {
    return next();
  }
  std::string next();
  std::size_t cursor() const { return cursor_; }

 private:
  std::vector<std::string> script_;
  std::size_t cursor_ = 0;
};

// Free-function form: returns script[cursor] and advances it.
std::string scripted_next(const std::vector<std::string>& script, std::size_t& cursor);

// ---- remote LLM simulator ----

class SimulatorAgent : public UserAgent {
 public:
  SimulatorAgent(std::shared_ptr<RemoteClient> client, PromptTemplate tmpl,
                 GenerationParams params, ShotSet shots = {});

  std::string next_utterance(const UserGoal& goal, const DialogueTranscript& history) override;
  std::map<std::string, std::string> metadata() const override;
  int total_retries() const { return total_retries_; }

 private:
  std::shared_ptr<RemoteClient> client_;
  PromptTemplate template_;
  GenerationParams params_;
  ShotSet shots_;
  int total_retries_ = 0;
};

// ---- mock TOD ----

struct FailureInjectionConfig {
  double loop_probability = 0.0;
  std::optional<int> force_end_after_turn;
  double nlu_error_rate = 0.0;
  std::uint64_t rng_seed = 0;
};

void validate_failure_config(const FailureInjectionConfig& config);

enum class TodPhase { greeting, slot_filling, confirm, closed };

struct TodState {
  std::vector<std::string> pending;                       // slot names still to collect
  std::map<std::string, std::string> collected;           // slot -> recorded value
  std::vector<std::map<std::string, std::string>> bookings;
  TodPhase phase = TodPhase::greeting;
  int turn = 0;                                           // system turns emitted so far
  std::string last_system;
  bool clarify = false;                                   // last interpret was corrupted
};

// What the mock system knows about the task: the slots it collects, their
// target values, and in-domain alternatives used for NLU corruption.
struct SchemaSlot {
  std::string name;
  SlotKind kind = SlotKind::inform;
  std::string value;                     // normalized target value
  std::vector<std::string> candidates;   // includes the target
  std::optional<std::string> group;
};

struct GoalSchema {
  std::vector<SchemaSlot> slots;       // inform/book, in goal order
  std::vector<std::string> requests;   // request slot names
};

GoalSchema make_goal_schema(const UserGoal& goal);

class MockTod : public TodSystem {
 public:
  MockTod(GoalSchema schema, FailureInjectionConfig failure);
  // resume from a state snapshot (used by the functional form)
  MockTod(GoalSchema schema, FailureInjectionConfig failure, TodState state);

  std::vector<DialogueAct> interpret(const std::string& user_text) override;
  SystemTurn next_system() override;

  const TodState& state() const { return state_; }

 private:
  GoalSchema schema_;
  FailureInjectionConfig failure_;
  TodState state_;
};

// Functional form over an explicit state: interprets user_text, then produces
// the next system turn. Randomness is derived from (rng_seed, state.turn), so
// the call is a pure function of its arguments.
struct TodRespondResult {
  std::string system_text;
  std::vector<DialogueAct> acts;  // NLU acts extracted from user_text
  bool terminal = false;
  TodState state;
};

TodRespondResult mock_tod_respond(const TodState& state, const std::string& user_text,
                                  const GoalSchema& schema,
                                  const FailureInjectionConfig& failure);

// Script answering every mock-TOD question correctly, in schema order, ending
// with a confirmation line. Built from the same schema the TOD uses.
std::vector<std::string> make_perfect_script(const GoalSchema& schema);

}  // namespace todsim
