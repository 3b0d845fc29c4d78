#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace todsim {

// Base class for all structured errors. `name()` is the stable identifier
// printed by the CLI; `what()` carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& message)
      : std::runtime_error(name + ": " + message), name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

// goal_model
struct MissingTemplate : Error {
  MissingTemplate(const std::string& domain, const std::string& slot)
      : Error("MissingTemplate", "no rendering rule for slot '" + slot + "' in domain '" + domain + "'") {}
};
struct EmptyCorpus : Error {
  EmptyCorpus() : Error("EmptyCorpus", "corpus must not be empty") {}
};
struct ParseError : Error {
  ParseError(std::size_t line, const std::string& reason)
      : Error("ParseError", "line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// dialogue_core
struct AlternationViolation : Error {
  explicit AlternationViolation(const std::string& detail)
      : Error("AlternationViolation", detail) {}
};
struct AlreadyTerminated : Error {
  AlreadyTerminated() : Error("AlreadyTerminated", "transcript already has a termination reason") {}
};

// prompting
struct NotUserTurn : Error {
  NotUserTurn() : Error("NotUserTurn", "history must end after a system utterance") {}
};
struct InsufficientShots : Error {
  InsufficientShots(std::size_t wanted, std::size_t available)
      : Error("InsufficientShots",
              "template wants " + std::to_string(wanted) + " shots, only " +
                  std::to_string(available) + " available") {}
};
struct EmptyAfterCleaning : Error {
  EmptyAfterCleaning() : Error("EmptyAfterCleaning", "nothing left after post-processing") {}
};

// agents
struct TransportError : Error {
  explicit TransportError(const std::string& detail) : Error("TransportError", detail) {}
};
struct AuthError : Error {
  explicit AuthError(const std::string& detail) : Error("AuthError", detail) {}
};
struct ModelRefusal : Error {
  ModelRefusal() : Error("ModelRefusal", "model returned an empty response") {}
};
struct ScriptExhausted : Error {
  ScriptExhausted() : Error("ScriptExhausted", "scripted agent has no utterances left") {}
};
struct ClosedDialogue : Error {
  ClosedDialogue() : Error("ClosedDialogue", "mock TOD is closed and accepts no further turns") {}
};

// engine
struct AgentFailure : Error {
  explicit AgentFailure(const std::string& cause) : Error("AgentFailure", cause) {}
};
struct OutputUnwritable : Error {
  explicit OutputUnwritable(const std::string& path)
      : Error("OutputUnwritable", "cannot write to " + path) {}
};

// metrics
struct DegenerateDiversity : Error {
  explicit DegenerateDiversity(const std::string& detail)
      : Error("DegenerateDiversity", detail) {}
};
struct NoActsAvailable : Error {
  NoActsAvailable() : Error("NoActsAvailable", "transcript carries no dialogue acts") {}
};
struct NoIntentExtracted : Error {
  NoIntentExtracted() : Error("NoIntentExtracted", "extractor yielded no intent label") {}
};
struct ProviderFailure : Error {
  explicit ProviderFailure(const std::string& detail) : Error("ProviderFailure", detail) {}
};
struct EmptyInput : Error {
  explicit EmptyInput(const std::string& what_is_empty)
      : Error("EmptyInput", what_is_empty + " must not be empty") {}
};

// annotation
struct MixedDialogueIds : Error {
  MixedDialogueIds() : Error("MixedDialogueIds", "records span more than one dialogue id") {}
};
struct UnbalancedDesign : Error {
  explicit UnbalancedDesign(const std::string& detail) : Error("UnbalancedDesign", detail) {}
};
struct DegenerateDistribution : Error {
  DegenerateDistribution()
      : Error("DegenerateDistribution", "all ratings identical; expected agreement is 1") {}
};

// data_pipeline
struct EmptyDialogue : Error {
  EmptyDialogue() : Error("EmptyDialogue", "dialogue has no complete exchange") {}
};
struct InsufficientCorpus : Error {
  InsufficientCorpus(std::size_t wanted, std::size_t available)
      : Error("InsufficientCorpus",
              "split wants " + std::to_string(wanted) + " dialogues, corpus has " +
                  std::to_string(available)) {}
};
struct MissingSubtaskLabel : Error {
  explicit MissingSubtaskLabel(const std::string& dialogue_id)
      : Error("MissingSubtaskLabel", "dialogue '" + dialogue_id + "' has no subtask label") {}
};
struct IoError : Error {
  explicit IoError(const std::string& detail) : Error("IoError", detail) {}
};

}  // namespace todsim
