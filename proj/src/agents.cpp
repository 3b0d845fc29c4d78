#include "todsim/agents.hpp"

#include <algorithm>
#include <cstdio>

#include "todsim/errors.hpp"
#include "todsim/rng.hpp"
#include "todsim/text.hpp"

namespace todsim {
namespace {

const char kGreeting[] = "Hello, thank you for calling. How can I help you today?";
const char kClarification[] = "I'm sorry, I didn't quite catch that. Could you say that again?";
const char kClosing[] = "You are all set. Thank you for calling, goodbye!";
const char kForcedClosing[] = "Thank you for using our services. Goodbye!";

std::string display_name(const std::string& slot_name) {
  std::string out = slot_name;
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

// In-domain alternatives per slot name, used as NLU corruption targets.
const std::map<std::string, std::vector<std::string>>& builtin_vocabulary() {
  static const std::map<std::string, std::vector<std::string>> kVocabulary = {
      {"task", {"book", "cancel", "reschedule"}},
      {"transport_type", {"waiter", "dropoff", "loaner"}},
      {"available",
       {"today 16:00", "wednesday", "10:00", "afternoon", "monday 09:00", "friday 14:00"}},
      {"service",
       {"check engine", "oil change", "engine overheating", "engine check", "tire rotation",
        "brake inspection"}},
      {"second_service",
       {"check engine", "oil change", "engine overheating", "engine check", "tire rotation"}},
      {"appointment", {"wednesday 10:00", "monday 09:00", "friday 14:00"}},
      {"caller_name",
       {"alex morgan", "jamie lee", "riley chen", "morgan reyes", "casey brooks", "taylor quinn",
        "jordan avery", "sam ellis"}},
      {"caller_phone",
       {"555-0101", "555-0102", "555-0103", "555-0104", "555-0105", "555-0106", "555-0107",
        "555-0108"}},
      {"car_year", {"2018", "2019", "2020", "2021", "2022"}},
      {"car_make", {"toyota", "honda", "ford"}},
      {"car_model", {"corolla", "civic", "camry", "focus", "accord"}},
      {"food", {"indian", "chinese", "italian", "french"}},
      {"people", {"2", "4", "6"}},
      {"time", {"18:00", "19:00", "20:00"}},
      {"area", {"centre", "north", "south"}},
      {"pricerange", {"cheap", "moderate", "expensive"}},
  };
  return kVocabulary;
}

std::string corrupt_value(const SchemaSlot& slot, Rng& rng) {
  std::vector<std::string> alternatives;
  for (const std::string& candidate : slot.candidates) {
    if (candidate != slot.value) alternatives.push_back(candidate);
  }
  if (alternatives.empty()) return slot.value + " alt";
  return alternatives[rng.uniform(alternatives.size())];
}

std::string script_line(const SchemaSlot& slot) {
  if (slot.name == "task") return "hello, i would like to " + slot.value + " an appointment.";
  if (slot.name == "caller_name") return "my name is " + slot.value + ".";
  if (slot.name == "caller_phone") return "my phone number is " + slot.value + ".";
  if (slot.name == "car_year") return "the car year is " + slot.value + ".";
  if (slot.name == "car_make") return "the make is " + slot.value + ".";
  if (slot.name == "car_model") return "the model is " + slot.value + ".";
  if (slot.name == "available") return "i am available " + slot.value + ".";
  if (slot.name == "transport_type") return "i would prefer the " + slot.value + " option.";
  if (slot.name == "service") return "the service i need is " + slot.value + ".";
  if (slot.name == "second_service") return "i also need " + slot.value + ".";
  if (slot.name == "appointment") return "it is the " + slot.value + " appointment.";
  return "the " + display_name(slot.name) + " is " + slot.value + ".";
}

}  // namespace

// ---- scripted agent ----

std::string ScriptedAgent::next() {
  if (cursor_ >= script_.size()) throw ScriptExhausted();
  return script_[cursor_++];
}

std::string scripted_next(const std::vector<std::string>& script, std::size_t& cursor) {
  if (cursor >= script.size()) throw ScriptExhausted();
  return script[cursor++];
}

// ---- remote LLM simulator ----

SimulatorAgent::SimulatorAgent(std::shared_ptr<RemoteClient> client, PromptTemplate tmpl,
                               GenerationParams params, ShotSet shots)
    : client_(std::move(client)),
      template_(std::move(tmpl)),
      params_(std::move(params)),
      shots_(std::move(shots)) {
  // the separator doubles as the stop sequence so generation halts at turn end
  if (std::find(params_.stop_sequences.begin(), params_.stop_sequences.end(),
                template_.separator) == params_.stop_sequences.end()) {
    params_.stop_sequences.push_back(template_.separator);
  }
}

std::string SimulatorAgent::next_utterance(const UserGoal& goal,
                                           const DialogueTranscript& history) {
  const std::string prompt = build_prompt(template_, goal, history, shots_);
  const GenerationResult result = client_->generate(prompt, params_);
  total_retries_ += result.retries;
  return postprocess_utterance(result.text, template_);
}

std::map<std::string, std::string> SimulatorAgent::metadata() const {
  char temperature[32];
  std::snprintf(temperature, sizeof(temperature), "%.3g", params_.temperature);
  return {{"model_id", params_.model_id},
          {"temperature", temperature},
          {"retries", std::to_string(total_retries_)}};
}

// ---- mock TOD ----

void validate_failure_config(const FailureInjectionConfig& config) {
  if (config.loop_probability < 0.0 || config.loop_probability > 1.0 ||
      config.nlu_error_rate < 0.0 || config.nlu_error_rate > 1.0) {
    throw Error("InvalidConfig", "failure probabilities must lie in [0, 1]");
  }
}

GoalSchema make_goal_schema(const UserGoal& goal) {
  GoalSchema schema;
  const auto& vocabulary = builtin_vocabulary();
  for (const SlotSpec& slot : goal.slots) {
    if (slot.kind == SlotKind::request) {
      schema.requests.push_back(slot.name);
      continue;
    }
    SchemaSlot entry;
    entry.name = slot.name;
    entry.kind = slot.kind;
    entry.value = slot.value.value_or("");
    entry.group = slot.group;
    entry.candidates.push_back(entry.value);
    auto vocab_it = vocabulary.find(slot.name);
    if (vocab_it != vocabulary.end()) {
      for (const std::string& candidate : vocab_it->second) {
        if (candidate != entry.value) entry.candidates.push_back(candidate);
      }
    }
    schema.slots.push_back(std::move(entry));
  }
  return schema;
}

MockTod::MockTod(GoalSchema schema, FailureInjectionConfig failure)
    : schema_(std::move(schema)), failure_(failure) {
  validate_failure_config(failure_);
  for (const SchemaSlot& slot : schema_.slots) state_.pending.push_back(slot.name);
}

MockTod::MockTod(GoalSchema schema, FailureInjectionConfig failure, TodState state)
    : schema_(std::move(schema)), failure_(failure), state_(std::move(state)) {
  validate_failure_config(failure_);
}

std::vector<DialogueAct> MockTod::interpret(const std::string& user_text) {
  if (state_.phase == TodPhase::closed) throw ClosedDialogue();
  TodState next = state_;
  Rng rng(mix_seed(failure_.rng_seed, 2 * static_cast<std::uint64_t>(state_.turn) + 1));

  const std::string normalized = normalize_value(user_text);
  std::vector<DialogueAct> acts;
  DialogueAct inform;
  inform.intent = "inform";
  for (const SchemaSlot& slot : schema_.slots) {
    if (normalized.find(slot.value) == std::string::npos || slot.value.empty()) continue;
    std::string recorded = slot.value;
    if (failure_.nlu_error_rate > 0.0 && rng.next_double() < failure_.nlu_error_rate) {
      recorded = corrupt_value(slot, rng);
      next.clarify = true;
    }
    next.collected[slot.name] = recorded;
    next.pending.erase(std::remove(next.pending.begin(), next.pending.end(), slot.name),
                       next.pending.end());
    inform.entities.emplace_back(slot.name, recorded);
  }
  if (!inform.entities.empty()) acts.push_back(inform);
  if (normalized.find("thank") != std::string::npos) acts.push_back({"thanks", {}});

  state_ = std::move(next);
  return acts;
}

SystemTurn MockTod::next_system() {
  if (state_.phase == TodPhase::closed) throw ClosedDialogue();
  state_.turn += 1;
  Rng rng(mix_seed(failure_.rng_seed, 2 * static_cast<std::uint64_t>(state_.turn)));
  SystemTurn turn;

  if (failure_.force_end_after_turn.has_value() &&
      state_.turn > *failure_.force_end_after_turn) {
    turn.text = kForcedClosing;
    turn.acts.push_back({"goodbye", {}});
    turn.terminal = true;
    state_.phase = TodPhase::closed;
  } else if (state_.phase == TodPhase::greeting) {
    turn.text = kGreeting;
    turn.acts.push_back({"greet", {}});
    state_.phase = TodPhase::slot_filling;
  } else if (state_.phase == TodPhase::slot_filling && !state_.last_system.empty() &&
             failure_.loop_probability > 0.0 && rng.next_double() < failure_.loop_probability) {
    turn.text = state_.last_system;  // injected policy loop
    turn.acts.push_back({"repeat", {}});
  } else if (state_.phase == TodPhase::slot_filling && state_.pending.empty()) {
    // everything collected: answer requests, confirm bookings, hand back
    std::string text = "Let me confirm:";
    DialogueAct booking_act;
    booking_act.intent = "book_confirm";
    std::map<std::string, std::string> booking;
    for (const SchemaSlot& slot : schema_.slots) {
      auto it = state_.collected.find(slot.name);
      if (it == state_.collected.end()) continue;
      text += " " + display_name(slot.name) + " " + it->second + ",";
      if (slot.kind == SlotKind::book) {
        booking[slot.name] = it->second;
        booking_act.entities.emplace_back(slot.name, it->second);
      }
    }
    if (!text.empty() && text.back() == ',') text.back() = '.';
    DialogueAct answers;
    answers.intent = "inform";
    for (const std::string& request : schema_.requests) {
      const std::string value = request + "-info";
      text += " The " + display_name(request) + " is " + value + ".";
      answers.entities.emplace_back(request, value);
    }
    if (!answers.entities.empty()) turn.acts.push_back(answers);
    if (!booking_act.entities.empty()) {
      text += " Your booking is confirmed.";
      state_.bookings.push_back(booking);
      turn.acts.push_back(booking_act);
    }
    text += " Is there anything else I can help you with?";
    turn.text = text;
    state_.phase = TodPhase::confirm;
  } else if (state_.phase == TodPhase::slot_filling && state_.clarify) {
    turn.text = kClarification;
    turn.acts.push_back({"clarify", {}});
    state_.clarify = false;
  } else if (state_.phase == TodPhase::slot_filling) {
    turn.text = "Could you tell me the " + display_name(state_.pending.front()) + "?";
    turn.acts.push_back({"request", {{state_.pending.front(), ""}}});
  } else {  // confirm phase: close out
    turn.text = kClosing;
    turn.acts.push_back({"goodbye", {}});
    turn.terminal = true;
    state_.phase = TodPhase::closed;
  }
  state_.last_system = turn.text;
  return turn;
}

TodRespondResult mock_tod_respond(const TodState& state, const std::string& user_text,
                                  const GoalSchema& schema,
                                  const FailureInjectionConfig& failure) {
  MockTod machine(schema, failure, state);
  TodRespondResult result;
  result.acts = user_text.empty() ? std::vector<DialogueAct>{} : machine.interpret(user_text);
  SystemTurn turn = machine.next_system();
  result.system_text = std::move(turn.text);
  result.terminal = turn.terminal;
  result.state = machine.state();
  return result;
}

std::vector<std::string> make_perfect_script(const GoalSchema& schema) {
  std::vector<std::string> script;
  if (schema.slots.empty()) {
    script.push_back("hello, i need some help with my account.");
  } else {
    const SchemaSlot& first = schema.slots.front();
    script.push_back(first.name == "task" ? script_line(first) : "hello. " + script_line(first));
    for (std::size_t i = 1; i < schema.slots.size(); ++i) {
      script.push_back(script_line(schema.slots[i]));
    }
  }
  script.push_back("yes, that is everything, thank you.");
  return script;
}

}  // namespace todsim
