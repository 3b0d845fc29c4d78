#include "todsim/goal.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "todsim/errors.hpp"
#include "todsim/rng.hpp"
#include "todsim/text.hpp"

namespace todsim {
namespace {

std::string display_name(const std::string& slot_name) {
  std::string out = slot_name;
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

std::string interpolate(std::string line, const std::string& name, const std::string& value) {
  const auto replace_all = [&line](const std::string& token, const std::string& with) {
    std::size_t pos = 0;
    while ((pos = line.find(token, pos)) != std::string::npos) {
      line.replace(pos, token.size(), with);
      pos += with.size();
    }
  };
  replace_all("{name}", name);
  replace_all("{value}", value);
  return line;
}

const std::string* find_slot_line(const GoalTemplates& templates, const SlotSpec& slot) {
  const auto by_key = [&templates](const std::string& key) -> const std::string* {
    auto it = templates.slot_lines.find(key);
    return it == templates.slot_lines.end() ? nullptr : &it->second;
  };
  if (const auto* line = by_key(slot.domain + "." + slot.name)) return line;
  if (const auto* line = by_key(slot.name)) return line;
  return by_key(to_string(slot.kind));
}

}  // namespace

std::string to_string(SlotKind kind) {
  switch (kind) {
    case SlotKind::inform: return "inform";
    case SlotKind::request: return "request";
    case SlotKind::book: return "book";
  }
  return "inform";
}

std::string to_string(Subtask subtask) {
  switch (subtask) {
    case Subtask::book: return "book";
    case Subtask::cancel: return "cancel";
    case Subtask::reschedule: return "reschedule";
    case Subtask::other: return "other";
  }
  return "other";
}

std::string to_string(Difficulty difficulty) {
  return difficulty == Difficulty::easy ? "easy" : "hard";
}

SlotKind slot_kind_from_string(const std::string& text) {
  if (text == "inform") return SlotKind::inform;
  if (text == "request") return SlotKind::request;
  if (text == "book") return SlotKind::book;
  throw Error("ParseError", "unknown slot kind '" + text + "'");
}

Subtask subtask_from_string(const std::string& text) {
  if (text == "book") return Subtask::book;
  if (text == "cancel") return Subtask::cancel;
  if (text == "reschedule") return Subtask::reschedule;
  if (text == "other") return Subtask::other;
  throw Error("ParseError", "unknown subtask '" + text + "'");
}

Difficulty difficulty_from_string(const std::string& text) {
  if (text == "easy") return Difficulty::easy;
  if (text == "hard") return Difficulty::hard;
  throw Error("ParseError", "unknown difficulty '" + text + "'");
}

SlotSpec SlotSpec::inform(std::string domain, std::string name, std::string value,
                          std::optional<std::string> group) {
  return SlotSpec{std::move(domain), std::move(name), SlotKind::inform,
                  normalize_value(value), std::move(group)};
}

SlotSpec SlotSpec::request(std::string domain, std::string name,
                           std::optional<std::string> group) {
  return SlotSpec{std::move(domain), std::move(name), SlotKind::request, std::nullopt,
                  std::move(group)};
}

SlotSpec SlotSpec::book(std::string domain, std::string name, std::string value,
                        std::optional<std::string> group) {
  return SlotSpec{std::move(domain), std::move(name), SlotKind::book,
                  normalize_value(value), std::move(group)};
}

void UserGoal::finalize() {
  std::set<std::tuple<std::string, std::string, SlotKind>> seen;
  domains.clear();
  for (const SlotSpec& slot : slots) {
    if (slot.kind == SlotKind::request && slot.value.has_value()) {
      throw Error("InvalidGoal", "request slot '" + slot.name + "' must not carry a value");
    }
    if (slot.kind != SlotKind::request && !slot.value.has_value()) {
      throw Error("InvalidGoal", "slot '" + slot.name + "' of kind " + to_string(slot.kind) +
                                     " needs a value");
    }
    if (!seen.insert({slot.domain, slot.name, slot.kind}).second) {
      throw Error("InvalidGoal", "duplicate slot (" + slot.domain + ", " + slot.name + ", " +
                                     to_string(slot.kind) + ")");
    }
    if (std::find(domains.begin(), domains.end(), slot.domain) == domains.end()) {
      domains.push_back(slot.domain);
    }
  }
}

GoalTemplates default_goal_templates() {
  GoalTemplates templates;
  templates.preambles["default"] = "You are contacting a customer service assistant.";
  templates.preambles["book"] = "You want to book an appointment.";
  templates.preambles["cancel"] = "You want to cancel an appointment.";
  templates.preambles["reschedule"] = "You want to reschedule an appointment.";
  templates.slot_lines["inform"] = "The {name} is {value}.";
  templates.slot_lines["book"] = "Book with {name} {value}.";
  templates.slot_lines["request"] = "Make sure you get the {name}.";
  templates.slot_lines["task"] = "Your task is to {value} the appointment.";
  templates.slot_lines["caller_name"] = "Your name is {value}.";
  templates.slot_lines["caller_phone"] = "Your phone number is {value}.";
  templates.slot_lines["car_year"] = "Your car year is {value}.";
  templates.slot_lines["car_make"] = "Your car make is {value}.";
  templates.slot_lines["car_model"] = "Your car model is {value}.";
  templates.slot_lines["available"] = "You are available {value}.";
  templates.slot_lines["transport_type"] = "You prefer the {value} transport option.";
  templates.slot_lines["service"] = "The service you need is {value}.";
  templates.slot_lines["second_service"] = "You also need {value}.";
  templates.slot_lines["appointment"] = "The appointment in question is the {value} one.";
  return templates;
}

std::string render_goal(const UserGoal& goal, const GoalTemplates& templates) {
  std::string preamble;
  if (goal.subtask.has_value()) {
    auto it = templates.preambles.find(to_string(*goal.subtask));
    if (it != templates.preambles.end()) preamble = it->second;
  }
  if (preamble.empty()) {
    auto it = templates.preambles.find("default");
    if (it != templates.preambles.end()) preamble = it->second;
  }

  std::string out = preamble;
  for (const SlotSpec& slot : goal.slots) {
    const std::string* line = find_slot_line(templates, slot);
    if (line == nullptr) throw MissingTemplate(slot.domain, slot.name);
    const std::string rendered =
        interpolate(*line, display_name(slot.name), slot.value.value_or(""));
    if (!out.empty()) out.push_back(' ');
    out += rendered;
  }
  return out;
}

GoalDistribution estimate_distribution(const std::vector<UserGoal>& corpus) {
  if (corpus.empty()) throw EmptyCorpus();
  GoalDistribution dist;
  for (const UserGoal& goal : corpus) {
    dist.combination_counts[goal.domains] += 1;
    for (const SlotSpec& slot : goal.slots) {
      auto& shapes = dist.domain_slots[slot.domain];
      const bool known = std::any_of(shapes.begin(), shapes.end(), [&slot](const auto& shape) {
        return shape.name == slot.name && shape.kind == slot.kind;
      });
      if (!known) shapes.push_back({slot.name, slot.kind, slot.group});
      if (slot.value.has_value()) {
        dist.value_counts[{slot.domain, slot.name}][*slot.value] += 1;
      }
    }
  }
  return dist;
}

namespace {

template <typename Key>
const Key& pick_weighted(const std::map<Key, int>& counts, Rng& rng) {
  std::uint64_t total = 0;
  for (const auto& [key, count] : counts) total += static_cast<std::uint64_t>(count);
  std::uint64_t draw = rng.uniform(total);
  for (const auto& [key, count] : counts) {
    const auto weight = static_cast<std::uint64_t>(count);
    if (draw < weight) return key;
    draw -= weight;
  }
  return counts.rbegin()->first;  // unreachable for valid input
}

}  // namespace

UserGoal sample_goal(const GoalDistribution& dist, std::uint64_t rng_seed) {
  if (dist.combination_counts.empty()) {
    throw Error("InvalidDistribution", "no domain combinations");
  }
  Rng rng(mix_seed(rng_seed, 0x60a1));
  const std::vector<std::string>& combination = pick_weighted(dist.combination_counts, rng);

  UserGoal goal;
  goal.id = "sampled-" + std::to_string(rng_seed);
  for (const std::string& domain : combination) {
    auto shapes_it = dist.domain_slots.find(domain);
    if (shapes_it == dist.domain_slots.end()) continue;
    for (const GoalDistribution::SlotShape& shape : shapes_it->second) {
      SlotSpec slot;
      slot.domain = domain;
      slot.name = shape.name;
      slot.kind = shape.kind;
      slot.group = shape.group;
      if (shape.kind != SlotKind::request) {
        auto values_it = dist.value_counts.find({domain, shape.name});
        if (values_it == dist.value_counts.end() || values_it->second.empty()) continue;
        slot.value = pick_weighted(values_it->second, rng);
      }
      goal.slots.push_back(std::move(slot));
    }
  }
  goal.finalize();
  goal.text = render_goal(goal, default_goal_templates());
  return goal;
}

UserGoal goal_from_json(const nlohmann::json& value) {
  UserGoal goal;
  goal.id = value.at("id").get<std::string>();
  if (value.contains("subtask") && !value.at("subtask").is_null()) {
    goal.subtask = subtask_from_string(value.at("subtask").get<std::string>());
  }
  if (value.contains("difficulty") && !value.at("difficulty").is_null()) {
    goal.difficulty = difficulty_from_string(value.at("difficulty").get<std::string>());
  }
  for (const auto& slot_json : value.value("slots", nlohmann::json::array())) {
    SlotSpec slot;
    slot.domain = slot_json.at("domain").get<std::string>();
    slot.name = slot_json.at("name").get<std::string>();
    slot.kind = slot_kind_from_string(slot_json.at("kind").get<std::string>());
    if (slot_json.contains("value") && !slot_json.at("value").is_null()) {
      slot.value = normalize_value(slot_json.at("value").get<std::string>());
    }
    if (slot_json.contains("group") && !slot_json.at("group").is_null()) {
      slot.group = slot_json.at("group").get<std::string>();
    }
    goal.slots.push_back(std::move(slot));
  }
  goal.finalize();
  if (value.contains("text") && !value.at("text").is_null()) {
    goal.text = value.at("text").get<std::string>();
  } else {
    goal.text = render_goal(goal, default_goal_templates());
  }
  return goal;
}

nlohmann::json goal_to_json(const UserGoal& goal) {
  nlohmann::json out;
  out["id"] = goal.id;
  if (goal.subtask) out["subtask"] = to_string(*goal.subtask);
  if (goal.difficulty) out["difficulty"] = to_string(*goal.difficulty);
  nlohmann::json slots = nlohmann::json::array();
  for (const SlotSpec& slot : goal.slots) {
    nlohmann::json s;
    s["domain"] = slot.domain;
    s["name"] = slot.name;
    s["kind"] = to_string(slot.kind);
    if (slot.value) s["value"] = *slot.value;
    if (slot.group) s["group"] = *slot.group;
    slots.push_back(std::move(s));
  }
  out["slots"] = std::move(slots);
  out["text"] = goal.text;
  return out;
}

std::vector<UserGoal> load_goal_suite(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open goal suite " + path.string());
  std::vector<UserGoal> goals;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      goals.push_back(goal_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(line_no, ex.what());
    } catch (const Error& ex) {
      throw ParseError(line_no, ex.what());
    }
  }
  return goals;
}

}  // namespace todsim
