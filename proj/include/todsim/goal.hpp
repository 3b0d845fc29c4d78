#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace todsim {

enum class SlotKind { inform, request, book };
enum class Subtask { book, cancel, reschedule, other };
enum class Difficulty { easy, hard };

std::string to_string(SlotKind kind);
std::string to_string(Subtask subtask);
std::string to_string(Difficulty difficulty);
SlotKind slot_kind_from_string(const std::string& text);
Subtask subtask_from_string(const std::string& text);
Difficulty difficulty_from_string(const std::string& text);

// One inform/request/book entity of a user goal. Values are normalized at
// construction so entity matching downstream compares like with like.
struct SlotSpec {
  std::string domain;
  std::string name;
  SlotKind kind = SlotKind::inform;
  std::optional<std::string> value;  // present iff kind != request
  std::optional<std::string> group;  // caller_info, car_info, transport_type, ...

  static SlotSpec inform(std::string domain, std::string name, std::string value,
                         std::optional<std::string> group = std::nullopt);
  static SlotSpec request(std::string domain, std::string name,
                          std::optional<std::string> group = std::nullopt);
  static SlotSpec book(std::string domain, std::string name, std::string value,
                       std::optional<std::string> group = std::nullopt);
};

struct UserGoal {
  std::string id;
  std::optional<Subtask> subtask;
  std::optional<Difficulty> difficulty;
  std::vector<SlotSpec> slots;
  std::string text;                   // natural-language rendering
  std::vector<std::string> domains;   // distinct slot domains, first-seen order

  // Recomputes `domains` and checks the slot invariants; throws ParseError-free
  // std::invalid_argument style via Error subclasses is avoided here: invalid
  // construction is a programming error, so this throws Error directly.
  void finalize();
};

// Sentence templates for deterministic goal rendering. Lookup order for a
// slot line: "domain.name", then "name", then the slot kind.
struct GoalTemplates {
  std::map<std::string, std::string> preambles;   // keyed by subtask or "default"
  std::map<std::string, std::string> slot_lines;  // "{name}" / "{value}" placeholders
};

GoalTemplates default_goal_templates();

std::string render_goal(const UserGoal& goal, const GoalTemplates& templates);

// Frequency tables estimated from a goal corpus: how often each ordered
// domain combination occurs, which slots each domain carries, and how often
// each value shows up per (domain, slot).
struct GoalDistribution {
  struct SlotShape {
    std::string name;
    SlotKind kind = SlotKind::inform;
    std::optional<std::string> group;
  };

  std::map<std::vector<std::string>, int> combination_counts;
  std::map<std::string, std::vector<SlotShape>> domain_slots;
  std::map<std::pair<std::string, std::string>, std::map<std::string, int>> value_counts;
};

GoalDistribution estimate_distribution(const std::vector<UserGoal>& corpus);

// Two-stage sampling: domain combination by cumulative frequency, then each
// slot value by its own frequency. Same seed, same goal.
UserGoal sample_goal(const GoalDistribution& dist, std::uint64_t rng_seed);

// Line-oriented JSON goal suite (one goal object per line). Goals without an
// explicit "text" field are rendered with the default templates.
std::vector<UserGoal> load_goal_suite(const std::filesystem::path& path);

UserGoal goal_from_json(const nlohmann::json& value);
nlohmann::json goal_to_json(const UserGoal& goal);

}  // namespace todsim
