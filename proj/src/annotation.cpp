#include "todsim/annotation.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "todsim/errors.hpp"
#include "todsim/text.hpp"

namespace todsim {

std::string to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::hallucination: return "hallucination";
    case ErrorCategory::looping_simulator: return "looping_simulator";
    case ErrorCategory::incomplete_goal: return "incomplete_goal";
    case ErrorCategory::looping_system: return "looping_system";
    case ErrorCategory::nlu_misclassification: return "nlu_misclassification";
    case ErrorCategory::forced_end: return "forced_end";
  }
  return "hallucination";
}

std::string display_label(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::hallucination: return "Hallucination";
    case ErrorCategory::looping_simulator: return "Looping simulator";
    case ErrorCategory::incomplete_goal: return "Incomplete goal";
    case ErrorCategory::looping_system: return "Looping system";
    case ErrorCategory::nlu_misclassification: return "NLU misclassification";
    case ErrorCategory::forced_end: return "Forced end";
  }
  return "Hallucination";
}

ErrorCategory error_category_from_string(const std::string& text) {
  for (ErrorCategory category : kAllErrorCategories) {
    if (to_string(category) == text) return category;
  }
  throw Error("ParseError", "unknown error category '" + text + "'");
}

std::map<ErrorCategory, bool> majority_vote(const std::vector<AnnotationRecord>& records) {
  if (records.empty()) throw EmptyInput("annotation records");
  const std::string& dialogue_id = records.front().dialogue_id;
  for (const AnnotationRecord& record : records) {
    if (record.dialogue_id != dialogue_id) throw MixedDialogueIds();
  }
  std::map<ErrorCategory, bool> voted;
  for (ErrorCategory category : kAllErrorCategories) {
    int flags = 0;
    for (const AnnotationRecord& record : records) {
      auto it = record.labels.find(category);
      if (it != record.labels.end() && it->second) ++flags;
    }
    voted[category] = 2 * flags > static_cast<int>(records.size());
  }
  return voted;
}

std::map<ErrorCategory, int> prevalence(
    const std::vector<std::map<ErrorCategory, bool>>& voted_labels) {
  if (voted_labels.empty()) throw EmptyInput("voted labels");
  std::map<ErrorCategory, int> out;
  for (ErrorCategory category : kAllErrorCategories) {
    int flagged = 0;
    for (const auto& labels : voted_labels) {
      auto it = labels.find(category);
      if (it != labels.end() && it->second) ++flagged;
    }
    out[category] = static_cast<int>(std::lround(
        100.0 * static_cast<double>(flagged) / static_cast<double>(voted_labels.size())));
  }
  return out;
}

double fleiss_kappa(const std::vector<AnnotationRecord>& records, ErrorCategory category) {
  // group ratings per dialogue, first-seen order
  std::vector<std::string> order;
  std::map<std::string, std::pair<int, int>> per_dialogue;  // id -> (flags, raters)
  for (const AnnotationRecord& record : records) {
    auto [it, inserted] = per_dialogue.emplace(record.dialogue_id, std::make_pair(0, 0));
    if (inserted) order.push_back(record.dialogue_id);
    auto label = record.labels.find(category);
    if (label != record.labels.end() && label->second) it->second.first += 1;
    it->second.second += 1;
  }
  if (order.size() < 2) {
    throw UnbalancedDesign("need at least 2 dialogues, got " + std::to_string(order.size()));
  }
  const int raters = per_dialogue[order.front()].second;
  if (raters < 2) throw UnbalancedDesign("need at least 2 annotators per dialogue");
  for (const std::string& id : order) {
    if (per_dialogue[id].second != raters) {
      throw UnbalancedDesign("dialogue '" + id + "' has " +
                             std::to_string(per_dialogue[id].second) + " ratings, expected " +
                             std::to_string(raters));
    }
  }

  const auto item_count = static_cast<double>(order.size());
  const auto n = static_cast<double>(raters);
  double p_bar = 0.0;
  double flag_fraction = 0.0;
  for (const std::string& id : order) {
    const auto flags = static_cast<double>(per_dialogue[id].first);
    const double agreement = (flags * (flags - 1.0) + (n - flags) * (n - flags - 1.0)) /
                             (n * (n - 1.0));
    p_bar += agreement / item_count;
    flag_fraction += flags / (n * item_count);
  }
  const double p_expected =
      flag_fraction * flag_fraction + (1.0 - flag_fraction) * (1.0 - flag_fraction);
  if (p_expected >= 1.0) throw DegenerateDistribution();
  return (p_bar - p_expected) / (1.0 - p_expected);
}

std::vector<std::map<ErrorCategory, bool>> vote_by_dialogue(
    const std::vector<AnnotationRecord>& records) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<AnnotationRecord>> groups;
  for (const AnnotationRecord& record : records) {
    auto [it, inserted] = groups.emplace(record.dialogue_id, std::vector<AnnotationRecord>{});
    if (inserted) order.push_back(record.dialogue_id);
    it->second.push_back(record);
  }
  std::vector<std::map<ErrorCategory, bool>> voted;
  voted.reserve(order.size());
  for (const std::string& id : order) voted.push_back(majority_vote(groups[id]));
  return voted;
}

std::vector<AnnotationRecord> load_annotations_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open annotations " + path.string());

  const auto split = [](const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream stream(line);
    std::string field;
    while (std::getline(stream, field, ',')) fields.push_back(trim(field));
    return fields;
  };

  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  const std::vector<std::string> header = split(line);
  if (header.size() < 3 || header[0] != "dialogue_id" || header[1] != "annotator_id") {
    throw ParseError(1, "header must start with dialogue_id, annotator_id");
  }
  std::vector<ErrorCategory> columns;
  for (std::size_t i = 2; i < header.size(); ++i) {
    columns.push_back(error_category_from_string(header[i]));
  }

  std::vector<AnnotationRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split(line);
    if (fields.size() != header.size()) {
      throw ParseError(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    AnnotationRecord record;
    record.dialogue_id = fields[0];
    record.annotator_id = fields[1];
    for (ErrorCategory category : kAllErrorCategories) record.labels[category] = false;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      const std::string& cell = fields[i + 2];
      if (cell != "0" && cell != "1") throw ParseError(line_no, "label cells must be 0 or 1");
      record.labels[columns[i]] = cell == "1";
    }
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace todsim
