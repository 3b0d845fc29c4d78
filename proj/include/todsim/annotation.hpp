#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace todsim {

// Six-category error taxonomy: three simulator failures, three TOD failures.
enum class ErrorCategory {
  hallucination,
  looping_simulator,
  incomplete_goal,
  looping_system,
  nlu_misclassification,
  forced_end,
};

inline constexpr std::array<ErrorCategory, 6> kAllErrorCategories = {
    ErrorCategory::hallucination,      ErrorCategory::looping_simulator,
    ErrorCategory::incomplete_goal,    ErrorCategory::looping_system,
    ErrorCategory::nlu_misclassification, ErrorCategory::forced_end,
};

std::string to_string(ErrorCategory category);
std::string display_label(ErrorCategory category);
ErrorCategory error_category_from_string(const std::string& text);

struct AnnotationRecord {
  std::string dialogue_id;
  std::string annotator_id;
  std::map<ErrorCategory, bool> labels;  // all six categories present
};

// Category flagged iff strictly more than half of the annotators flagged it.
std::map<ErrorCategory, bool> majority_vote(const std::vector<AnnotationRecord>& records);

// Percentage of dialogues flagged per category, rounded to whole percent.
std::map<ErrorCategory, int> prevalence(
    const std::vector<std::map<ErrorCategory, bool>>& voted_labels);

// Binary Fleiss' kappa for one category over all dialogues. Requires the same
// number (>= 2) of annotators per dialogue and at least 2 dialogues.
double fleiss_kappa(const std::vector<AnnotationRecord>& records, ErrorCategory category);

// CSV: dialogue_id, annotator_id, then one 0/1 column per category.
std::vector<AnnotationRecord> load_annotations_csv(const std::filesystem::path& path);

// Groups by dialogue id (first-seen order) and majority-votes each group.
std::vector<std::map<ErrorCategory, bool>> vote_by_dialogue(
    const std::vector<AnnotationRecord>& records);

}  // namespace todsim
