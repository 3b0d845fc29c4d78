#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "todsim/dialogue.hpp"
#include "todsim/goal.hpp"

namespace todsim {

// Shared lexical tokenizer: case-fold, strip punctuation except intra-word
// apostrophes, split on whitespace.
std::vector<std::string> tokenize(const std::string& text);

// Bidirectional MTLD (mean of a forward and a backward factor pass).
// Throws DegenerateDiversity for fewer than 10 tokens or a zero factor total.
double mtld(const std::vector<std::string>& tokens, double threshold = 0.72);

struct DiversityReport {
  std::optional<double> mtld_score;  // absent when the token stream is degenerate
  int unigram_count = 0;
  double avg_utt_len = 0.0;
};

DiversityReport diversity_report(const std::vector<std::string>& user_utterances);

// ---- goal fulfillment ----

enum class ExtractorKind { acts, lexical };

using EntitySet = std::set<std::pair<std::string, std::string>>;

// Entities the user expressed across the dialogue. acts: union over the acts
// recorded on user utterances (NoActsAvailable when none are annotated).
// lexical: goal slot values found as substrings of normalized user text.
EntitySet extract_expressed_entities(const DialogueTranscript& transcript, const UserGoal& goal,
                                     ExtractorKind extractor);

struct PrfScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

PrfScores entity_prf(const EntitySet& expressed, const UserGoal& goal);

struct FulfillmentReport {
  std::string goal_id;
  bool completed = false;
  bool succeeded = false;
  std::optional<bool> book_ok;  // present only when the goal has book slots
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::map<std::string, bool> group_accuracy;
};

FulfillmentReport evaluate_fulfillment(const DialogueTranscript& transcript, const UserGoal& goal,
                                       ExtractorKind extractor);

struct CampaignTable {
  int dialogue_count = 0;
  double completion_rate = 0.0;
  double success_rate = 0.0;
  std::optional<double> book_rate;  // only over dialogues with book subtasks
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::map<std::string, double> group_accuracy_pct;
};

CampaignTable aggregate_campaign(const std::vector<FulfillmentReport>& reports);

// ---- utterance-level NLG metrics ----

double bleu(const std::vector<std::string>& candidate, const std::vector<std::string>& reference,
            int max_n = 4);
double rouge_l(const std::vector<std::string>& candidate,
               const std::vector<std::string>& reference);
double meteor_lite(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dimension() const = 0;
  virtual std::vector<double> embed(const std::string& text) const = 0;
};

// Offline default: hashed term-frequency bag of words over the shared
// tokenizer. Stateless, no network.
class TfEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit TfEmbeddingProvider(std::size_t dimension = 4096) : dimension_(dimension) {}
  std::size_t dimension() const override { return dimension_; }
  std::vector<double> embed(const std::string& text) const override;

 private:
  std::size_t dimension_;
};

double cosine_similarity(const std::string& a, const std::string& b,
                         const EmbeddingProvider& provider);

// ---- utterance-level NLU metrics ----

// Rule/lexicon-based stand-in for a TOD system's NLU component.
class UtteranceAnalyzer {
 public:
  virtual ~UtteranceAnalyzer() = default;
  virtual std::optional<std::string> intent(const std::string& text) const = 0;
  virtual std::vector<std::pair<std::string, std::string>> entities(
      const std::string& text) const = 0;
};

class LexicalAnalyzer : public UtteranceAnalyzer {
 public:
  explicit LexicalAnalyzer(std::vector<std::pair<std::string, std::string>> vocabulary)
      : vocabulary_(std::move(vocabulary)) {}

  std::optional<std::string> intent(const std::string& text) const override;
  std::vector<std::pair<std::string, std::string>> entities(
      const std::string& text) const override;

 private:
  std::vector<std::pair<std::string, std::string>> vocabulary_;  // (slot, value)
};

double intent_similarity(const std::string& generated, const std::string& target,
                         const UtteranceAnalyzer& analyzer, const EmbeddingProvider& provider);

// Replaces every known entity span with a placeholder on both sides, then
// takes the cosine similarity.
double masked_similarity(const std::string& generated, const std::string& target,
                         const UtteranceAnalyzer& analyzer, const EmbeddingProvider& provider);

std::string mask_entities(const std::string& text, const UtteranceAnalyzer& analyzer);

PrfScores nlu_entity_prf(const std::string& generated, const std::string& target,
                         const UtteranceAnalyzer& analyzer);

struct UtteranceScore {
  double bleu = 0.0;
  double rouge_l = 0.0;
  double meteor_lite = 0.0;
  double cosine = 0.0;
  double intent_cosine = 0.0;
  double masked_cosine = 0.0;
  double ent_p = 0.0;
  double ent_r = 0.0;
  double ent_f1 = 0.0;
};

UtteranceScore score_utterance(const std::string& generated, const std::string& target,
                               const UtteranceAnalyzer& analyzer,
                               const EmbeddingProvider& provider);

}  // namespace todsim
