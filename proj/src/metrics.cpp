#include "todsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "todsim/errors.hpp"
#include "todsim/text.hpp"

namespace todsim {

std::vector<std::string> tokenize(const std::string& text) {
  const std::string lowered = to_lower(text);
  std::vector<std::string> tokens;
  std::string current;
  const auto flush = [&tokens, &current]() {
    // apostrophes are intra-word only; strip them at token edges
    std::size_t begin = 0, end = current.size();
    while (begin < end && current[begin] == '\'') ++begin;
    while (end > begin && current[end - 1] == '\'') --end;
    if (end > begin) tokens.push_back(current.substr(begin, end - begin));
    current.clear();
  };
  for (char c : lowered) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc) || c == '\'') {
      current.push_back(c);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

namespace {

// One directional MTLD pass over the token stream.
double mtld_pass(const std::vector<std::string>& tokens, double threshold, bool backward) {
  double factors = 0.0;
  std::map<std::string, int> type_counts;
  int segment_tokens = 0;
  double ttr = 1.0;
  const auto step = [&](const std::string& token) {
    type_counts[token] += 1;
    ++segment_tokens;
    ttr = static_cast<double>(type_counts.size()) / static_cast<double>(segment_tokens);
    if (ttr <= threshold) {
      factors += 1.0;
      type_counts.clear();
      segment_tokens = 0;
      ttr = 1.0;
    }
  };
  if (backward) {
    for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) step(*it);
  } else {
    for (const std::string& token : tokens) step(token);
  }
  if (segment_tokens > 0) {
    factors += (1.0 - ttr) / (1.0 - threshold);
  }
  if (factors <= 0.0) {
    throw DegenerateDiversity("type-token ratio never crossed the threshold");
  }
  return static_cast<double>(tokens.size()) / factors;
}

}  // namespace

double mtld(const std::vector<std::string>& tokens, double threshold) {
  if (tokens.size() < 10) {
    throw DegenerateDiversity("need at least 10 tokens, got " + std::to_string(tokens.size()));
  }
  const double forward = mtld_pass(tokens, threshold, false);
  const double reverse = mtld_pass(tokens, threshold, true);
  return 0.5 * (forward + reverse);
}

DiversityReport diversity_report(const std::vector<std::string>& user_utterances) {
  if (user_utterances.empty()) throw EmptyInput("utterance list");
  DiversityReport report;
  std::set<std::string> unigrams;
  std::vector<std::string> stream;
  std::size_t token_total = 0;
  for (const std::string& utterance : user_utterances) {
    const std::vector<std::string> tokens = tokenize(utterance);
    token_total += tokens.size();
    unigrams.insert(tokens.begin(), tokens.end());
    stream.insert(stream.end(), tokens.begin(), tokens.end());
  }
  report.unigram_count = static_cast<int>(unigrams.size());
  report.avg_utt_len =
      static_cast<double>(token_total) / static_cast<double>(user_utterances.size());
  try {
    report.mtld_score = mtld(stream);
  } catch (const DegenerateDiversity&) {
    // terse campaigns (one-word replies) have no defined MTLD
  }
  return report;
}

// ---- goal fulfillment ----

namespace {

EntitySet goal_entity_set(const UserGoal& goal) {
  EntitySet entities;
  for (const SlotSpec& slot : goal.slots) {
    if (slot.kind != SlotKind::request && slot.value.has_value()) {
      entities.emplace(slot.name, *slot.value);
    }
  }
  return entities;
}

std::string display_name(const std::string& slot_name) {
  std::string out = slot_name;
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

}  // namespace

EntitySet extract_expressed_entities(const DialogueTranscript& transcript, const UserGoal& goal,
                                     ExtractorKind extractor) {
  EntitySet expressed;
  if (extractor == ExtractorKind::acts) {
    bool any_annotated = false;
    for (const Utterance& utterance : transcript.utterances()) {
      if (utterance.speaker != Speaker::user || !utterance.acts.has_value()) continue;
      any_annotated = true;
      for (const DialogueAct& act : *utterance.acts) {
        for (const auto& [slot, value] : act.entities) {
          expressed.emplace(slot, normalize_value(value));
        }
      }
    }
    if (!any_annotated) throw NoActsAvailable();
    return expressed;
  }
  for (const Utterance& utterance : transcript.utterances()) {
    if (utterance.speaker != Speaker::user) continue;
    const std::string text = normalize_value(utterance.text);
    for (const SlotSpec& slot : goal.slots) {
      if (slot.kind == SlotKind::request || !slot.value.has_value()) continue;
      if (text.find(*slot.value) != std::string::npos) {
        expressed.emplace(slot.name, *slot.value);
      }
    }
  }
  return expressed;
}

PrfScores entity_prf(const EntitySet& expressed, const UserGoal& goal) {
  const EntitySet target = goal_entity_set(goal);
  if (target.empty()) return {1.0, 1.0, 1.0};
  if (expressed.empty()) return {0.0, 0.0, 0.0};
  std::size_t hits = 0;
  for (const auto& entity : expressed) {
    if (target.count(entity) > 0) ++hits;
  }
  PrfScores scores;
  scores.precision = static_cast<double>(hits) / static_cast<double>(expressed.size());
  scores.recall = static_cast<double>(hits) / static_cast<double>(target.size());
  scores.f1 = (scores.precision + scores.recall) == 0.0
                  ? 0.0
                  : 2.0 * scores.precision * scores.recall / (scores.precision + scores.recall);
  return scores;
}

namespace {

bool request_answered(const DialogueTranscript& transcript, const SlotSpec& slot) {
  const std::string needle = display_name(slot.name);
  for (const Utterance& utterance : transcript.utterances()) {
    if (utterance.speaker != Speaker::system) continue;
    if (utterance.acts.has_value()) {
      for (const DialogueAct& act : *utterance.acts) {
        if (act.intent != "inform") continue;
        for (const auto& [name, value] : act.entities) {
          if (name == slot.name) return true;
        }
      }
    }
    if (normalize_value(utterance.text).find(needle) != std::string::npos) return true;
  }
  return false;
}

std::vector<std::map<std::string, std::string>> confirmed_bookings(
    const DialogueTranscript& transcript) {
  std::vector<std::map<std::string, std::string>> bookings;
  for (const Utterance& utterance : transcript.utterances()) {
    if (utterance.speaker != Speaker::system || !utterance.acts.has_value()) continue;
    for (const DialogueAct& act : *utterance.acts) {
      if (act.intent != "book_confirm") continue;
      std::map<std::string, std::string> booking;
      for (const auto& [slot, value] : act.entities) booking[slot] = normalize_value(value);
      bookings.push_back(std::move(booking));
    }
  }
  return bookings;
}

}  // namespace

FulfillmentReport evaluate_fulfillment(const DialogueTranscript& transcript, const UserGoal& goal,
                                       ExtractorKind extractor) {
  if (!transcript.termination().has_value()) {
    throw Error("NotTerminated", "fulfillment is only defined for terminated dialogues");
  }
  FulfillmentReport report;
  report.goal_id = goal.id;
  const EntitySet expressed = extract_expressed_entities(transcript, goal, extractor);

  bool all_informed = true;
  bool all_requests_answered = true;
  std::vector<const SlotSpec*> book_slots;
  for (const SlotSpec& slot : goal.slots) {
    if (slot.kind == SlotKind::request) {
      if (!request_answered(transcript, slot)) all_requests_answered = false;
      continue;
    }
    if (expressed.count({slot.name, slot.value.value_or("")}) == 0) all_informed = false;
    if (slot.kind == SlotKind::book) book_slots.push_back(&slot);
  }
  report.completed = all_informed && all_requests_answered;

  if (!book_slots.empty()) {
    bool ok = false;
    for (const auto& booking : confirmed_bookings(transcript)) {
      ok = std::all_of(book_slots.begin(), book_slots.end(), [&booking](const SlotSpec* slot) {
        auto it = booking.find(slot->name);
        return it != booking.end() && it->second == *slot->value;
      });
      if (ok) break;
    }
    report.book_ok = ok;
  }
  report.succeeded = report.completed && report.book_ok.value_or(true);

  for (const SlotSpec& slot : goal.slots) {
    if (!slot.group.has_value() || slot.kind == SlotKind::request) continue;
    const bool hit = expressed.count({slot.name, slot.value.value_or("")}) > 0;
    auto [it, inserted] = report.group_accuracy.emplace(*slot.group, hit);
    if (!inserted) it->second = it->second && hit;
  }

  const PrfScores scores = entity_prf(expressed, goal);
  report.precision = scores.precision;
  report.recall = scores.recall;
  report.f1 = scores.f1;
  return report;
}

CampaignTable aggregate_campaign(const std::vector<FulfillmentReport>& reports) {
  if (reports.empty()) throw EmptyInput("report list");
  CampaignTable table;
  table.dialogue_count = static_cast<int>(reports.size());
  int completed = 0, succeeded = 0, book_total = 0, book_ok = 0;
  double p = 0.0, r = 0.0, f1 = 0.0;
  std::map<std::string, std::pair<int, int>> groups;  // group -> (hits, total)
  for (const FulfillmentReport& report : reports) {
    completed += report.completed ? 1 : 0;
    succeeded += report.succeeded ? 1 : 0;
    if (report.book_ok.has_value()) {
      ++book_total;
      book_ok += *report.book_ok ? 1 : 0;
    }
    p += report.precision;
    r += report.recall;
    f1 += report.f1;
    for (const auto& [group, hit] : report.group_accuracy) {
      auto& [hits, total] = groups[group];
      hits += hit ? 1 : 0;
      ++total;
    }
  }
  const auto n = static_cast<double>(reports.size());
  table.completion_rate = completed / n;
  table.success_rate = succeeded / n;
  if (book_total > 0) table.book_rate = static_cast<double>(book_ok) / book_total;
  table.precision = p / n;
  table.recall = r / n;
  table.f1 = f1 / n;
  for (const auto& [group, counts] : groups) {
    table.group_accuracy_pct[group] =
        100.0 * static_cast<double>(counts.first) / static_cast<double>(counts.second);
  }
  return table;
}

// ---- utterance-level NLG metrics ----

namespace {

using Ngram = std::vector<std::string>;

std::map<Ngram, int> ngram_counts(const std::vector<std::string>& tokens, int n) {
  std::map<Ngram, int> counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i) {
    counts[Ngram(tokens.begin() + static_cast<long>(i),
                 tokens.begin() + static_cast<long>(i) + n)] += 1;
  }
  return counts;
}

}  // namespace

double bleu(const std::vector<std::string>& candidate, const std::vector<std::string>& reference,
            int max_n) {
  if (candidate.empty()) return 0.0;
  const int order = std::min<int>(max_n, static_cast<int>(candidate.size()));
  double log_sum = 0.0;
  for (int n = 1; n <= order; ++n) {
    const auto cand = ngram_counts(candidate, n);
    const auto ref = ngram_counts(reference, n);
    int matches = 0, total = 0;
    for (const auto& [gram, count] : cand) {
      total += count;
      auto it = ref.find(gram);
      if (it != ref.end()) matches += std::min(count, it->second);
    }
    double precision;
    if (matches == 0) {
      if (n == 1) return 0.0;
      precision = 1.0 / (total + 1.0);  // add-one smoothing on zero counts
    } else {
      precision = static_cast<double>(matches) / total;
    }
    log_sum += std::log(precision) / order;
  }
  const auto c = static_cast<double>(candidate.size());
  const auto r = static_cast<double>(reference.size());
  const double brevity = c >= r ? 1.0 : std::exp(1.0 - r / c);
  return brevity * std::exp(log_sum);
}

double rouge_l(const std::vector<std::string>& candidate,
               const std::vector<std::string>& reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  const std::size_t n = candidate.size(), m = reference.size();
  std::vector<std::vector<int>> lcs(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      lcs[i][j] = candidate[i - 1] == reference[j - 1]
                      ? lcs[i - 1][j - 1] + 1
                      : std::max(lcs[i - 1][j], lcs[i][j - 1]);
    }
  }
  const double longest = lcs[n][m];
  if (longest == 0.0) return 0.0;
  const double precision = longest / static_cast<double>(n);
  const double recall = longest / static_cast<double>(m);
  return 2.0 * precision * recall / (precision + recall);
}

double meteor_lite(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  std::vector<bool> used(reference.size(), false);
  std::vector<std::pair<std::size_t, std::size_t>> alignment;  // (cand pos, ref pos)
  for (std::size_t i = 0; i < candidate.size(); ++i) {
    for (std::size_t j = 0; j < reference.size(); ++j) {
      if (!used[j] && reference[j] == candidate[i]) {
        used[j] = true;
        alignment.emplace_back(i, j);
        break;
      }
    }
  }
  if (alignment.empty()) return 0.0;
  const auto matches = static_cast<double>(alignment.size());
  const double precision = matches / static_cast<double>(candidate.size());
  const double recall = matches / static_cast<double>(reference.size());
  const double f_mean = 10.0 * precision * recall / (recall + 9.0 * precision);
  int chunks = 1;
  for (std::size_t k = 1; k < alignment.size(); ++k) {
    const bool contiguous = alignment[k].first == alignment[k - 1].first + 1 &&
                            alignment[k].second == alignment[k - 1].second + 1;
    if (!contiguous) ++chunks;
  }
  const double penalty = 0.5 * std::pow(static_cast<double>(chunks) / matches, 3.0);
  return f_mean * (1.0 - penalty);
}

std::vector<double> TfEmbeddingProvider::embed(const std::string& text) const {
  std::vector<double> vec(dimension_, 0.0);
  for (const std::string& token : tokenize(text)) {
    vec[fnv1a64(token) % dimension_] += 1.0;
  }
  return vec;
}

double cosine_similarity(const std::string& a, const std::string& b,
                         const EmbeddingProvider& provider) {
  const std::vector<double> va = provider.embed(a);
  const std::vector<double> vb = provider.embed(b);
  if (va.size() != provider.dimension() || vb.size() != provider.dimension()) {
    throw ProviderFailure("provider returned a vector of the wrong dimension");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    dot += va[i] * vb[i];
    na += va[i] * va[i];
    nb += vb[i] * vb[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// ---- utterance-level NLU metrics ----

std::optional<std::string> LexicalAnalyzer::intent(const std::string& text) const {
  const std::string normalized = normalize_value(text);
  if (normalized.empty()) return std::nullopt;
  if (normalized.find("thank") != std::string::npos) return "thanks";
  if (normalized.find("bye") != std::string::npos) return "goodbye";
  if (!entities(text).empty()) return "inform";
  static const char* kQuestionLeads[] = {"what", "when", "where", "which", "could",
                                         "can",  "do",   "is",    "how"};
  if (text.find('?') != std::string::npos) return "request";
  for (const char* lead : kQuestionLeads) {
    if (normalized.rfind(lead, 0) == 0) return "request";
  }
  return "other";
}

std::vector<std::pair<std::string, std::string>> LexicalAnalyzer::entities(
    const std::string& text) const {
  const std::string normalized = normalize_value(text);
  std::vector<std::pair<std::string, std::string>> found;
  for (const auto& [slot, value] : vocabulary_) {
    if (!value.empty() && normalized.find(normalize_value(value)) != std::string::npos) {
      found.emplace_back(slot, normalize_value(value));
    }
  }
  return found;
}

double intent_similarity(const std::string& generated, const std::string& target,
                         const UtteranceAnalyzer& analyzer, const EmbeddingProvider& provider) {
  const auto gen_intent = analyzer.intent(generated);
  const auto target_intent = analyzer.intent(target);
  if (!gen_intent.has_value() || !target_intent.has_value()) throw NoIntentExtracted();
  return cosine_similarity(*gen_intent, *target_intent, provider);
}

std::string mask_entities(const std::string& text, const UtteranceAnalyzer& analyzer) {
  std::string masked = normalize_value(text);
  std::vector<std::string> values;
  for (const auto& [slot, value] : analyzer.entities(text)) values.push_back(value);
  // longest first so contained values do not leave fragments behind
  std::sort(values.begin(), values.end(),
            [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
  for (const std::string& value : values) {
    std::size_t pos = 0;
    while ((pos = masked.find(value, pos)) != std::string::npos) {
      masked.replace(pos, value.size(), "ENTITY");
      pos += 6;
    }
  }
  return masked;
}

double masked_similarity(const std::string& generated, const std::string& target,
                         const UtteranceAnalyzer& analyzer, const EmbeddingProvider& provider) {
  return cosine_similarity(mask_entities(generated, analyzer), mask_entities(target, analyzer),
                           provider);
}

PrfScores nlu_entity_prf(const std::string& generated, const std::string& target,
                         const UtteranceAnalyzer& analyzer) {
  const auto to_set = [&analyzer](const std::string& text) {
    const auto list = analyzer.entities(text);
    return EntitySet(list.begin(), list.end());
  };
  const EntitySet gen = to_set(generated);
  const EntitySet ref = to_set(target);
  if (ref.empty()) return {1.0, 1.0, 1.0};
  if (gen.empty()) return {0.0, 0.0, 0.0};
  std::size_t hits = 0;
  for (const auto& entity : gen) {
    if (ref.count(entity) > 0) ++hits;
  }
  PrfScores scores;
  scores.precision = static_cast<double>(hits) / static_cast<double>(gen.size());
  scores.recall = static_cast<double>(hits) / static_cast<double>(ref.size());
  scores.f1 = (scores.precision + scores.recall) == 0.0
                  ? 0.0
                  : 2.0 * scores.precision * scores.recall / (scores.precision + scores.recall);
  return scores;
}

UtteranceScore score_utterance(const std::string& generated, const std::string& target,
                               const UtteranceAnalyzer& analyzer,
                               const EmbeddingProvider& provider) {
  UtteranceScore score;
  const auto gen_tokens = tokenize(generated);
  const auto target_tokens = tokenize(target);
  score.bleu = bleu(gen_tokens, target_tokens);
  score.rouge_l = rouge_l(gen_tokens, target_tokens);
  score.meteor_lite = meteor_lite(gen_tokens, target_tokens);
  score.cosine = cosine_similarity(generated, target, provider);
  score.intent_cosine = intent_similarity(generated, target, analyzer, provider);
  score.masked_cosine = masked_similarity(generated, target, analyzer, provider);
  const PrfScores prf = nlu_entity_prf(generated, target, analyzer);
  score.ent_p = prf.precision;
  score.ent_r = prf.recall;
  score.ent_f1 = prf.f1;
  return score;
}

}  // namespace todsim
