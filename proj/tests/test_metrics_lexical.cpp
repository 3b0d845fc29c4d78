#include <algorithm>
#include <set>

#include "doctest.h"
#include "todsim/errors.hpp"
#include "todsim/metrics.hpp"
#include "todsim/rng.hpp"

using namespace todsim;

namespace {

// Independent MTLD reference: recomputes the type-token ratio of the open
// segment from scratch at every step instead of keeping running counts.
double mtld_reference_pass(const std::vector<std::string>& tokens, double threshold) {
  double factors = 0.0;
  std::vector<std::string> segment;
  double last_ttr = 1.0;
  for (const std::string& token : tokens) {
    segment.push_back(token);
    const std::set<std::string> types(segment.begin(), segment.end());
    last_ttr = static_cast<double>(types.size()) / static_cast<double>(segment.size());
    if (last_ttr <= threshold) {
      factors += 1.0;
      segment.clear();
      last_ttr = 1.0;
    }
  }
  if (!segment.empty()) factors += (1.0 - last_ttr) / (1.0 - threshold);
  if (factors <= 0.0) throw DegenerateDiversity("reference: zero factors");
  return static_cast<double>(tokens.size()) / factors;
}

double mtld_reference(const std::vector<std::string>& tokens, double threshold = 0.72) {
  std::vector<std::string> reversed(tokens.rbegin(), tokens.rend());
  return 0.5 * (mtld_reference_pass(tokens, threshold) +
                mtld_reference_pass(reversed, threshold));
}

std::vector<std::string> random_tokens(Rng& rng, std::size_t length, int vocabulary) {
  std::vector<std::string> tokens;
  tokens.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    tokens.push_back("w" + std::to_string(rng.uniform(static_cast<std::uint64_t>(vocabulary))));
  }
  return tokens;
}

}  // namespace

TEST_CASE("tokenize folds case and strips punctuation, keeping apostrophes") {
  CHECK(tokenize("I'd like Indian food.") ==
        std::vector<std::string>{"i'd", "like", "indian", "food"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("8PM!!") == std::vector<std::string>{"8pm"});
  CHECK(tokenize("'quoted' words") == std::vector<std::string>{"quoted", "words"});
  CHECK(tokenize("don't stop") == std::vector<std::string>{"don't", "stop"});
}

TEST_CASE("mtld hand-derived case: ten repeats give exactly 2.0") {
  const std::vector<std::string> tokens(10, "a");
  CHECK(mtld(tokens) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("mtld degenerate inputs") {
  // ten distinct tokens: the ratio never crosses the threshold
  std::vector<std::string> distinct;
  for (int i = 0; i < 10; ++i) distinct.push_back("t" + std::to_string(i));
  CHECK_THROWS_AS(mtld(distinct), DegenerateDiversity);
  CHECK_THROWS_AS(mtld({"a", "b", "c"}), DegenerateDiversity);
}

TEST_CASE("mtld equals the brute-force reference on random inputs") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t length = 10 + rng.uniform(491);
    const int vocabulary = 2 + static_cast<int>(rng.uniform(30));
    const std::vector<std::string> tokens = random_tokens(rng, length, vocabulary);
    double ours = 0.0, reference = 0.0;
    bool ours_threw = false, reference_threw = false;
    try {
      ours = mtld(tokens);
    } catch (const DegenerateDiversity&) {
      ours_threw = true;
    }
    try {
      reference = mtld_reference(tokens);
    } catch (const DegenerateDiversity&) {
      reference_threw = true;
    }
    CHECK(ours_threw == reference_threw);
    if (!ours_threw) CHECK(ours == doctest::Approx(reference).epsilon(1e-9));
  }
}

TEST_CASE("mtld is order-sensitive while unigram_count is not") {
  Rng rng(5);
  std::vector<std::string> tokens = random_tokens(rng, 200, 12);
  const double original = mtld(tokens);
  std::vector<std::string> shuffled = tokens;
  for (std::size_t i = shuffled.size(); i > 1; --i) {
    std::swap(shuffled[i - 1], shuffled[rng.uniform(i)]);
  }
  REQUIRE(shuffled != tokens);
  CHECK(mtld(shuffled) != original);
  const std::set<std::string> a(tokens.begin(), tokens.end());
  const std::set<std::string> b(shuffled.begin(), shuffled.end());
  CHECK(a == b);
}

TEST_CASE("diversity_report aggregates user utterances") {
  SUBCASE("tiny corpus counts") {
    // too few tokens for MTLD, but the other fields are well-defined
    CHECK_THROWS_AS(diversity_report({"yes", "yes"}), DegenerateDiversity);
  }
  SUBCASE("unigrams and utterance length") {
    std::vector<std::string> utterances;
    for (int i = 0; i < 6; ++i) utterances.push_back("yes yes");
    const DiversityReport report = diversity_report(utterances);
    CHECK(report.unigram_count == 1);
    CHECK(report.avg_utt_len == doctest::Approx(2.0));
    CHECK(report.mtld_score == doctest::Approx(2.0));
  }
  SUBCASE("empty input") {
    CHECK_THROWS_AS(diversity_report({}), EmptyInput);
  }
}
