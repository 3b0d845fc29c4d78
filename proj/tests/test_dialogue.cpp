#include <filesystem>

#include "doctest.h"
#include "todsim/dialogue.hpp"
#include "todsim/errors.hpp"
#include "todsim/metrics.hpp"
#include "todsim/rng.hpp"

using namespace todsim;

TEST_CASE("append enforces system-first alternation") {
  DialogueTranscript transcript("g");
  CHECK_THROWS_AS(transcript.append(Speaker::user, "hi"), AlternationViolation);
  transcript.append(Speaker::system, "hello");
  CHECK(transcript.utterances().size() == 1);
  CHECK(transcript.utterances()[0].turn_index == 1);
  CHECK_THROWS_AS(transcript.append(Speaker::system, "again"), AlternationViolation);
  transcript.append(Speaker::user, "hi there");
  CHECK(transcript.utterances()[1].turn_index == 1);
  CHECK(transcript.exchanges() == 1);
  transcript.append(Speaker::system, "next");
  CHECK(transcript.utterances()[2].turn_index == 2);
}

TEST_CASE("terminated transcripts reject further writes") {
  DialogueTranscript transcript("g");
  transcript.append(Speaker::system, "hello");
  transcript.terminate(Termination::system_end);
  CHECK_THROWS_AS(transcript.append(Speaker::user, "hi"), AlreadyTerminated);
  CHECK_THROWS_AS(transcript.terminate(Termination::max_turns), AlreadyTerminated);
}

TEST_CASE("random interleavings either round-trip or raise AlternationViolation") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    DialogueTranscript transcript("g");
    std::vector<Speaker> sequence;
    const int length = 1 + static_cast<int>(rng.uniform(8));
    bool threw = false;
    for (int i = 0; i < length && !threw; ++i) {
      const Speaker speaker = rng.uniform(2) == 0 ? Speaker::system : Speaker::user;
      try {
        transcript.append(speaker, "utterance");
        sequence.push_back(speaker);
      } catch (const AlternationViolation&) {
        threw = true;
      }
    }
    // whatever was accepted alternates and starts with the system
    for (std::size_t i = 0; i < sequence.size(); ++i) {
      CHECK(sequence[i] == (i % 2 == 0 ? Speaker::system : Speaker::user));
    }
  }
}

TEST_CASE("corpus_stats averages turns and words") {
  DialogueTranscript transcript("g");
  transcript.append(Speaker::system, "greetings traveler how are you");
  transcript.append(Speaker::user, "hello there");
  transcript.append(Speaker::system, "farewell then");
  transcript.append(Speaker::user, "bye");
  const CorpusStats stats = corpus_stats({transcript}, tokenize);
  CHECK(stats.dialogue_count == 1);
  CHECK(stats.avg_turns == doctest::Approx(2.0));
  CHECK(stats.avg_user_words == doctest::Approx(1.5));
  CHECK(stats.avg_system_words == doctest::Approx(3.5));
}

TEST_CASE("corpus_stats trailing system utterance counts only via the flag") {
  DialogueTranscript transcript("g");
  transcript.append(Speaker::system, "hello");
  transcript.append(Speaker::user, "hi");
  transcript.append(Speaker::system, "anything else?");
  CHECK(corpus_stats({transcript}, tokenize).avg_turns == doctest::Approx(1.0));
  CHECK(corpus_stats({transcript}, tokenize, true).avg_turns == doctest::Approx(1.5));
}

TEST_CASE("corpus_stats rejects an empty corpus and ignores order") {
  CHECK_THROWS_AS(corpus_stats({}, tokenize), EmptyCorpus);

  DialogueTranscript a("a"), b("b");
  a.append(Speaker::system, "one two three");
  a.append(Speaker::user, "four");
  b.append(Speaker::system, "x");
  b.append(Speaker::user, "y z");
  const CorpusStats ab = corpus_stats({a, b}, tokenize);
  const CorpusStats ba = corpus_stats({b, a}, tokenize);
  CHECK(ab.avg_turns == ba.avg_turns);
  CHECK(ab.avg_user_words == ba.avg_user_words);
  CHECK(ab.avg_system_words == ba.avg_system_words);
}

TEST_CASE("transcripts round-trip through JSONL") {
  DialogueTranscript transcript("goal-7");
  transcript.metadata()["seed"] = "42";
  std::vector<DialogueAct> acts;
  acts.push_back({"inform", {{"food", "indian"}}});
  transcript.append(Speaker::system, "hello");
  transcript.append(Speaker::user, "i want indian food", acts);
  transcript.terminate(Termination::agent_end);

  const auto path = std::filesystem::temp_directory_path() / "todsim_transcripts.jsonl";
  save_transcripts_jsonl({transcript}, path);
  const auto loaded = load_transcripts_jsonl(path);
  REQUIRE(loaded.size() == 1);
  CHECK(transcript_to_json(loaded[0]).dump() == transcript_to_json(transcript).dump());
  std::filesystem::remove(path);
}
