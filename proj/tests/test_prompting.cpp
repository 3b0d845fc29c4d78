#include <fstream>
#include <sstream>

#include "doctest.h"
#include "todsim/errors.hpp"
#include "todsim/prompting.hpp"

using namespace todsim;

namespace {

UserGoal tiny_goal() {
  UserGoal goal;
  goal.id = "g";
  goal.slots.push_back(SlotSpec::inform("restaurant", "food", "indian"));
  goal.finalize();
  goal.text = "You want to try an indian restaurant.";
  return goal;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

ShotSet two_shots() {
  ShotSet shots;
  for (int i = 0; i < 2; ++i) {
    UserGoal goal;
    goal.id = "shot-" + std::to_string(i + 1);
    goal.slots.push_back(
        SlotSpec::inform("restaurant", "food", i == 0 ? "chinese" : "italian"));
    goal.finalize();
    goal.text = i == 0 ? "You want chinese food for 2 people."
                       : "You want an italian place in the centre.";
    DialogueTranscript dialogue("shot-" + std::to_string(i + 1));
    dialogue.append(Speaker::system, "Hello, how can I help?");
    dialogue.append(Speaker::user,
                    i == 0 ? "I would like chinese food." : "An italian restaurant please.");
    shots.dialogues.emplace_back(std::move(goal), std::move(dialogue));
  }
  return shots;
}

}  // namespace

TEST_CASE("build_prompt empty history is description, goal, cue") {
  PromptTemplate tmpl;
  const UserGoal goal = tiny_goal();
  const std::string prompt = build_prompt(tmpl, goal, DialogueTranscript("g"));
  CHECK(prompt == tmpl.task_description + "\n\n" + goal.text + "\nCUSTOMER:");
  CHECK(prompt.find(tmpl.separator) == std::string::npos);
}

TEST_CASE("build_prompt suffixes history utterances with the separator") {
  PromptTemplate tmpl;
  DialogueTranscript history("g");
  history.append(Speaker::system, "Welcome, what can I do for you?");
  const std::string prompt = build_prompt(tmpl, tiny_goal(), history);
  CHECK(prompt.find("ASSISTANT: Welcome, what can I do for you?<endturn>\n") !=
        std::string::npos);
  CHECK(prompt.rfind("CUSTOMER:") == prompt.size() - 9);
}

TEST_CASE("build_prompt grows as a strict prefix up to the cue") {
  PromptTemplate tmpl;
  const UserGoal goal = tiny_goal();
  DialogueTranscript history("g");
  history.append(Speaker::system, "Hello.");
  const std::string small = build_prompt(tmpl, goal, history);
  history.append(Speaker::user, "Hi, indian food please.");
  history.append(Speaker::system, "Which area?");
  const std::string large = build_prompt(tmpl, goal, history);

  const std::string small_body = small.substr(0, small.size() - tmpl.user_label.size());
  CHECK(large.rfind(small_body, 0) == 0);
  CHECK(large.size() > small.size());
}

TEST_CASE("build_prompt shot handling") {
  PromptTemplate tmpl;
  tmpl.shot_count = 2;
  SUBCASE("insufficient shots") {
    ShotSet one;
    one.dialogues.push_back(two_shots().dialogues.front());
    CHECK_THROWS_AS(build_prompt(tmpl, tiny_goal(), DialogueTranscript("g"), one),
                    InsufficientShots);
  }
  SUBCASE("shots appear in order before the goal") {
    const std::string prompt = build_prompt(tmpl, tiny_goal(), DialogueTranscript("g"),
                                            two_shots());
    const auto first = prompt.find("chinese");
    const auto second = prompt.find("italian");
    const auto goal_pos = prompt.find("indian");
    REQUIRE(first != std::string::npos);
    REQUIRE(second != std::string::npos);
    REQUIRE(goal_pos != std::string::npos);
    CHECK(first < second);
    CHECK(second < goal_pos);
  }
}

TEST_CASE("build_prompt rejects history ending on a user turn") {
  PromptTemplate tmpl;
  DialogueTranscript history("g");
  history.append(Speaker::system, "Hello.");
  history.append(Speaker::user, "Hi.");
  CHECK_THROWS_AS(build_prompt(tmpl, tiny_goal(), history), NotUserTurn);
}

TEST_CASE("postprocess strips separators, labels and control characters") {
  PromptTemplate tmpl;
  CHECK(postprocess_utterance("I need a taxi.<endturn>ASSISTANT: sure", tmpl) ==
        "I need a taxi.");
  CHECK(postprocess_utterance("CUSTOMER: yes please ", tmpl) == "yes please");
  CHECK(postprocess_utterance("CUSTOMER: CUSTOMER: stacked labels", tmpl) == "stacked labels");
  CHECK(postprocess_utterance("line\r\nbreaks\tand\x01junk", tmpl) == "line breaks and junk");
  CHECK_THROWS_AS(postprocess_utterance("<endturn>", tmpl), EmptyAfterCleaning);
}

TEST_CASE("postprocess is idempotent and never leaves the separator") {
  PromptTemplate tmpl;
  const std::string samples[] = {
      "plain text", "  padded  ", "ASSISTANT: labelled<endturn>tail",
      "a<endturn>b<endturn>c", "CUSTOMER:  spaced label", "multi  space   text"};
  for (const std::string& sample : samples) {
    const std::string once = postprocess_utterance(sample, tmpl);
    CHECK(postprocess_utterance(once, tmpl) == once);
    CHECK(once.find(tmpl.separator) == std::string::npos);
  }
}

TEST_CASE("prompt golden files are byte-exact") {
  const std::filesystem::path golden_dir = TODSIM_GOLDEN_DIR;
  PromptTemplate tmpl;
  const UserGoal goal = tiny_goal();

  DialogueTranscript history("g");
  history.append(Speaker::system, "Hello, how can I help you today?");
  history.append(Speaker::user, "I am looking for an indian restaurant.");
  history.append(Speaker::system, "Which part of town?");

  SUBCASE("zero shot") {
    const std::string prompt = build_prompt(tmpl, goal, history);
    CHECK(prompt == read_file(golden_dir / "prompt_zero_shot.txt"));
  }
  SUBCASE("two shot") {
    PromptTemplate shot_tmpl = tmpl;
    shot_tmpl.shot_count = 2;
    const std::string prompt = build_prompt(shot_tmpl, goal, history, two_shots());
    CHECK(prompt == read_file(golden_dir / "prompt_two_shot.txt"));
  }
}

TEST_CASE("load_prompt_template reads the bundled defaults") {
  const std::filesystem::path data_dir = TODSIM_DATA_DIR;
  const PromptTemplate tmpl = load_prompt_template(data_dir / "prompt_template.json");
  CHECK(tmpl.separator == "<endturn>");
  CHECK(tmpl.system_label == "ASSISTANT:");
  CHECK(tmpl.user_label == "CUSTOMER:");
  CHECK(tmpl.shot_count == 0);
}
