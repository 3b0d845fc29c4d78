#include <cstdio>
#include <fstream>
#include <set>

#include "doctest.h"
#include "todsim/errors.hpp"
#include "todsim/goal.hpp"

using namespace todsim;

namespace {

UserGoal restaurant_goal() {
  UserGoal goal;
  goal.id = "rest-1";
  goal.slots.push_back(SlotSpec::inform("restaurant", "food", "Indian"));
  goal.slots.push_back(SlotSpec::request("restaurant", "postcode"));
  goal.finalize();
  goal.text = render_goal(goal, default_goal_templates());
  return goal;
}

std::filesystem::path data_dir() { return TODSIM_DATA_DIR; }

}  // namespace

TEST_CASE("render_goal interpolates values and names requests") {
  const UserGoal goal = restaurant_goal();
  const std::string text = render_goal(goal, default_goal_templates());
  CHECK(text.find("indian") != std::string::npos);
  CHECK(text.find("postcode") != std::string::npos);
  // purity
  CHECK(render_goal(goal, default_goal_templates()) == text);
}

TEST_CASE("render_goal names every value of automotive fixture 1") {
  const auto goals = load_goal_suite(data_dir() / "goals_automotive.jsonl");
  const UserGoal& first = goals.at(0);
  REQUIRE(first.subtask == Subtask::book);
  const std::string text = render_goal(first, default_goal_templates());
  CHECK(text.find("book") != std::string::npos);
  CHECK(text.find("waiter") != std::string::npos);
  CHECK(text.find("check engine") != std::string::npos);
  CHECK(text.find("today 16:00") != std::string::npos);
}

TEST_CASE("render_goal value containment holds across the bundled suite") {
  const auto goals = load_goal_suite(data_dir() / "goals_automotive.jsonl");
  for (const UserGoal& goal : goals) {
    const std::string text = render_goal(goal, default_goal_templates());
    for (const SlotSpec& slot : goal.slots) {
      if (slot.kind == SlotKind::request) continue;
      CAPTURE(goal.id);
      CAPTURE(slot.name);
      CHECK(text.find(*slot.value) != std::string::npos);
      // the provided suite text names the value too
      CHECK(goal.text.find(*slot.value) != std::string::npos);
    }
  }
}

TEST_CASE("render_goal with zero slots returns the bare preamble") {
  UserGoal goal;
  goal.id = "empty";
  goal.finalize();
  const std::string text = render_goal(goal, default_goal_templates());
  CHECK(!text.empty());
}

TEST_CASE("render_goal without a matching rule raises MissingTemplate") {
  UserGoal goal;
  goal.id = "g";
  goal.slots.push_back(SlotSpec::inform("restaurant", "food", "indian"));
  goal.finalize();
  GoalTemplates empty;
  CHECK_THROWS_AS(render_goal(goal, empty), MissingTemplate);
}

TEST_CASE("estimate_distribution counts multiplicities exactly") {
  UserGoal g1, g2, g3;
  g1.id = "1";
  g1.slots.push_back(SlotSpec::inform("restaurant", "food", "indian"));
  g1.finalize();
  g2 = g1;
  g2.id = "2";
  g3.id = "3";
  g3.slots.push_back(SlotSpec::inform("hotel", "area", "north"));
  g3.slots.push_back(SlotSpec::inform("taxi", "time", "18:00"));
  g3.finalize();

  SUBCASE("single goal") {
    const GoalDistribution dist = estimate_distribution({g1});
    CHECK(dist.combination_counts.size() == 1);
    CHECK(dist.combination_counts.at({"restaurant"}) == 1);
  }
  SUBCASE("counting") {
    const GoalDistribution dist = estimate_distribution({g1, g2, g3});
    CHECK(dist.combination_counts.at({"restaurant"}) == 2);
    CHECK(dist.combination_counts.at({"hotel", "taxi"}) == 1);
    CHECK(dist.value_counts.at({"restaurant", "food"}).at("indian") == 2);
  }
  SUBCASE("empty corpus") {
    CHECK_THROWS_AS(estimate_distribution({}), EmptyCorpus);
  }
}

TEST_CASE("sample_goal degenerate distribution ignores the seed") {
  UserGoal g;
  g.id = "only";
  g.slots.push_back(SlotSpec::inform("restaurant", "food", "indian"));
  g.finalize();
  const GoalDistribution dist = estimate_distribution({g});
  const UserGoal a = sample_goal(dist, 1);
  const UserGoal b = sample_goal(dist, 999);
  CHECK(a.domains == b.domains);
  REQUIRE(a.slots.size() == 1);
  CHECK(a.slots[0].value == "indian");
}

TEST_CASE("sample_goal is deterministic per seed") {
  UserGoal g1, g2;
  g1.id = "1";
  g1.slots.push_back(SlotSpec::inform("restaurant", "food", "indian"));
  g1.slots.push_back(SlotSpec::inform("restaurant", "time", "18:00"));
  g1.finalize();
  g2.id = "2";
  g2.slots.push_back(SlotSpec::inform("restaurant", "food", "chinese"));
  g2.slots.push_back(SlotSpec::inform("restaurant", "time", "20:00"));
  g2.finalize();
  const GoalDistribution dist = estimate_distribution({g1, g2});
  const UserGoal a = sample_goal(dist, 1234);
  const UserGoal b = sample_goal(dist, 1234);
  CHECK(goal_to_json(a).dump() == goal_to_json(b).dump());
}

TEST_CASE("sample_goal draws domains proportional to frequency") {
  // {restaurant: 3, hotel: 1} over 10k seeds -> restaurant fraction 0.75 +- 0.02
  UserGoal restaurant, hotel;
  restaurant.id = "r";
  restaurant.slots.push_back(SlotSpec::inform("restaurant", "food", "indian"));
  restaurant.finalize();
  hotel.id = "h";
  hotel.slots.push_back(SlotSpec::inform("hotel", "area", "north"));
  hotel.finalize();
  const GoalDistribution dist =
      estimate_distribution({restaurant, restaurant, restaurant, hotel});

  int restaurant_hits = 0;
  const int samples = 10000;
  for (int seed = 0; seed < samples; ++seed) {
    const UserGoal sampled = sample_goal(dist, static_cast<std::uint64_t>(seed));
    if (sampled.domains == std::vector<std::string>{"restaurant"}) ++restaurant_hits;
  }
  const double fraction = static_cast<double>(restaurant_hits) / samples;
  CHECK(fraction > 0.73);
  CHECK(fraction < 0.77);
}

TEST_CASE("sample_goal support equals the observed combinations") {
  UserGoal g1, g2, g3;
  g1.id = "1";
  g1.slots.push_back(SlotSpec::inform("restaurant", "food", "indian"));
  g1.finalize();
  g2.id = "2";
  g2.slots.push_back(SlotSpec::inform("hotel", "area", "north"));
  g2.finalize();
  g3.id = "3";
  g3.slots.push_back(SlotSpec::inform("hotel", "area", "south"));
  g3.slots.push_back(SlotSpec::inform("taxi", "time", "18:00"));
  g3.finalize();
  const GoalDistribution dist = estimate_distribution({g1, g2, g3});

  std::set<std::vector<std::string>> observed;
  for (const auto& [combo, count] : dist.combination_counts) observed.insert(combo);
  std::set<std::vector<std::string>> sampled;
  for (int seed = 0; seed < 500; ++seed) {
    const UserGoal goal = sample_goal(dist, static_cast<std::uint64_t>(seed));
    sampled.insert(goal.domains);
    // never a zero-frequency triple
    for (const SlotSpec& slot : goal.slots) {
      if (!slot.value) continue;
      CHECK(dist.value_counts.at({slot.domain, slot.name}).count(*slot.value) > 0);
    }
  }
  CHECK(sampled == observed);
}

TEST_CASE("load_goal_suite reads the bundled automotive goals") {
  const auto goals = load_goal_suite(data_dir() / "goals_automotive.jsonl");
  REQUIRE(goals.size() == 8);
  int book = 0, cancel = 0, reschedule = 0;
  for (const UserGoal& goal : goals) {
    REQUIRE(goal.subtask.has_value());
    switch (*goal.subtask) {
      case Subtask::book: ++book; break;
      case Subtask::cancel: ++cancel; break;
      case Subtask::reschedule: ++reschedule; break;
      default: break;
    }
  }
  CHECK(book == 3);
  CHECK(cancel == 2);
  CHECK(reschedule == 3);

  const UserGoal& fifth = goals.at(4);
  CHECK(fifth.subtask == Subtask::cancel);
  CHECK(fifth.difficulty == Difficulty::hard);
  CHECK(fifth.text.find("3 appointments") != std::string::npos);
}

TEST_CASE("load_goal_suite handles empty and malformed files") {
  const auto tmp = std::filesystem::temp_directory_path();
  SUBCASE("empty file") {
    const auto path = tmp / "todsim_empty_suite.jsonl";
    std::ofstream(path).close();
    CHECK(load_goal_suite(path).empty());
    std::filesystem::remove(path);
  }
  SUBCASE("malformed slot line") {
    const auto path = tmp / "todsim_bad_suite.jsonl";
    {
      std::ofstream out(path);
      out << R"({"id":"ok","slots":[{"domain":"d","name":"n","kind":"inform","value":"v"}]})"
          << '\n';
      out << R"({"id":"bad","slots":[{"domain":"d","name":"n","kind":"inform"}]})" << '\n';
    }
    try {
      load_goal_suite(path);
      FAIL("expected ParseError");
    } catch (const ParseError& error) {
      CHECK(error.line() == 2);
    }
    std::filesystem::remove(path);
  }
}
