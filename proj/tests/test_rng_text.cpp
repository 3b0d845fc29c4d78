#include "doctest.h"
#include "todsim/rng.hpp"
#include "todsim/text.hpp"

using namespace todsim;

TEST_CASE("rng is deterministic and roughly uniform") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng rng(7);
  int low = 0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    if (rng.next_double() < 0.5) ++low;
  }
  CHECK(low > draws * 0.48);
  CHECK(low < draws * 0.52);
}

TEST_CASE("uniform stays within bound") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) CHECK(rng.uniform(7) < 7);
}

TEST_CASE("mix_seed depends only on its inputs") {
  CHECK(mix_seed(1, 2) == mix_seed(1, 2));
  CHECK(mix_seed(1, 2) != mix_seed(1, 3));
  CHECK(mix_seed(1, 2, 3) == mix_seed(1, 2, 3));
  CHECK(mix_seed(1, 2, 3) != mix_seed(1, 3, 2));
}

TEST_CASE("normalize_value folds case, whitespace and clock times") {
  CHECK(normalize_value("  Today   4PM ") == "today 16:00");
  CHECK(normalize_value("10 AM") == "10:00");
  CHECK(normalize_value("9:30pm") == "21:30");
  CHECK(normalize_value("12AM") == "00:00");
  CHECK(normalize_value("12 PM") == "12:00");
  CHECK(normalize_value("Wednesday") == "wednesday");
  CHECK(normalize_value("16:00") == "16:00");
}

TEST_CASE("canonicalize_times leaves non-clock text alone") {
  CHECK(canonicalize_times("4 pm sharp, room 4") == "16:00 sharp, room 4");
  CHECK(canonicalize_times("pamper") == "pamper");
  CHECK(canonicalize_times("no times here") == "no times here");
}

TEST_CASE("fnv digest is stable") {
  CHECK(fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(fnv1a64("a") != fnv1a64("b"));
  CHECK(fnv1a64_hex("abc").size() == 16);
}
