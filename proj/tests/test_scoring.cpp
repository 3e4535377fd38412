// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>

#include "corpuskit/corpus.hpp"
#include "corpuskit/scoring.hpp"
#include "support.hpp"

using namespace corpuskit;
using namespace corpuskit::scoring;

TEST_CASE("normalization") {
  CHECK(normalize("The answer is (B).") == "the answer is b");
  CHECK(normalize("  New \t York\n") == "new york");
  CHECK(normalize("Straße") == "strasse");
  CHECK(normalize("«C»") == "c");
  MatchPolicy keep_case;
  keep_case.case_fold = false;
  CHECK(normalize("A-b", keep_case) == "A b");
  MatchPolicy none{false, false, false, true};
  CHECK_THROWS_AS(none.validate(), Error);
}

TEST_CASE("property: normalization is idempotent") {
  testing::Rng rng(14);
  for (int i = 0; i < 1000; ++i) {
    const auto s = testing::random_unicode(rng, 30);
    const auto once = normalize(s);
    REQUIRE(normalize(once) == once);
  }
}

TEST_CASE("hand-labelled table") {
  for (const auto& c : testing::scoring_cases()) {
    CAPTURE(c.output);
    CAPTURE(c.gold);
    CHECK(fuzzy_contains(c.output, c.gold) == c.expected);
  }
}

TEST_CASE("token boundary can be relaxed") {
  MatchPolicy loose;
  loose.token_boundary = false;
  CHECK(fuzzy_contains("ABBA", "B", loose));
  CHECK_FALSE(fuzzy_contains("ABBA", "B"));
  CHECK_THROWS_AS(fuzzy_contains("x", ""), Error);
  CHECK_FALSE(fuzzy_contains("x", "?!"));
}

TEST_CASE("property: surrounding a match with text keeps it a match") {
  testing::Rng rng(29);
  const std::vector<std::string> golds = {"B", "Paris", "42", "new york", "β"};
  for (int i = 0; i < 500; ++i) {
    const auto& g = golds[rng.below(golds.size())];
    const auto out = testing::random_unicode(rng, 10) + " " + g + " " + testing::random_unicode(rng, 10);
    REQUIRE(fuzzy_contains(out, g));
    REQUIRE(fuzzy_contains("(" + out + ")", g));
  }
}

TEST_CASE("accuracy and per-language reports") {
  CHECK(accuracy({{"B", "B"}, {"A", "B"}, {"(C)", "C"}, {"", "D"}}) == 0.5);
  CHECK_THROWS_AS(accuracy({}), Error);
  const auto r = score({{"B", "B", "en"}, {"A", "B", "en"}, {"C", "C", "de"}, {"x", "x", ""}});
  CHECK(r.overall.total == 4);
  CHECK(r.overall.correct == 3);
  CHECK(r.per_language.at("en").accuracy() == 0.5);
  CHECK(r.per_language.at("de").accuracy() == 1.0);
  CHECK(r.per_language.count("") == 0);
  CHECK(r.to_json().find("\"per_language\"") != std::string::npos);
}

TEST_CASE("reading items") {
  testing::TempDir dir("scoring");
  std::ofstream(dir / "items.tsv") << "The answer is B\tB\ten\nline\\none\\ttab\tone\n\n";
  const auto items = read_items(dir / "items.tsv");
  REQUIRE(items.size() == 2);
  CHECK(items[0].lang == "en");
  CHECK(items[1].output == "line\none\ttab");
  CHECK(items[1].lang.empty());

  std::ofstream(dir / "items.jsonl") << R"j({"output": "(A)", "gold": "A", "lang": "fr"})j" << "\n";
  const auto j = read_items(dir / "items.jsonl");
  REQUIRE(j.size() == 1);
  CHECK(j[0].lang == "fr");

  std::ofstream(dir / "bad.tsv") << "only one column\n";
  CHECK_THROWS_AS(read_items(dir / "bad.tsv"), Error);
  std::ofstream(dir / "bad.jsonl") << "{\"output\": 1}\n";
  CHECK_THROWS_AS(read_items(dir / "bad.jsonl"), Error);
  CHECK_THROWS_AS(read_items(dir / "missing.tsv"), Error);
}
