// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>

#include "corpuskit/quality.hpp"
#include "corpuskit/text.hpp"
#include "support.hpp"

using namespace corpuskit;
using namespace corpuskit::quality;
using corpuskit::testing::Rng;

namespace {

std::size_t cps(const std::string& s) { return text::decode_utf8(s).size(); }

// Brute force: compare every window against every other window.
double oracle_top_ngram(const std::string& t, int n) {
  const auto w = text::normalized_words(t);
  const auto N = static_cast<std::size_t>(n);
  if (w.size() < N) return 0.0;
  std::size_t total = 0;
  for (const auto& x : w) total += cps(x);
  const std::size_t windows = w.size() - N + 1;
  auto same = [&](std::size_t a, std::size_t b) {
    for (std::size_t k = 0; k < N; ++k)
      if (w[a + k] != w[b + k]) return false;
    return true;
  };
  std::size_t best_count = 0;
  for (std::size_t i = 0; i < windows; ++i) {
    std::size_t c = 0;
    for (std::size_t j = 0; j < windows; ++j) c += same(i, j);
    best_count = std::max(best_count, c);
  }
  std::size_t best_chars = 0;
  for (std::size_t i = 0; i < windows; ++i) {
    std::vector<bool> mask(w.size(), false);
    std::size_t c = 0;
    for (std::size_t j = 0; j < windows; ++j)
      if (same(i, j)) {
        ++c;
        for (std::size_t k = 0; k < N; ++k) mask[j + k] = true;
      }
    if (c != best_count) continue;
    std::size_t chars = 0;
    for (std::size_t k = 0; k < w.size(); ++k)
      if (mask[k]) chars += cps(w[k]);
    best_chars = std::max(best_chars, chars);
  }
  return static_cast<double>(best_chars) / static_cast<double>(total);
}

double oracle_dup_ngram(const std::string& t, int n) {
  const auto w = text::normalized_words(t);
  const auto N = static_cast<std::size_t>(n);
  if (w.size() < N) return 0.0;
  std::vector<bool> mask(w.size(), false);
  for (std::size_t i = 0; i + N <= w.size(); ++i)
    for (std::size_t j = 0; j + N <= w.size(); ++j) {
      if (i == j) continue;
      if (std::equal(w.begin() + i, w.begin() + i + N, w.begin() + j))
        for (std::size_t k = 0; k < N; ++k) mask[i + k] = true;
    }
  std::size_t total = 0, dup = 0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    total += cps(w[k]);
    if (mask[k]) dup += cps(w[k]);
  }
  return total == 0 ? 0.0 : static_cast<double>(dup) / static_cast<double>(total);
}

std::string random_words(Rng& rng, std::size_t n, std::size_t vocab) {
  static const char* pool[] = {"a", "bb", "to", "be", "or", "not", "σκύλος", "ünd", "kot", "tree", "x", "yy"};
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += rng.uniform() < 0.1 ? "\n" : " ";
    out += pool[rng.below(std::min(vocab, std::size(pool)))];
    if (rng.uniform() < 0.05) out += ",";
  }
  return out;
}

Document doc(std::string text, std::string lang = "en") { return {"d", std::move(text), std::move(lang), "", {}}; }

}  // namespace

TEST_CASE("bullet line fraction") {
  const std::vector<std::string> m = {"-", "*", "•", "−"};
  CHECK(bullet_line_fraction("- a\n- b\nc", m) == doctest::Approx(2.0 / 3.0));
  CHECK(bullet_line_fraction("plain prose line", m) == 0.0);
  CHECK(bullet_line_fraction("", m) == 0.0);
  CHECK(bullet_line_fraction("1. one\n2) two\n\nthree", m) == doctest::Approx(2.0 / 3.0));
  CHECK(bullet_line_fraction("1. one\n2) two\n\nthree", m, false) == 0.0);
  CHECK(bullet_line_fraction("• dot\n  * star", m) == 1.0);
}

TEST_CASE("character fractions") {
  CHECK(non_alnum_fraction("abc!!!") == doctest::Approx(0.5));
  CHECK(non_alnum_fraction("abcdef") == 0.0);
  CHECK(non_alnum_fraction("!!!") == 1.0);
  CHECK(non_alnum_fraction("") == 0.0);
  CHECK(non_alnum_fraction("a b\tc") == 0.0);
  CHECK(ellipsis_line_fraction("wait...\nok\nhm…") == doctest::Approx(2.0 / 3.0));
  CHECK(mean_word_length("ab abcd") == 3.0);
  CHECK(mean_word_length("ñandú") == 5.0);
  CHECK(symbol_to_word_ratio("#tag #two word ...") == doctest::Approx(3.0 / 4.0));
  CHECK(alpha_word_fraction("one 2 three 44") == 0.5);
  CHECK(stopword_hits("The cat and THE dog", {"the", "and"}) == 3);
}

TEST_CASE("duplicate line and paragraph fractions") {
  CHECK(duplicate_line_fraction("a\nb\na") == doctest::Approx(1.0 / 3.0));
  CHECK(duplicate_line_fraction("a\nb\nc") == 0.0);
  CHECK(duplicate_line_fraction("x\nx\nx\nx") == doctest::Approx(0.75));
  CHECK(duplicate_line_char_fraction("aa\nb\naa") == doctest::Approx(2.0 / 5.0));
  CHECK(duplicate_paragraph_fraction("p one\n\np two\n\np one") == doctest::Approx(1.0 / 3.0));
  CHECK(duplicate_paragraph_char_fraction("") == 0.0);
}

TEST_CASE("top n-gram character fraction") {
  // Bigrams of "to be or to be": "to be" twice; word chars 10, covered 8.
  CHECK(top_ngram_char_fraction("to be or to be", 2) == doctest::Approx(0.8));
  CHECK(top_ngram_char_fraction("alpha beta gamma delta", 2) == doctest::Approx(10.0 / 19.0));
  CHECK(top_ngram_char_fraction("single", 2) == 0.0);
  CHECK_THROWS_AS(top_ngram_char_fraction("a b", 1), Error);
  // Overlapping occurrences are counted once per character.
  CHECK(top_ngram_char_fraction("a a a a", 2) == 1.0);
}

TEST_CASE("duplicated n-gram character fraction") {
  CHECK(duplicated_ngram_char_fraction("a b c a b c", 3) == 1.0);
  CHECK(duplicated_ngram_char_fraction("one two three four five", 3) == 0.0);
  CHECK_THROWS_AS(duplicated_ngram_char_fraction("a b", 1), Error);
}

TEST_CASE("property: n-gram fractions match brute force and stay in range") {
  Rng rng(404);
  for (int trial = 0; trial < 300; ++trial) {
    const auto t = random_words(rng, rng.below(40), 2 + rng.below(11));
    for (int n = 2; n <= 6; ++n) {
      const double top = top_ngram_char_fraction(t, n);
      const double dup = duplicated_ngram_char_fraction(t, n);
      REQUIRE(top == doctest::Approx(oracle_top_ngram(t, n)).epsilon(1e-12));
      REQUIRE(dup == doctest::Approx(oracle_dup_ngram(t, n)).epsilon(1e-12));
      REQUIRE(top >= 0.0);
      REQUIRE(top <= 1.0);
      REQUIRE(dup >= 0.0);
      REQUIRE(dup <= 1.0);
    }
  }
}

TEST_CASE("heuristic verdicts name the first violated rule") {
  HeuristicRules r;
  auto v = apply_heuristics(doc("only five words right here"), r);
  CHECK_FALSE(v.keep);
  CHECK(v.rule == "min_words");
  CHECK(v.value == 5);
  CHECK(v.threshold == 50);

  std::string prose;
  for (int i = 0; i < 12; ++i) prose += "The quick brown fox jumps over the lazy dog again. ";
  CHECK(apply_heuristics(doc(prose), r).keep);

  std::string bullets;
  for (int i = 0; i < 9; ++i) bullets += "- the quick brown fox jumps over the dog\n";
  bullets += "the quick brown fox jumps over the dog\n";
  r.max_bullet_line_fraction = 0.5;
  v = apply_heuristics(doc(bullets), r);
  CHECK(v.rule == "bullet_lines");
  CHECK(v.value == doctest::Approx(bullet_line_fraction(bullets, r.bullet_markers)));

  HeuristicRules sw;
  sw.stopwords = {"zebra", "yak"};
  v = apply_heuristics(doc(prose), sw);
  CHECK(v.rule == "stopwords");
  CHECK(v.value == 0.0);
}

TEST_CASE("repetition verdicts") {
  RepetitionRules r;
  std::string spam;
  for (int i = 0; i < 50; ++i) spam += "spam ";
  auto v = apply_repetition(doc(spam), r);
  CHECK_FALSE(v.keep);
  CHECK(v.rule == "top_2gram");

  CHECK(apply_repetition(doc(""), r).keep);
  const std::string prose =
      "Rivers carve valleys over thousands of years while wind shapes the dunes of distant deserts. "
      "Farmers along the delta plant rice when monsoon rains arrive early in the season. "
      "Merchants carried salt and copper across mountain passes, trading with villages that kept goats, "
      "wove baskets from reeds and stored grain in clay jars beneath their homes. Children learned songs "
      "describing constellations, tides, migrating birds and the long journey of every river toward the sea.";
  CHECK(apply_repetition(doc(prose), r).keep);
  CHECK(apply_repetition(doc("line\nline\nline\nother"), r).rule == "dup_line");
}

TEST_CASE("blacklist matches whole case-folded words") {
  Blacklist bl;
  bl.add_term("en", "Casino");
  bl.add_term("en", "payday loan");
  CHECK(bl.hits("en", "CASINO casino, casinos and a payday  loan") == 3);
  CHECK(bl.hits("en", "megacasino") == 0);
  auto v = apply_blacklist(doc("casino casino casino"), bl);
  CHECK_FALSE(v.keep);
  CHECK(v.value == 3);
  bl.max_hits = 3;
  CHECK(apply_blacklist(doc("casino casino casino"), bl).keep);
  CHECK(apply_blacklist(doc("casino", "de"), bl).rule == "no_list");
  CHECK(apply_blacklist(doc("casino"), Blacklist{}).keep);
}

TEST_CASE("blacklist directory and quality config loading") {
  testing::TempDir dir("quality");
  std::ofstream(dir / "de.txt") << "# comment\nSchimpfwort\n\n";
  std::ofstream(dir / "notes.md") << "ignored";
  Blacklist bl;
  bl.load_directory(dir.path());
  CHECK(bl.has_language("de"));
  CHECK_FALSE(bl.has_language("notes"));
  CHECK(bl.hits("de", "ein schimpfwort hier") == 1);

  const auto cfg = QualityConfig::from_json(R"({
    "heuristic": {"min_words": 10, "mean_word_length_range": [2, 12]},
    "repetition": {"top_ngram_limits": {"2": 0.5}},
    "languages": {"fi": {"heuristic": {"min_words": 20}, "stopwords": ["ja", "on"]}}
  })");
  CHECK(cfg.heuristic_for("en").min_words == 10);
  CHECK(cfg.heuristic_for("fi").min_words == 20);
  CHECK(cfg.heuristic_for("fi").max_mean_word_length == 12);
  CHECK(cfg.heuristic_for("fi").stopwords.size() == 2);
  CHECK(cfg.repetition_for("en").top_ngram_limits.at(2) == 0.5);
  CHECK(cfg.repetition_for("en").top_ngram_limits.at(3) == 0.18);
  CHECK_THROWS_AS(QualityConfig::from_json(R"({"heuristic": {"max_non_alnum_fraction": 2}})"), Error);
  CHECK_THROWS_AS(QualityConfig::from_json(R"({"heuristic": {"min_words": 10, "max_words": 5}})"), Error);
}
