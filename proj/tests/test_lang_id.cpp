// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "corpuskit/fixture.hpp"
#include "corpuskit/lang_id.hpp"
#include "support.hpp"

using namespace corpuskit;
using namespace corpuskit::lang_id;

TEST_CASE("character n-grams pad word runs and skip the lone pad") {
  const auto g = char_ngrams("Ab, c", {1, 2});
  const std::vector<std::string> expected = {"a", "b", " a", "ab", "b ", "c", " c", "c "};
  CHECK(g == expected);
  CHECK(char_ngrams("123 !!", {1, 3}).empty());
}

TEST_CASE("posterior matches a hand-computed naive Bayes model") {
  // Unigrams, smoothing 1. x sees {a:1, b:1}, y sees {b:2}; V = 2.
  // P(.|x) = (1/2, 1/2), P(.|y) = (1/4, 3/4). For "ba":
  // x: 1/2 * 1/2 = 1/4, y: 3/4 * 1/4 = 3/16, so P(x) = 4/7.
  const auto clf = train_classifier({{"ab", "x"}, {"bb", "y"}}, {1, 1}, 1.0);
  REQUIRE(clf.labels() == std::vector<std::string>{"x", "y"});
  const auto post = clf.posterior("ba");
  CHECK(post[0] == doctest::Approx(4.0 / 7.0).epsilon(1e-12));
  CHECK(post[1] == doctest::Approx(3.0 / 7.0).epsilon(1e-12));
  // Unseen grams carry the same mass under both labels here.
  const auto unseen = clf.posterior("cc");
  CHECK(unseen[0] == doctest::Approx(0.5));
  CHECK(clf.posterior("  ").empty());
  CHECK_FALSE(clf.classify("").determined);
}

TEST_CASE("classifier separates the fixture languages") {
  const auto langs = fixture::languages();
  const auto clf = testing::fixture_classifier(langs, 20000);
  const fixture::TextGenerator gen;
  for (const auto& l : langs) {
    int correct = 0;
    const auto docs = gen.corpus(l, 4000, 777, "probe-");
    for (const auto& d : docs) correct += clf.classify(d.text).lang == l;
    CHECK_MESSAGE(correct == static_cast<int>(docs.size()), l);
  }
}

TEST_CASE("serialization is byte-stable and lossless") {
  const auto clf = testing::fixture_classifier({"en", "de", "fi"}, 8000);
  const auto bytes = clf.serialize();
  const auto back = LangClassifier::deserialize(bytes);
  CHECK(back.serialize() == bytes);
  const std::string probe = "Der Hund und die Katze spielen im Garten.";
  CHECK(back.posterior(probe) == clf.posterior(probe));
  testing::TempDir dir("langid");
  clf.save(dir / "m.bin");
  CHECK(LangClassifier::load(dir / "m.bin").serialize() == bytes);
  CHECK_THROWS_AS(LangClassifier::deserialize("{}"), Error);
}

TEST_CASE("language filter verdicts") {
  LangPrediction p;
  CHECK(language_filter(p, "en").rule == "undetermined");
  p.determined = true;
  p.lang = "de";
  p.confidence = 0.99;
  auto v = language_filter(p, "en");
  CHECK_FALSE(v.keep);
  CHECK(v.rule == "lang_mismatch");
  p.lang = "en";
  p.confidence = 0.4;
  v = language_filter(p, "en", 0.5);
  CHECK(v.rule == "low_confidence");
  CHECK(v.threshold == 0.5);
  p.confidence = 0.5;
  CHECK(language_filter(p, "en", 0.5).keep);

  const auto clf = testing::fixture_classifier({"en", "de"}, 6000);
  Document d{"1", "the cat and the dog", "en", "", {}};
  CHECK_THROWS_AS(language_filter(d, clf, "xx"), Error);
}

TEST_CASE("predictions from metadata") {
  Document d{"1", "", "en", "", {{"lang_id.lang", "sv"}, {"lang_id.confidence", "0.75"}}};
  const auto p = prediction_from_meta(d);
  REQUIRE(p);
  CHECK(p->lang == "sv");
  CHECK(p->confidence == 0.75);
  d.meta["lang_id.confidence"] = "1.5";
  CHECK_THROWS_AS(prediction_from_meta(d), Error);
  d.meta.clear();
  CHECK_FALSE(prediction_from_meta(d));
}

TEST_CASE("training input validation") {
  CHECK_THROWS_AS(train_classifier({}), Error);
  CHECK_THROWS_AS(train_classifier({{"abc", "x"}}), Error);
  CHECK_THROWS_AS(train_classifier({{"abc", "x"}, {"  ", "y"}}), Error);
  CHECK_THROWS_AS(train_classifier({{"abc", "x"}, {"def", "y"}}, {3, 2}), Error);
  CHECK_THROWS_AS(train_classifier({{"abc", "x"}, {"def", "y"}}, {1, 2}, 0.0), Error);
}
