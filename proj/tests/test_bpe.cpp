// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <json.hpp>

#include <map>

#include "corpuskit/bpe.hpp"
#include "corpuskit/fixture.hpp"
#include "corpuskit/text.hpp"
#include "support.hpp"

using namespace corpuskit;
using namespace corpuskit::bpe;
using corpuskit::testing::Rng;

namespace {

std::vector<Document> docs_of(const std::vector<std::string>& texts) {
  std::vector<Document> out;
  for (std::size_t i = 0; i < texts.size(); ++i) out.push_back({std::to_string(i), texts[i], "en", "", {}});
  return out;
}

// Textbook trainer: recount every pair from scratch each round.
std::vector<std::pair<std::string, std::string>> naive_merges(const std::vector<std::string>& texts,
                                                              std::size_t num_merges) {
  std::map<std::string, std::int64_t> piece_freq;
  for (const auto& t : texts) {
    const auto nfc = text::to_nfc(t);
    for (auto p : pretokenize(nfc)) ++piece_freq[std::string(p)];
  }
  std::vector<std::pair<std::vector<std::string>, std::int64_t>> words;
  for (const auto& [p, f] : piece_freq) {
    std::vector<std::string> syms;
    for (char c : p) syms.emplace_back(1, c);
    words.emplace_back(std::move(syms), f);
  }
  std::vector<std::pair<std::string, std::string>> merges;
  while (merges.size() < num_merges) {
    std::map<std::pair<std::string, std::string>, std::int64_t> counts;
    for (const auto& [syms, f] : words)
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) counts[{syms[i], syms[i + 1]}] += f;
    if (counts.empty()) break;
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it)
      if (it->second > best->second) best = it;  // map order gives the smallest pair on ties
    merges.push_back(best->first);
    const auto [l, r] = best->first;
    for (auto& [syms, f] : words) {
      std::vector<std::string> out;
      for (std::size_t i = 0; i < syms.size();) {
        if (i + 1 < syms.size() && syms[i] == l && syms[i + 1] == r) {
          out.push_back(l + r);
          i += 2;
        } else {
          out.push_back(syms[i++]);
        }
      }
      syms = std::move(out);
    }
  }
  return merges;
}

std::vector<std::pair<std::string, std::string>> merge_strings(const TokenizerModel& m) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [a, b] : m.merges()) out.emplace_back(m.token(a), m.token(b));
  return out;
}

// Textbook encoder: repeatedly apply the lowest-ranked applicable merge.
std::vector<std::string> naive_encode_piece(const std::vector<std::pair<std::string, std::string>>& merges,
                                            const std::string& piece) {
  std::vector<std::string> syms;
  for (char c : piece) syms.emplace_back(1, c);
  for (;;) {
    std::size_t best_rank = merges.size(), best_pos = 0;
    for (std::size_t i = 0; i + 1 < syms.size(); ++i)
      for (std::size_t r = 0; r < best_rank; ++r)
        if (merges[r].first == syms[i] && merges[r].second == syms[i + 1]) {
          best_rank = r;
          best_pos = i;
          break;
        }
    if (best_rank == merges.size()) return syms;
    syms[best_pos] += syms[best_pos + 1];
    syms.erase(syms.begin() + static_cast<std::ptrdiff_t>(best_pos) + 1);
  }
}

const std::vector<std::string> kSft = {"<|start_of_sequence|>", "<|im_start|>", "<|im_end|>", "<|end_of_sequence|>"};

}  // namespace

TEST_CASE("pretokenization is lossless and attaches one leading space") {
  const auto p = pretokenize("Hello  world, 42x\tτέλος!");
  std::string joined;
  for (auto s : p) joined += s;
  CHECK(joined == "Hello  world, 42x\tτέλος!");
  const std::vector<std::string_view> expected = {"Hello", " ", " world", ",", " 42", "x", "\t", "τέλος", "!"};
  CHECK(p == expected);
  CHECK(pretokenize("").empty());

  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    const auto s = testing::random_unicode(rng, 30);
    std::string j;
    for (auto piece : pretokenize(s)) {
      REQUIRE_FALSE(piece.empty());
      j += piece;
    }
    REQUIRE(j == s);
  }
}

TEST_CASE("hand-simulated merges on abababab") {
  TrainOptions o;
  o.specials = {"<pad>", "<eos>", "<a>", "<b>", "<c>", "<d>"};
  o.vocab_size = 256 + 6 + 2;
  const auto m = train_bpe(docs_of({"abababab"}), o);
  REQUIRE(m.merges().size() == 2);
  CHECK(m.token(m.merges()[0].first) == "a");
  CHECK(m.token(m.merges()[0].second) == "b");
  CHECK(m.token(256 + 6) == "ab");
  CHECK(m.token(256 + 7) == "abab");
  CHECK(m.encode("abababab").size() == 2);
  CHECK(m.vocab_size() == 264);
}

TEST_CASE("property: incremental trainer equals the textbook trainer") {
  const fixture::TextGenerator gen;
  Rng rng(17);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<std::string> texts;
    for (int i = 0; i < 8; ++i) texts.push_back(gen.sentence(fixture::languages()[rng.below(13)], rng));
    texts.push_back(testing::random_unicode(rng, 20));
    TrainOptions o;
    o.vocab_size = 256 + 64;
    const auto m = train_bpe(docs_of(texts), o);
    const auto expected = naive_merges(texts, 64);
    CHECK(merge_strings(m) == expected);
    // Encoding agrees with the textbook encoder piece by piece.
    for (const auto& t : texts)
      for (auto piece : pretokenize(t)) {
        const auto ids = m.encode(piece);
        std::vector<std::string> got;
        for (auto id : ids) got.push_back(m.token(id));
        REQUIRE(got == naive_encode_piece(expected, std::string(piece)));
      }
  }
}

TEST_CASE("vocabulary size policy") {
  TrainOptions o;
  o.vocab_size = 127998;
  CHECK_THROWS_AS(train_bpe(docs_of({"abc"}), o), Error);
  o.allow_unaligned_vocab = true;
  o.vocab_size = 259;
  CHECK(train_bpe(docs_of({"abcabc"}), o).vocab_size() == 259);
  o.vocab_size = 200;
  CHECK_THROWS_AS(train_bpe(docs_of({"abc"}), o), Error);
  o.vocab_size = 264;
  CHECK_THROWS_AS(train_bpe(docs_of({""}), o), Error);
}

TEST_CASE("exhausted merges are padded with reserved ids") {
  TrainOptions o;
  o.vocab_size = 256 + 4 + 12;
  o.specials = kSft;
  const auto m = train_bpe(docs_of({"ab"}), o);
  CHECK(m.vocab_size() == o.vocab_size);
  CHECK(m.merges().size() == 1);
  CHECK(m.reserved_count() == 11);
  CHECK(m.token(static_cast<TokenId>(m.vocab_size() - 1)).rfind("<|reserved_", 0) == 0);
}

TEST_CASE("specials are escaped unless explicitly inserted") {
  TrainOptions o;
  o.vocab_size = 256 + 4 + 4;
  o.specials = kSft;
  const auto m = train_bpe(docs_of({"hello world"}), o);
  const auto plain = m.encode("<|im_end|>");
  CHECK(plain.size() > 1);
  for (auto id : plain) CHECK_FALSE(m.is_special(id));
  const auto with = m.encode_with_specials("hi<|im_end|>yo");
  CHECK(std::count(with.begin(), with.end(), *m.special_id("<|im_end|>")) == 1);
  CHECK(m.decode(with) == "hi<|im_end|>yo");
  CHECK(m.encode("").empty());
  CHECK(m.decode({}).empty());
  const std::vector<TokenId> bad = {static_cast<TokenId>(m.vocab_size())};
  CHECK_THROWS_AS(m.decode(bad), Error);
}

TEST_CASE("property: encode then decode is the identity") {
  const fixture::TextGenerator gen;
  Rng rng(8);
  std::vector<std::string> texts;
  for (const auto& l : fixture::languages()) texts.push_back(gen.paragraph(l, rng));
  TrainOptions o;
  o.vocab_size = 1024;
  o.specials = kSft;
  const auto m = train_bpe(docs_of(texts), o);
  for (int i = 0; i < 2000; ++i) {
    const auto s = testing::random_unicode(rng, 60);
    REQUIRE(m.decode(m.encode(s)) == s);
    REQUIRE(m.decode(m.encode_with_specials(s)) == s);
  }
  // Decomposed input is not normalized by encode.
  const std::string decomposed = "e\xcc\x81";
  CHECK(m.decode(m.encode(decomposed)) == decomposed);
}

TEST_CASE("save and load preserve the model") {
  const fixture::TextGenerator gen;
  Rng rng(21);
  std::vector<std::string> texts;
  for (const auto& l : {"en", "el", "bg"}) texts.push_back(gen.paragraph(l, rng));
  TrainOptions o;
  o.vocab_size = 512;
  o.specials = kSft;
  const auto m = train_bpe(docs_of(texts), o);
  testing::TempDir dir("bpe");
  m.save(dir.path());
  const auto back = TokenizerModel::load(dir.path());
  CHECK(back.fingerprint() == m.fingerprint());
  CHECK(back.vocab_size() == m.vocab_size());
  CHECK(back.specials() == m.specials());
  for (const auto& t : texts) CHECK(back.encode(t) == m.encode(t));
  const auto vocab = nlohmann::json::parse(testing::read_file(dir / "vocab.json"));
  CHECK(vocab.size() == 512);
  CHECK(vocab.at("<|im_end|>") == *m.special_id("<|im_end|>"));

  // Corrupt merges.txt and the cross-check fails.
  std::ofstream(dir / "merges.txt", std::ios::app) << "a b\n";
  CHECK_THROWS_AS(TokenizerModel::load(dir.path()), Error);
}

TEST_CASE("NSL arithmetic") {
  const auto m = TokenizerModel::from_merges({}, {});
  // Byte-level only: "ab cd" is 5 tokens over 2 words.
  CHECK(nsl(m, docs_of({"ab cd"})) == 2.5);
  CHECK(nsl(m, docs_of({"ab cd", "ab cd"})) == 2.5);
  CHECK_THROWS_AS(nsl(m, docs_of({"   "})), Error);

  const auto word_vocab = TokenizerModel::from_merges({{"a", "b"}, {" ", "c"}, {" c", "d"}}, {});
  CHECK(nsl(word_vocab, docs_of({"ab cd cd"})) == 1.0);

  std::map<std::string, std::vector<Document>> corpora = {{"x", docs_of({"ab cd"})}, {"y", docs_of({"abcd"})}};
  // x: 5/2 = 2.5, y: 4/1 = 4.
  auto r = nsl_report(m, corpora, std::map<std::string, double>{{"x", 3}, {"y", 1}});
  CHECK(r.average_nsl == 3.25);
  CHECK(*r.weighted_nsl == doctest::Approx(0.75 * 2.5 + 0.25 * 4));
  CHECK(r.weights.at("x") == 0.75);
  r = nsl_report(m, corpora, std::map<std::string, double>{{"x", 1}, {"y", 1}});
  CHECK(*r.weighted_nsl == r.average_nsl);
  CHECK_THROWS_AS(nsl_report(m, corpora, std::map<std::string, double>{{"x", 1}}), Error);
  const auto single = nsl_report(m, {{"x", docs_of({"ab cd"})}}, std::map<std::string, double>{{"x", 7}});
  CHECK(single.average_nsl == single.per_language.at("x"));
  CHECK(*single.weighted_nsl == single.average_nsl);
}

TEST_CASE("property: NSL is order invariant and monotone in nested vocabularies") {
  const fixture::TextGenerator gen;
  const auto docs = gen.corpus("pl", 20000, 5);
  auto reversed = docs;
  std::reverse(reversed.begin(), reversed.end());
  double previous = 1e9;
  std::vector<std::pair<TokenId, TokenId>> prev_merges;
  for (std::size_t v : {264u, 384u, 512u, 1024u}) {
    TrainOptions o;
    o.vocab_size = v;
    const auto m = train_bpe(docs, o);
    CHECK(std::equal(prev_merges.begin(), prev_merges.end(), m.merges().begin()));
    prev_merges = m.merges();
    const double n = nsl(m, docs);
    CHECK(n == nsl(m, reversed));
    CHECK(n <= previous);
    previous = n;
  }
}
