// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "corpuskit/corpus.hpp"

namespace corpuskit::fixture {

// Deterministic synthetic text in the 13 target languages. Each language
// mixes its real high-frequency function words with a Zipf-distributed
// lexicon built from a language-specific syllable inventory and script, so
// the output has realistic character statistics without shipping corpora.
// Output depends only on the seed (no std:: distributions are used).

const std::vector<std::string>& languages();
const std::vector<std::string>& function_words(std::string_view lang);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform();  // [0, 1)
  std::size_t below(std::size_t n);

 private:
  std::uint64_t state_;
};

class TextGenerator {
 public:
  // Lexicon size per language; the lexicon depends only on the language.
  explicit TextGenerator(std::size_t lexicon_size = 4000, double zipf_exponent = 1.05);

  std::string word(std::string_view lang, Rng& rng) const;
  std::string sentence(std::string_view lang, Rng& rng) const;
  std::string paragraph(std::string_view lang, Rng& rng) const;
  // `paragraphs` paragraphs separated by blank lines.
  std::string document(std::string_view lang, Rng& rng, std::size_t paragraphs = 3) const;

  /// Documents of one language until `bytes` of text are produced. Ids are
  /// "<prefix><lang>-<n>".
  std::vector<Document> corpus(std::string_view lang, std::size_t bytes, std::uint64_t seed,
                               std::string_view id_prefix = "") const;

 private:
  struct Lexicon {
    std::vector<std::string> words;
    std::vector<double> cumulative;
  };
  const Lexicon& lexicon(std::string_view lang) const;

  std::size_t lexicon_size_;
  double zipf_exponent_;
  std::vector<std::pair<std::string, Lexicon>> lexicons_;
};

}  // namespace corpuskit::fixture
