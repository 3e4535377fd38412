// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "corpuskit/corpus.hpp"
#include "corpuskit/fixture.hpp"
#include "corpuskit/lang_id.hpp"
#include "corpuskit/pipeline.hpp"
#include "corpuskit/sft.hpp"

namespace corpuskit::testing {

using fixture::Rng;

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& p);

// Random valid UTF-8 mixing ASCII, whitespace runs, Latin accents (both
// precomposed and combining), Greek, Cyrillic, CJK, emoji and ZWJ.
std::string random_unicode(Rng& rng, std::size_t max_code_points);

// Word-level Jaccard over explicit string n-gram sets, no hashing.
double oracle_jaccard(const std::string& a, const std::string& b, int n);

// A labelled classifier trained on generated text for the given languages.
lang_id::LangClassifier fixture_classifier(const std::vector<std::string>& langs, std::size_t bytes_per_lang = 40000);

// 100 English documents: 80 clean, 20 each carrying exactly one violation.
// `eval` holds the evaluation documents that the eval-dedup violations copy.
struct CleaningCase {
  Document doc;
  bool clean = true;
  Stage stage = Stage::heuristic;
  std::string rule;
};
struct CleaningCorpus {
  std::vector<CleaningCase> cases;
  std::vector<Document> eval;
  std::vector<std::string> blacklist_terms;
};
CleaningCorpus cleaning_corpus();

// Writes the corpus as a high-quality dataset plus an eval dataset, a
// language model trained on en/de/fi/el fixtures and an English blacklist
// under `dir`, and returns a config that cleans into `dir`/out using the
// shipped quality config.
pipeline::PipelineConfig write_cleaning_fixture(const CleaningCorpus& c, const std::filesystem::path& dir);

// Golden SFT fixtures: sample and the byte-exact wrapped form.
struct SftGolden {
  sft::SftSample sample;
  std::string wrapped;
};
std::vector<SftGolden> sft_goldens();

// Hand-labelled scoring table.
struct ScoringCase {
  std::string output;
  std::string gold;
  bool expected;
};
std::vector<ScoringCase> scoring_cases();

}  // namespace corpuskit::testing
