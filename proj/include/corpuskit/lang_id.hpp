// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "corpuskit/corpus.hpp"

namespace corpuskit::lang_id {

inline constexpr double kDefaultMinConfidence = 0.5;

struct LangPrediction {
  std::string lang = "und";
  double confidence = 0.0;
  std::string runner_up;
  // False for inputs with no letters; lang is then "und".
  bool determined = false;
};

struct NgramRange {
  int min_n = 1;
  int max_n = 4;
};

/// Character n-gram multinomial naive Bayes classifier with additive
/// smoothing and uniform class priors. Immutable after training.
class LangClassifier {
 public:
  const std::vector<std::string>& labels() const { return labels_; }
  NgramRange ngram_range() const { return range_; }
  double smoothing() const { return smoothing_; }
  bool has_label(std::string_view lang) const;

  // Normalized posterior over labels(); empty when the text has no letters.
  std::vector<double> posterior(std::string_view text) const;
  LangPrediction classify(std::string_view text) const;

  std::string serialize() const;
  static LangClassifier deserialize(std::string_view data);
  void save(const std::filesystem::path& path) const;
  static LangClassifier load(const std::filesystem::path& path);

  friend LangClassifier train_classifier(const std::vector<std::pair<std::string, std::string>>&,
                                         NgramRange, double);

 private:
  std::vector<std::string> labels_;
  NgramRange range_;
  double smoothing_ = 1.0;
  std::vector<double> unseen_;
  std::unordered_map<std::string, std::vector<double>> weights_;
};

// Character n-grams of case-folded letter runs, each run padded with a space
// on both sides.
std::vector<std::string> char_ngrams(std::string_view text, NgramRange range);

/// `labeled` holds (text, lang) pairs.
LangClassifier train_classifier(const std::vector<std::pair<std::string, std::string>>& labeled,
                                NgramRange range = {}, double smoothing = 0.5);

FilterVerdict language_filter(const LangPrediction& pred, std::string_view expected,
                              double min_confidence = kDefaultMinConfidence,
                              Stage stage = Stage::lang_id);

FilterVerdict language_filter(const Document& doc, const LangClassifier& clf, std::string_view expected,
                              double min_confidence = kDefaultMinConfidence);

// Externally computed predictions carried in document metadata under
// "lang_id.lang" and "lang_id.confidence".
std::optional<LangPrediction> prediction_from_meta(const Document& doc);

}  // namespace corpuskit::lang_id
