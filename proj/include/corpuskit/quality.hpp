// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "corpuskit/corpus.hpp"

namespace corpuskit::quality {

// ---------------------------------------------------------------------------
// Document metrics. Ratios are in [0,1] and 0 for empty input.

double bullet_line_fraction(std::string_view text, const std::vector<std::string>& markers,
                            bool numbered_bullets = true);
double ellipsis_line_fraction(std::string_view text);
double non_alnum_fraction(std::string_view text);
double mean_word_length(std::string_view text);
// Occurrences of '#', "..." and U+2026 per whitespace word.
double symbol_to_word_ratio(std::string_view text);
double alpha_word_fraction(std::string_view text);
std::size_t stopword_hits(std::string_view text, const std::vector<std::string>& stopwords);

double duplicate_line_fraction(std::string_view text);
double duplicate_paragraph_fraction(std::string_view text);
double duplicate_line_char_fraction(std::string_view text);
double duplicate_paragraph_char_fraction(std::string_view text);

// Characters (code points of words) covered by the most frequent word
// n-gram over total word characters. Throws for n < 2.
double top_ngram_char_fraction(std::string_view text, int n);
// Word characters covered by any n-gram that occurs at least twice, each
// character counted once. Throws for n < 2.
double duplicated_ngram_char_fraction(std::string_view text, int n);

// ---------------------------------------------------------------------------
// Rules. Defaults are the Gopher thresholds; see config/quality.json.

struct HeuristicRules {
  std::size_t min_words = 50;
  std::size_t max_words = 100000;
  double min_mean_word_length = 3.0;
  double max_mean_word_length = 10.0;
  double max_symbol_to_word_ratio = 0.1;
  double max_bullet_line_fraction = 0.9;
  double max_ellipsis_line_fraction = 0.3;
  double min_alpha_word_fraction = 0.8;
  double max_non_alnum_fraction = 0.25;
  std::size_t min_stopword_hits = 2;
  std::vector<std::string> bullet_markers = {"-", "*", "•", "−"};
  bool numbered_bullets = true;
  // Empty disables the stopword rule.
  std::vector<std::string> stopwords;

  void validate() const;
};

struct RepetitionRules {
  double max_duplicate_line_fraction = 0.30;
  double max_duplicate_paragraph_fraction = 0.30;
  double max_duplicate_line_char_fraction = 0.20;
  double max_duplicate_paragraph_char_fraction = 0.20;
  std::map<int, double> top_ngram_limits = {{2, 0.20}, {3, 0.18}, {4, 0.16}};
  std::map<int, double> dup_ngram_limits = {{5, 0.15}, {6, 0.14}, {7, 0.13},
                                            {8, 0.12}, {9, 0.11}, {10, 0.10}};

  void validate() const;
};

/// Rule order: min_words, max_words, mean_word_length, symbol_to_word,
/// bullet_lines, ellipsis_lines, alpha_words, non_alnum, stopwords.
FilterVerdict apply_heuristics(const Document& doc, const HeuristicRules& rules);

/// Rule order: dup_line, dup_paragraph, dup_line_chars, dup_paragraph_chars,
/// top_<n>gram ascending n, dup_<n>gram ascending n.
FilterVerdict apply_repetition(const Document& doc, const RepetitionRules& rules);

/// Case-folded, word-boundary term matcher. Terms may span several words.
class Blacklist {
 public:
  std::size_t max_hits = 0;

  void add_term(const std::string& lang, std::string_view term);
  // One term per line; blank lines and lines starting with '#' are ignored.
  void load_file(const std::string& lang, const std::filesystem::path& path);
  // Loads every <lang>.txt in `dir`.
  void load_directory(const std::filesystem::path& dir);

  bool has_language(const std::string& lang) const { return terms_.count(lang) != 0; }
  bool empty() const { return terms_.empty(); }
  std::size_t hits(const std::string& lang, std::string_view text) const;

 private:
  // lang -> first word -> term word sequences
  std::map<std::string, std::unordered_map<std::string, std::vector<std::vector<std::string>>>> terms_;
};

/// Drops iff hits > max_hits. A language without a list passes with
/// rule "no_list" so callers can surface a warning.
FilterVerdict apply_blacklist(const Document& doc, const Blacklist& bl);

/// Per-language rule sets loaded from a structured-text config.
struct QualityConfig {
  HeuristicRules heuristic;
  RepetitionRules repetition;
  std::map<std::string, HeuristicRules> heuristic_by_lang;
  std::map<std::string, RepetitionRules> repetition_by_lang;

  const HeuristicRules& heuristic_for(const std::string& lang) const;
  const RepetitionRules& repetition_for(const std::string& lang) const;

  static QualityConfig from_json(std::string_view json_text);
  static QualityConfig load(const std::filesystem::path& path);
};

}  // namespace corpuskit::quality
