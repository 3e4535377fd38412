// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace corpuskit::scoring {

struct MatchPolicy {
  bool case_fold = true;
  bool strip_punct = true;  // Unicode P* and S* become spaces
  bool collapse_whitespace = true;
  bool token_boundary = true;

  // At least one of the three normalizations must be on.
  void validate() const;
};

std::string normalize(std::string_view text, const MatchPolicy& policy = {});

/// normalize(gold) occurs in normalize(output); with token_boundary the
/// match must start and end at whitespace or the string ends.
bool fuzzy_contains(std::string_view output, std::string_view gold, const MatchPolicy& policy = {});

double accuracy(const std::vector<std::pair<std::string, std::string>>& pairs, const MatchPolicy& policy = {});

struct ScoredItem {
  std::string output;
  std::string gold;
  std::string lang;  // empty when unknown
};

struct Tally {
  std::size_t total = 0;
  std::size_t correct = 0;
  double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total); }
};

struct ScoreReport {
  Tally overall;
  std::map<std::string, Tally> per_language;

  std::string to_json() const;
};

ScoreReport score(const std::vector<ScoredItem>& items, const MatchPolicy& policy = {});

/// Tab-separated output, gold and optional lang columns. Backslash escapes
/// \t, \n and \\ are decoded. Files ending in .jsonl are read as objects
/// with output/gold/lang fields instead.
std::vector<ScoredItem> read_items(const std::filesystem::path& path);

}  // namespace corpuskit::scoring
