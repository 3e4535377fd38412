// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "corpuskit/corpus.hpp"

namespace corpuskit::dedup {

inline constexpr int kDefaultShingleWidth = 8;
inline constexpr double kDefaultJaccardThreshold = 0.8;
inline constexpr std::uint64_t kDefaultSeed = 0x5eed'c0de'2026ULL;

/// Hashes of word n-gram shingles, sorted and unique.
struct ShingleSet {
  std::string doc_id;
  std::vector<std::uint64_t> hashes;
  int n = kDefaultShingleWidth;
};

// Words are case-folded alphanumeric runs. A text shorter than `n` words
// contributes its whole word sequence as one shingle.
ShingleSet make_shingles(std::string id, std::string_view text, int n,
                         std::uint64_t seed = kDefaultSeed);

double jaccard(const ShingleSet& a, const ShingleSet& b);

struct OverlapThresholds {
  double max_line_overlap = 0.5;
  double max_paragraph_overlap = 0.5;
};

/// Sequential line/paragraph deduplication against previously kept
/// documents. Results depend on arrival order: the first occurrence wins.
class LineParagraphDeduplicator {
 public:
  explicit LineParagraphDeduplicator(OverlapThresholds t = {}, std::uint64_t seed = kDefaultSeed);

  FilterVerdict offer(const Document& doc);

 private:
  OverlapThresholds thresholds_;
  std::uint64_t seed_;
  std::unordered_set<std::uint64_t> lines_;
  std::unordered_set<std::uint64_t> paragraphs_;
};

std::vector<FilterVerdict> line_paragraph_dedup(const std::vector<Document>& docs,
                                                OverlapThresholds t = {},
                                                std::uint64_t seed = kDefaultSeed);

/// Inverted index from shingle hash to evaluation documents.
class EvalIndex {
 public:
  EvalIndex() = default;
  EvalIndex(int n, std::uint64_t seed) : n_(n), seed_(seed) {}

  void add(const ShingleSet& s);

  int n() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t size() const { return ids_.size(); }
  const std::string& doc_id(std::uint32_t i) const { return ids_[i]; }
  std::uint64_t shingle_count(std::uint32_t i) const { return counts_[i]; }
  const std::vector<std::uint32_t>* postings(std::uint64_t hash) const;
  std::size_t num_shingles() const { return postings_.size(); }

  void save(const std::filesystem::path& path) const;
  static EvalIndex load(const std::filesystem::path& path);

 private:
  int n_ = kDefaultShingleWidth;
  std::uint64_t seed_ = kDefaultSeed;
  std::vector<std::string> ids_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> postings_;
};

EvalIndex build_eval_index(const std::vector<Document>& eval_docs, int n = kDefaultShingleWidth,
                           std::uint64_t seed = kDefaultSeed);

struct EvalMatch {
  double similarity = 0.0;
  std::string eval_id;
};

// Exact maximum Jaccard over eval documents sharing at least one shingle.
EvalMatch best_eval_match(const ShingleSet& doc, const EvalIndex& index);

FilterVerdict eval_dedup(const Document& doc, const EvalIndex& index,
                         double threshold = kDefaultJaccardThreshold);

/// MinHash signatures with LSH banding for candidate generation; candidates
/// are verified with exact Jaccard, so misses are the only possible error.
class MinHashEvalIndex {
 public:
  MinHashEvalIndex(int n, std::uint64_t seed, int num_perm = 128, int bands = 32);

  void add(ShingleSet s);
  EvalMatch best_match(const ShingleSet& doc) const;
  std::size_t size() const { return sets_.size(); }
  int n() const { return n_; }
  std::uint64_t seed() const { return seed_; }

  std::vector<std::uint64_t> signature(const ShingleSet& s) const;

 private:
  std::uint64_t band_key(const std::vector<std::uint64_t>& sig, int band) const;

  int n_;
  std::uint64_t seed_;
  int num_perm_;
  int bands_;
  std::vector<std::uint64_t> perm_seeds_;
  std::vector<ShingleSet> sets_;
  std::vector<std::unordered_map<std::uint64_t, std::vector<std::uint32_t>>> buckets_;
};

MinHashEvalIndex build_minhash_index(const std::vector<Document>& eval_docs,
                                     int n = kDefaultShingleWidth,
                                     std::uint64_t seed = kDefaultSeed);

FilterVerdict eval_dedup(const Document& doc, const MinHashEvalIndex& index,
                         double threshold = kDefaultJaccardThreshold);

}  // namespace corpuskit::dedup
