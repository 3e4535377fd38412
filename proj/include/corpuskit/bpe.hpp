// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "corpuskit/corpus.hpp"

namespace corpuskit::bpe {

using TokenId = std::uint32_t;

inline constexpr std::size_t kByteAlphabet = 256;

/// Splits text into pre-tokens whose concatenation is the input. Runs of
/// letters, digits, and other non-space characters each form a piece and
/// take a single preceding U+0020 as prefix; remaining whitespace forms its
/// own pieces.
std::vector<std::string_view> pretokenize(std::string_view text);

struct TrainOptions {
  std::size_t vocab_size = 0;
  std::vector<std::string> specials;
  // Vocabulary sizes not divisible by 8 are rejected unless set.
  bool allow_unaligned_vocab = false;
  bool normalize_nfc = true;
};

/// Byte-level BPE model. Ids [0,256) are raw bytes, followed by the special
/// tokens, followed by one id per merge. If training exhausts all pairs the
/// remainder is filled with reserved special ids so the vocabulary size is
/// always exactly the requested one.
class TokenizerModel {
 public:
  std::size_t vocab_size() const { return vocab_.size(); }
  const std::string& token(TokenId id) const { return vocab_.at(id); }
  bool is_special(TokenId id) const { return id < special_.size() && special_[id]; }
  std::optional<TokenId> special_id(std::string_view surface) const;
  const std::vector<std::string>& specials() const { return specials_; }
  const std::vector<std::pair<TokenId, TokenId>>& merges() const { return merges_; }
  std::size_t reserved_count() const { return reserved_; }
  bool normalize_nfc() const { return normalize_nfc_; }

  /// Special-token surface forms in the text are encoded as plain bytes.
  std::vector<TokenId> encode(std::string_view text) const;
  /// Registered special surface forms map to their ids; the text between
  /// them is encoded as with encode().
  std::vector<TokenId> encode_with_specials(std::string_view text) const;
  std::string decode(std::span<const TokenId> ids) const;

  // Stable fingerprint of merges and specials, recorded in manifests.
  std::string fingerprint() const;

  // Writes vocab.json, merges.txt and specials.json into `dir`.
  void save(const std::filesystem::path& dir) const;
  static TokenizerModel load(const std::filesystem::path& dir);

  /// Builds a model from an ordered merge list given as byte strings.
  static TokenizerModel from_merges(const std::vector<std::pair<std::string, std::string>>& merges,
                                    const std::vector<std::string>& specials, std::size_t reserved = 0,
                                    bool normalize_nfc = true);

 private:
  friend TokenizerModel train_bpe(const std::vector<Document>&, const TrainOptions&);

  void init_base(const std::vector<std::string>& specials);
  void add_merge(TokenId a, TokenId b);
  void add_reserved(std::size_t n);
  void encode_piece(std::string_view piece, std::vector<TokenId>& out) const;

  std::vector<std::string> vocab_;
  std::vector<bool> special_;
  std::vector<std::string> specials_;
  std::unordered_map<std::string, TokenId> special_ids_;
  std::vector<std::pair<TokenId, TokenId>> merges_;
  std::unordered_map<std::uint64_t, TokenId> merge_rank_;
  std::size_t reserved_ = 0;
  std::size_t reserved_counter_ = 0;
  bool normalize_nfc_ = true;
};

/// Merge tie-break: among pairs of maximal frequency, the lexicographically
/// smallest (left bytes, right bytes).
TokenizerModel train_bpe(const std::vector<Document>& corpus, const TrainOptions& opts);

/// Memoizes piece encodings; not thread-safe, one per worker.
class CachedEncoder {
 public:
  explicit CachedEncoder(const TokenizerModel& model) : model_(&model) {}
  std::size_t count_tokens(std::string_view text);

 private:
  const TokenizerModel* model_;
  std::unordered_map<std::string, std::size_t> cache_;
};

// ---------------------------------------------------------------------------
// Normalised sequence length: tokens per whitespace word.

struct NslReport {
  std::map<std::string, double> per_language;
  double average_nsl = 0.0;
  std::optional<double> weighted_nsl;
  std::map<std::string, double> weights;

  std::string to_json() const;
};

double nsl(const TokenizerModel& model, const std::vector<Document>& docs);

NslReport nsl_report(const TokenizerModel& model, const std::map<std::string, std::vector<Document>>& corpora,
                     const std::optional<std::map<std::string, double>>& sizes = std::nullopt);

}  // namespace corpuskit::bpe
