// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace corpuskit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// One text record. `lang` stays "und" until language ID or trusted
/// upstream metadata assigns it.
struct Document {
  std::string id;
  std::string text;
  std::string lang = "und";
  std::string source;
  std::map<std::string, std::string> meta;

  friend bool operator==(const Document&, const Document&) = default;
};

enum class Stage {
  lang_id,
  heuristic,
  repetition,
  blacklist,
  dedup,
  eval_dedup,
  sft_length,
  sft_short,
  sft_lang_mismatch,
};

std::string_view to_string(Stage s);
Stage stage_from_string(std::string_view s);

struct FilterVerdict {
  bool keep = true;
  Stage stage = Stage::heuristic;
  std::string rule;
  double value = 0.0;
  double threshold = 0.0;

  static FilterVerdict pass(Stage stage, double value = 0.0) {
    return {true, stage, {}, value, 0.0};
  }
  static FilterVerdict drop(Stage stage, std::string rule, double value, double threshold) {
    return {false, stage, std::move(rule), value, threshold};
  }
};

enum class DatasetRole { web, high_quality, code, sft, eval };

std::string_view to_string(DatasetRole r);
DatasetRole role_from_string(std::string_view s);

struct ShardEntry {
  std::string path;
  std::uint64_t documents = 0;
  std::uint64_t words = 0;
  std::uint64_t tokens = 0;
  std::string lang;
};

struct DatasetManifest {
  std::string name;
  DatasetRole role = DatasetRole::web;
  // Token counts depend on the tokenizer that produced them.
  std::string tokenizer_id;
  std::vector<ShardEntry> shards;
};

void save_manifest(const DatasetManifest& m, const std::filesystem::path& path);
DatasetManifest load_manifest(const std::filesystem::path& path);
std::string manifest_to_json(const DatasetManifest& m);

/// Normalized mapping language -> weight. Weights are non-negative and sum
/// to one once constructed through `from_counts` or `normalized`.
class LanguageDistribution {
 public:
  LanguageDistribution() = default;
  explicit LanguageDistribution(std::map<std::string, double> weights);

  static LanguageDistribution from_counts(const std::map<std::string, double>& counts);
  static LanguageDistribution uniform(const std::vector<std::string>& langs);

  LanguageDistribution normalized() const;
  double sum() const;
  double at(const std::string& lang) const;
  bool contains(const std::string& lang) const { return weights_.count(lang) != 0; }
  std::size_t size() const { return weights_.size(); }
  bool empty() const { return weights_.empty(); }
  std::vector<std::string> languages() const;

  const std::map<std::string, double>& weights() const { return weights_; }
  auto begin() const { return weights_.begin(); }
  auto end() const { return weights_.end(); }

 private:
  std::map<std::string, double> weights_;
};

enum class CountBasis { tokens, words, documents };

struct LanguageCounts {
  std::uint64_t documents = 0;
  std::uint64_t words = 0;
  std::uint64_t tokens = 0;
};

struct CorpusStats {
  LanguageDistribution distribution;
  std::map<std::string, LanguageCounts> per_language;
  LanguageCounts total;
};

CorpusStats corpus_stats(const DatasetManifest& manifest, CountBasis basis = CountBasis::tokens);

// Record I/O: one JSON object per line. Newlines inside fields are escaped
// by the JSON encoding, so a record never spans lines.

struct RecordError {
  std::size_t line = 0;
  std::string message;
};

struct ReadResult {
  std::vector<Document> documents;
  std::vector<RecordError> errors;
};

std::string record_to_line(const Document& doc);
Document record_from_line(std::string_view line);

/// Streams documents in file order. Malformed lines are passed to `on_error`
/// with their 1-based line number.
void for_each_record(const std::filesystem::path& path,
                     const std::function<void(Document&&)>& on_doc,
                     const std::function<void(const RecordError&)>& on_error);

ReadResult read_records(const std::filesystem::path& path);

using TokenCounter = std::function<std::uint64_t(std::string_view)>;

ShardEntry write_records(const std::vector<Document>& docs, const std::filesystem::path& path,
                         const TokenCounter& count_tokens = {});

struct StageReport {
  Stage stage = Stage::heuristic;
  std::uint64_t in = 0;
  std::uint64_t kept = 0;
  std::map<std::string, std::uint64_t> drop_reasons;
  std::map<std::string, std::uint64_t> in_by_lang;
  std::map<std::string, std::uint64_t> kept_by_lang;

  void record(const std::string& lang, const FilterVerdict& v);
  double retention() const { return in == 0 ? 1.0 : static_cast<double>(kept) / static_cast<double>(in); }
};

struct PipelineReport {
  std::string dataset;
  std::vector<StageReport> stages;

  StageReport& stage(Stage s);
  const StageReport* find(Stage s) const;
  // kept/in from the first stage's input to the last stage's output.
  double overall_retention() const;
  std::map<std::string, double> retention_by_lang() const;
};

std::string report_to_json(const std::vector<PipelineReport>& reports);

}  // namespace corpuskit
