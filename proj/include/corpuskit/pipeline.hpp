// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "corpuskit/corpus.hpp"
#include "corpuskit/dedup.hpp"
#include "corpuskit/quality.hpp"
#include "corpuskit/sft.hpp"

namespace corpuskit::pipeline {

// Cleaning steps in execution order.
inline constexpr Stage kCleaningOrder[] = {Stage::lang_id,   Stage::heuristic, Stage::repetition,
                                           Stage::blacklist, Stage::dedup,     Stage::eval_dedup};
// SFT datasets run these after the cleaning steps that apply to them.
inline constexpr Stage kSftOrder[] = {Stage::sft_short, Stage::sft_length};

/// Default stage set of a dataset role:
///   web          -> blacklist, eval_dedup
///   high_quality -> all six cleaning steps
///   code         -> eval_dedup
///   sft          -> lang_id, eval_dedup, sft_short, sft_length
///   eval         -> none (eval datasets feed the train/eval index)
std::vector<Stage> default_stages(DatasetRole role);

struct DatasetSpec {
  std::filesystem::path manifest;
  std::optional<DatasetRole> role;  // overrides the manifest's role
  std::map<Stage, bool> toggles;    // explicit stage on/off overrides
};

enum class DedupMode { exact, minhash };

struct PipelineConfig {
  static constexpr int kVersion = 1;

  std::vector<DatasetSpec> datasets;
  std::filesystem::path output_dir;
  int workers = 1;
  std::uint64_t seed = dedup::kDefaultSeed;
  bool verbose = false;

  std::optional<std::filesystem::path> langid_model;
  double min_lang_confidence = 0.5;
  std::optional<std::filesystem::path> quality_config;
  std::optional<std::filesystem::path> blacklist_dir;
  std::optional<std::filesystem::path> tokenizer;

  dedup::OverlapThresholds overlap;
  int shingle_width = dedup::kDefaultShingleWidth;
  double jaccard_threshold = dedup::kDefaultJaccardThreshold;
  DedupMode dedup_mode = DedupMode::exact;

  std::size_t sft_max_len = 2048;
  std::size_t sft_min_instruction_words = sft::kDefaultMinInstructionWords;
  std::size_t sft_min_response_words = sft::kDefaultMinResponseWords;

  // Checks every referenced path and parameter; throws before any work.
  void validate() const;
  std::vector<Stage> stages_for(DatasetRole role, const DatasetSpec& spec) const;

  /// Relative paths in the file are resolved against its directory.
  static PipelineConfig from_json(std::string_view json_text, const std::filesystem::path& base_dir = {});
  static PipelineConfig load(const std::filesystem::path& path);
};

/// Thrown when a stage fails mid-run; carries the reports collected so far,
/// which have also been written to the output directory.
class PipelineFailure : public Error {
 public:
  PipelineFailure(const std::string& what, std::vector<PipelineReport> partial)
      : Error(what), partial_(std::move(partial)) {}
  const std::vector<PipelineReport>& partial() const { return partial_; }

 private:
  std::vector<PipelineReport> partial_;
};

/// Writes <output>/<dataset>/<shard> files with the kept documents, a
/// manifest.json per dataset and <output>/report.json. Output bytes depend
/// only on the config and inputs, never on worker count or timing.
std::vector<PipelineReport> run_pipeline(const PipelineConfig& cfg, std::ostream* log = nullptr);

}  // namespace corpuskit::pipeline
