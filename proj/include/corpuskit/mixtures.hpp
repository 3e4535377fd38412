// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corpuskit/corpus.hpp"

namespace corpuskit::mixtures {

enum class MixtureKind { balanced, intermediate, original, train, equal, decay };

std::string to_string(MixtureKind k);
MixtureKind kind_from_string(std::string_view s);

struct MixtureSpec {
  MixtureKind kind = MixtureKind::original;
  std::map<std::string, double> caps;  // missing languages are uncapped
  double floor = 0.0;
  std::map<std::string, double> floors;  // per-language override of `floor`
  double hq_share = 0.3;                 // decay only
  bool allow_repetition = false;

  double cap_for(const std::string& lang) const;
  double floor_for(const std::string& lang) const;

  // English capped at 20%, every language at least 3%.
  static MixtureSpec balanced();
  // English capped at 35%, every language at least 1%.
  static MixtureSpec intermediate();
  static MixtureSpec original();
  static MixtureSpec train();
  static MixtureSpec equal();
  static MixtureSpec decay(double hq_share);
  static MixtureSpec preset(MixtureKind kind);

  std::string to_json() const;
  static MixtureSpec from_json(std::string_view json_text);
};

/// Caps and floors applied by a proportional waterfill: there is a single
/// scale s such that every language gets clamp(s * source, floor, cap).
/// Clamped languages receive their bound exactly. Throws when the bounds
/// cannot be met by a distribution over the source languages.
LanguageDistribution solve_distribution(const LanguageDistribution& source, const MixtureSpec& spec);

using Cell = std::pair<std::string, std::string>;  // (dataset, lang)
using CellWeights = std::map<Cell, double>;

/// The HQ block sums to hq_share and the web block to 1 - hq_share, each
/// keeping its internal proportions.
CellWeights decay_mixture(const LanguageDistribution& web, const LanguageDistribution& hq, double hq_share,
                          const std::string& web_name = "web", const std::string& hq_name = "high_quality");

/// Single-dataset weights.
CellWeights cell_weights(const std::string& dataset, const LanguageDistribution& dist);

inline constexpr std::uint64_t kDefaultPlanSeed = 0x9a11e5eed;

struct PlanCell {
  std::string dataset;
  std::string lang;
  double weight = 0.0;
  std::uint64_t available = 0;
  std::uint64_t budget = 0;  // allocated share of the total
  std::uint64_t tokens = 0;  // what will actually be drawn
  std::uint32_t repetition = 1;
  std::uint64_t shortfall = 0;
  std::uint64_t seed = 0;
};

struct SamplingPlan {
  std::uint64_t total_tokens = 0;
  bool allow_repetition = false;
  std::vector<PlanCell> cells;
  std::vector<std::string> warnings;

  const PlanCell* find(const std::string& dataset, const std::string& lang) const;
  std::string to_json() const;
  // Fixed-width per-dataset share table.
  std::string table() const;
};

/// Per-cell budgets are floor(w * total) plus one token to the cells with
/// the largest remainders (ties to the earlier cell) so they sum to total.
SamplingPlan build_plan(const std::vector<DatasetManifest>& manifests, const CellWeights& target,
                        std::uint64_t total_tokens, bool allow_repetition,
                        std::uint64_t seed = kDefaultPlanSeed);

std::string distribution_to_json(const LanguageDistribution& d);
LanguageDistribution distribution_from_json(std::string_view json_text);

}  // namespace corpuskit::mixtures
