// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace corpuskit::schedule {

/// Warmup-stable-decay schedule with an optional mid-run drop:
///   [0, warmup)                      linear 0 -> peak
///   [warmup, warmup + stable)        peak
///   [warmup + stable, decay_start)   post_drop
///   [decay_start, total]             linear post_drop -> floor
/// decay_start = total - ceil(decay_fraction * total).
struct WsdConfig {
  std::int64_t warmup_steps = 0;
  double peak_lr = 0.0;
  std::int64_t stable_steps_at_peak = 0;
  double post_drop_lr = 0.0;
  std::int64_t total_steps = 0;
  double decay_fraction = 0.1;
  double floor_lr = 0.0;

  void validate() const;
  std::int64_t decay_steps() const;
  std::int64_t decay_start() const { return total_steps - decay_steps(); }

  std::string to_json() const;
  static WsdConfig from_json(std::string_view json_text);
};

double lr_at(const WsdConfig& cfg, std::int64_t step);

/// lr_at on 0, stride, 2*stride, ... plus total_steps and every phase
/// boundary, sorted by step.
std::vector<std::pair<std::int64_t, double>> emit_schedule(const WsdConfig& cfg, std::int64_t stride);

// Two tab-separated columns with a header row.
std::string schedule_to_tsv(const std::vector<std::pair<std::int64_t, double>>& rows);

}  // namespace corpuskit::schedule
