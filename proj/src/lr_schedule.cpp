// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#include "corpuskit/lr_schedule.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>

#include "corpuskit/corpus.hpp"

namespace corpuskit::schedule {

using nlohmann::json;

void WsdConfig::validate() const {
  if (total_steps <= 0) throw Error("wsd: total_steps must be positive");
  if (warmup_steps < 0 || stable_steps_at_peak < 0) throw Error("wsd: phase lengths must be non-negative");
  if (!(peak_lr > 0.0) || !std::isfinite(peak_lr)) throw Error("wsd: peak_lr must be positive");
  if (!(post_drop_lr > 0.0) || post_drop_lr > peak_lr) throw Error("wsd: post_drop_lr must be in (0, peak_lr]");
  if (!(floor_lr >= 0.0) || floor_lr > post_drop_lr) throw Error("wsd: floor_lr must be in [0, post_drop_lr]");
  if (!(decay_fraction > 0.0 && decay_fraction <= 1.0)) throw Error("wsd: decay_fraction must be in (0, 1]");
  if (warmup_steps + stable_steps_at_peak > decay_start())
    throw Error("wsd: warmup and stable phases overlap the decay phase");
}

std::int64_t WsdConfig::decay_steps() const {
  const double x = decay_fraction * static_cast<double>(total_steps);
  const double r = std::round(x);
  // Absorb representation error so 0.1 * 715000 is 71500, not 71501.
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, x)) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::ceil(x));
}

double lr_at(const WsdConfig& cfg, std::int64_t step) {
  cfg.validate();
  if (step < 0 || step > cfg.total_steps) throw Error("wsd: step " + std::to_string(step) + " out of range");
  if (step < cfg.warmup_steps)
    return cfg.peak_lr * (static_cast<double>(step) / static_cast<double>(cfg.warmup_steps));
  if (step < cfg.warmup_steps + cfg.stable_steps_at_peak) return cfg.peak_lr;
  const auto start = cfg.decay_start();
  if (step < start) return cfg.post_drop_lr;
  if (step == cfg.total_steps) return cfg.floor_lr;
  const double t = static_cast<double>(step - start) / static_cast<double>(cfg.total_steps - start);
  return std::clamp(cfg.post_drop_lr + (cfg.floor_lr - cfg.post_drop_lr) * t, cfg.floor_lr, cfg.post_drop_lr);
}

std::vector<std::pair<std::int64_t, double>> emit_schedule(const WsdConfig& cfg, std::int64_t stride) {
  cfg.validate();
  if (stride < 1) throw Error("wsd: stride must be at least 1");
  std::vector<std::int64_t> steps;
  for (std::int64_t s = 0; s <= cfg.total_steps; s += stride) steps.push_back(s);
  for (auto s : {cfg.warmup_steps, cfg.warmup_steps + cfg.stable_steps_at_peak, cfg.decay_start(), cfg.total_steps})
    steps.push_back(s);
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  std::vector<std::pair<std::int64_t, double>> out;
  out.reserve(steps.size());
  for (auto s : steps) out.emplace_back(s, lr_at(cfg, s));
  return out;
}

std::string schedule_to_tsv(const std::vector<std::pair<std::int64_t, double>>& rows) {
  std::string out = "step\tlr\n";
  char buf[512];  // fixed notation of any double fits
  for (const auto& [s, lr] : rows) {
    out += std::to_string(s) + '\t';
    out.append(buf, std::to_chars(buf, buf + sizeof buf, lr, std::chars_format::fixed).ptr);
    out += '\n';
  }
  return out;
}

std::string WsdConfig::to_json() const {
  json j = {{"warmup_steps", warmup_steps},   {"peak_lr", peak_lr},
            {"stable_steps_at_peak", stable_steps_at_peak}, {"post_drop_lr", post_drop_lr},
            {"total_steps", total_steps},     {"decay_fraction", decay_fraction},
            {"floor_lr", floor_lr}};
  return j.dump(2);
}

WsdConfig WsdConfig::from_json(std::string_view json_text) {
  const json j = json::parse(json_text);
  WsdConfig c;
  c.warmup_steps = j.at("warmup_steps").get<std::int64_t>();
  c.peak_lr = j.at("peak_lr").get<double>();
  c.stable_steps_at_peak = j.at("stable_steps_at_peak").get<std::int64_t>();
  c.post_drop_lr = j.value("post_drop_lr", c.peak_lr);
  c.total_steps = j.at("total_steps").get<std::int64_t>();
  c.decay_fraction = j.value("decay_fraction", 0.1);
  c.floor_lr = j.value("floor_lr", 0.0);
  c.validate();
  return c;
}

}  // namespace corpuskit::schedule
