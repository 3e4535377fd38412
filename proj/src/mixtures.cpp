// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#include "corpuskit/mixtures.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "corpuskit/hash.hpp"

namespace corpuskit::mixtures {

using nlohmann::json;

namespace {

constexpr double kSlack = 1e-12;

struct Bounds {
  double p;
  double lo;
  double hi;
};

// Puts the rounding residue on the largest entry of `keys` so the weights
// add up to `target` as closely as doubles allow.
void absorb_residue(std::map<std::string, double>& w, const std::vector<std::string>& keys, double target) {
  if (keys.empty()) return;
  const auto biggest =
      *std::max_element(keys.begin(), keys.end(), [&](const auto& a, const auto& b) { return w[a] < w[b]; });
  double rest = 0.0;
  for (const auto& [lang, v] : w)
    if (lang != biggest) rest += v;
  w[biggest] = std::max(0.0, target - rest);
}

}  // namespace

std::string to_string(MixtureKind k) {
  switch (k) {
    case MixtureKind::balanced: return "balanced";
    case MixtureKind::intermediate: return "intermediate";
    case MixtureKind::original: return "original";
    case MixtureKind::train: return "train";
    case MixtureKind::equal: return "equal";
    case MixtureKind::decay: return "decay";
  }
  return "original";
}

MixtureKind kind_from_string(std::string_view s) {
  for (auto k : {MixtureKind::balanced, MixtureKind::intermediate, MixtureKind::original, MixtureKind::train,
                 MixtureKind::equal, MixtureKind::decay})
    if (to_string(k) == s) return k;
  throw Error("unknown mixture kind: " + std::string(s));
}

double MixtureSpec::cap_for(const std::string& lang) const {
  auto it = caps.find(lang);
  return it == caps.end() ? 1.0 : it->second;
}

double MixtureSpec::floor_for(const std::string& lang) const {
  auto it = floors.find(lang);
  return it == floors.end() ? floor : it->second;
}

MixtureSpec MixtureSpec::balanced() {
  MixtureSpec s;
  s.kind = MixtureKind::balanced;
  s.caps = {{"en", 0.20}};
  s.floor = 0.03;
  return s;
}

MixtureSpec MixtureSpec::intermediate() {
  MixtureSpec s;
  s.kind = MixtureKind::intermediate;
  s.caps = {{"en", 0.35}};
  s.floor = 0.01;
  return s;
}

MixtureSpec MixtureSpec::original() { return MixtureSpec{}; }

MixtureSpec MixtureSpec::train() {
  MixtureSpec s;
  s.kind = MixtureKind::train;
  return s;
}

MixtureSpec MixtureSpec::equal() {
  MixtureSpec s;
  s.kind = MixtureKind::equal;
  s.allow_repetition = true;
  return s;
}

MixtureSpec MixtureSpec::decay(double hq_share) {
  MixtureSpec s;
  s.kind = MixtureKind::decay;
  s.hq_share = hq_share;
  return s;
}

MixtureSpec MixtureSpec::preset(MixtureKind kind) {
  switch (kind) {
    case MixtureKind::balanced: return balanced();
    case MixtureKind::intermediate: return intermediate();
    case MixtureKind::original: return original();
    case MixtureKind::train: return train();
    case MixtureKind::equal: return equal();
    case MixtureKind::decay: return decay(0.3);
  }
  return original();
}

std::string MixtureSpec::to_json() const {
  json j;
  j["kind"] = to_string(kind);
  j["caps"] = caps;
  j["floor"] = floor;
  j["floors"] = floors;
  if (kind == MixtureKind::decay) j["hq_share"] = hq_share;
  j["allow_repetition"] = allow_repetition;
  return j.dump(2);
}

MixtureSpec MixtureSpec::from_json(std::string_view json_text) {
  const json j = json::parse(json_text);
  MixtureSpec s = preset(kind_from_string(j.value("kind", "original")));
  if (j.contains("caps")) s.caps = j["caps"].get<std::map<std::string, double>>();
  if (j.contains("floor")) s.floor = j["floor"].get<double>();
  if (j.contains("floors")) s.floors = j["floors"].get<std::map<std::string, double>>();
  if (j.contains("hq_share")) s.hq_share = j["hq_share"].get<double>();
  if (j.contains("allow_repetition")) s.allow_repetition = j["allow_repetition"].get<bool>();
  return s;
}

LanguageDistribution solve_distribution(const LanguageDistribution& source, const MixtureSpec& spec) {
  if (source.empty()) throw Error("solve_distribution: empty source distribution");
  const LanguageDistribution base =
      spec.kind == MixtureKind::equal ? LanguageDistribution::uniform(source.languages()) : source.normalized();

  std::map<std::string, Bounds> b;
  double floor_sum = 0.0;
  double max_mass = 0.0;
  for (const auto& [lang, p] : base) {
    const double lo = spec.floor_for(lang);
    const double hi = spec.cap_for(lang);
    if (!(lo >= 0.0 && hi <= 1.0)) throw Error("solve_distribution: bounds for " + lang + " outside [0,1]");
    if (hi < lo) throw Error("solve_distribution: cap below floor for " + lang);
    b[lang] = {p, lo, hi};
    floor_sum += lo;
    max_mass += p > 0.0 ? hi : lo;
  }
  if (floor_sum > 1.0 + kSlack) throw Error("solve_distribution: floors sum to more than 1");
  if (max_mass < 1.0 - kSlack) throw Error("solve_distribution: caps leave less than full mass");

  auto mass = [&](double s) {
    double m = 0.0;
    for (const auto& [_, x] : b) m += std::clamp(s * x.p, x.lo, x.hi);
    return m;
  };
  std::vector<double> knots = {0.0};
  for (const auto& [_, x] : b) {
    if (x.p <= 0.0) continue;
    knots.push_back(x.lo / x.p);
    knots.push_back(x.hi / x.p);
  }
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  std::size_t k = 0;
  while (k < knots.size() && mass(knots[k]) < 1.0) ++k;
  if (k == knots.size()) k = knots.size() - 1;  // max_mass within slack of 1

  std::map<std::string, double> out;
  if (k == 0) {
    for (const auto& [lang, x] : b) out[lang] = x.lo;
    return LanguageDistribution(std::move(out));
  }
  // Between two knots every language is either pinned to a bound or free.
  const double probe = 0.5 * (knots[k - 1] + knots[k]);
  double pinned = 0.0;
  double free_p = 0.0;
  std::vector<std::string> free_langs;
  for (const auto& [lang, x] : b) {
    const double v = probe * x.p;
    if (v <= x.lo) {
      out[lang] = x.lo;
    } else if (v >= x.hi) {
      out[lang] = x.hi;
    } else {
      free_langs.push_back(lang);
      free_p += x.p;
      continue;
    }
    pinned += out[lang];
  }
  if (free_langs.empty()) return LanguageDistribution(std::move(out));
  const double s = (1.0 - pinned) / free_p;
  for (const auto& lang : free_langs) out[lang] = s * b[lang].p;
  absorb_residue(out, free_langs, 1.0);
  return LanguageDistribution(std::move(out));
}

CellWeights cell_weights(const std::string& dataset, const LanguageDistribution& dist) {
  CellWeights w;
  for (const auto& [lang, v] : dist.normalized()) w[{dataset, lang}] = v;
  return w;
}

CellWeights decay_mixture(const LanguageDistribution& web, const LanguageDistribution& hq, double hq_share,
                          const std::string& web_name, const std::string& hq_name) {
  if (!(hq_share >= 0.0 && hq_share <= 1.0)) throw Error("decay_mixture: hq_share must be in [0,1]");
  if (web_name == hq_name) throw Error("decay_mixture: dataset names must differ");
  CellWeights w;
  auto add_block = [&](const std::string& name, const LanguageDistribution& d, double share) {
    if (share == 0.0) return;
    std::map<std::string, double> block;
    std::vector<std::string> langs;
    for (const auto& [lang, v] : d.normalized()) {
      block[lang] = share * v;
      langs.push_back(lang);
    }
    absorb_residue(block, langs, share);
    for (const auto& [lang, v] : block) w[{name, lang}] = v;
  };
  add_block(web_name, web, 1.0 - hq_share);
  add_block(hq_name, hq, hq_share);
  return w;
}

const PlanCell* SamplingPlan::find(const std::string& dataset, const std::string& lang) const {
  for (const auto& c : cells)
    if (c.dataset == dataset && c.lang == lang) return &c;
  return nullptr;
}

SamplingPlan build_plan(const std::vector<DatasetManifest>& manifests, const CellWeights& target,
                        std::uint64_t total_tokens, bool allow_repetition, std::uint64_t seed) {
  if (total_tokens == 0) throw Error("build_plan: total_tokens must be positive");
  if (target.empty()) throw Error("build_plan: empty target");
  double wsum = 0.0;
  for (const auto& [cell, w] : target) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error("build_plan: bad weight for " + cell.first + "/" + cell.second);
    wsum += w;
  }
  if (!(wsum > 0.0)) throw Error("build_plan: weights sum to zero");

  std::map<Cell, std::uint64_t> avail;
  for (const auto& m : manifests)
    for (const auto& s : m.shards) avail[{m.name, s.lang}] += s.tokens;

  SamplingPlan plan;
  plan.total_tokens = total_tokens;
  plan.allow_repetition = allow_repetition;
  std::vector<double> remainder;
  std::uint64_t assigned = 0;
  for (const auto& [cell, w] : target) {
    PlanCell c;
    c.dataset = cell.first;
    c.lang = cell.second;
    c.weight = w / wsum;
    const double exact = c.weight * static_cast<double>(total_tokens);
    c.budget = static_cast<std::uint64_t>(std::floor(exact));
    remainder.push_back(exact - std::floor(exact));
    assigned += c.budget;
    auto it = avail.find(cell);
    c.available = it == avail.end() ? 0 : it->second;
    c.seed = mix64(hash_combine(seed, hash64(c.dataset + '\x1f' + c.lang)));
    plan.cells.push_back(std::move(c));
  }
  std::vector<std::size_t> order(plan.cells.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < total_tokens; ++i, ++assigned) ++plan.cells[order[i % order.size()]].budget;

  for (auto& c : plan.cells) {
    if (c.budget == 0) continue;
    if (c.available == 0)
      throw Error("build_plan: no tokens available for " + c.dataset + "/" + c.lang + " but weight is positive");
    if (allow_repetition) {
      c.repetition = static_cast<std::uint32_t>((c.budget + c.available - 1) / c.available);
      c.tokens = c.budget;
    } else if (c.budget > c.available) {
      c.tokens = c.available;
      c.shortfall = c.budget - c.available;
      plan.warnings.push_back("shortfall of " + std::to_string(c.shortfall) + " tokens in " + c.dataset + "/" +
                              c.lang);
    } else {
      c.tokens = c.budget;
    }
  }
  return plan;
}

std::string SamplingPlan::to_json() const {
  json j;
  j["version"] = 1;
  j["total_tokens"] = total_tokens;
  j["allow_repetition"] = allow_repetition;
  j["cells"] = json::array();
  for (const auto& c : cells) {
    j["cells"].push_back({{"dataset", c.dataset},
                          {"lang", c.lang},
                          {"weight", c.weight},
                          {"available", c.available},
                          {"budget", c.budget},
                          {"tokens", c.tokens},
                          {"repetition", c.repetition},
                          {"shortfall", c.shortfall},
                          {"seed", c.seed}});
  }
  j["warnings"] = warnings;
  return j.dump(2);
}

std::string SamplingPlan::table() const {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %-6s %8s %16s %16s %5s\n", "dataset", "lang", "share", "budget",
                "available", "rep");
  os << line;
  for (const auto& c : cells) {
    std::snprintf(line, sizeof line, "%-16s %-6s %7.2f%% %16llu %16llu %5u\n", c.dataset.c_str(), c.lang.c_str(),
                  100.0 * c.weight, static_cast<unsigned long long>(c.budget),
                  static_cast<unsigned long long>(c.available), c.repetition);
    os << line;
  }
  return os.str();
}

std::string distribution_to_json(const LanguageDistribution& d) {
  return json(d.weights()).dump(2);
}

LanguageDistribution distribution_from_json(std::string_view json_text) {
  return LanguageDistribution(json::parse(json_text).get<std::map<std::string, double>>());
}

}  // namespace corpuskit::mixtures
