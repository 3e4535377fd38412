// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#include "corpuskit/scoring.hpp"

#include <json.hpp>

#include <fstream>

#include "corpuskit/corpus.hpp"
#include "corpuskit/text.hpp"

namespace corpuskit::scoring {

using nlohmann::json;

namespace {

std::string unescape(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\' || i + 1 == s.size()) {
      out.push_back(s[i]);
      continue;
    }
    switch (s[++i]) {
      case 't': out.push_back('\t'); break;
      case 'n': out.push_back('\n'); break;
      case '\\': out.push_back('\\'); break;
      default:
        out.push_back('\\');
        out.push_back(s[i]);
    }
  }
  return out;
}

}  // namespace

void MatchPolicy::validate() const {
  if (!case_fold && !strip_punct && !collapse_whitespace)
    throw Error("match policy: at least one normalization must be enabled");
}

std::string normalize(std::string_view input, const MatchPolicy& policy) {
  const std::string folded = policy.case_fold ? text::case_fold(input) : std::string(input);
  std::u32string cps = text::decode_utf8(folded);
  if (policy.strip_punct)
    for (auto& c : cps)
      if (text::is_punct_or_symbol(c)) c = U' ';
  if (!policy.collapse_whitespace) return text::encode_utf8(cps);
  std::u32string out;
  bool pending_space = false;
  for (char32_t c : cps) {
    if (text::is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(c);
  }
  return text::encode_utf8(out);
}

bool fuzzy_contains(std::string_view output, std::string_view gold, const MatchPolicy& policy) {
  policy.validate();
  if (gold.empty()) throw Error("fuzzy_contains: empty gold answer");
  const auto o = text::decode_utf8(normalize(output, policy));
  const auto g = text::decode_utf8(normalize(gold, policy));
  if (g.empty()) return false;
  for (auto pos = o.find(g); pos != std::u32string::npos; pos = o.find(g, pos + 1)) {
    if (!policy.token_boundary) return true;
    const auto end = pos + g.size();
    const bool left = pos == 0 || text::is_space(o[pos - 1]) || text::is_space(g.front());
    const bool right = end == o.size() || text::is_space(o[end]) || text::is_space(g.back());
    if (left && right) return true;
  }
  return false;
}

double accuracy(const std::vector<std::pair<std::string, std::string>>& pairs, const MatchPolicy& policy) {
  if (pairs.empty()) throw Error("accuracy: no pairs");
  std::size_t hits = 0;
  for (const auto& [out, gold] : pairs) hits += fuzzy_contains(out, gold, policy) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

ScoreReport score(const std::vector<ScoredItem>& items, const MatchPolicy& policy) {
  if (items.empty()) throw Error("score: no items");
  ScoreReport r;
  for (const auto& it : items) {
    const bool ok = fuzzy_contains(it.output, it.gold, policy);
    ++r.overall.total;
    r.overall.correct += ok;
    if (!it.lang.empty()) {
      auto& t = r.per_language[it.lang];
      ++t.total;
      t.correct += ok;
    }
  }
  return r;
}

std::string ScoreReport::to_json() const {
  auto tally = [](const Tally& t) {
    return json{{"total", t.total}, {"correct", t.correct}, {"accuracy", t.accuracy()}};
  };
  json j;
  j["overall"] = tally(overall);
  j["per_language"] = json::object();
  for (const auto& [lang, t] : per_language) j["per_language"][lang] = tally(t);
  return j.dump(2);
}

std::vector<ScoredItem> read_items(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const bool jsonl = path.extension() == ".jsonl";
  std::vector<ScoredItem> items;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto where = path.string() + ":" + std::to_string(lineno);
    ScoredItem it;
    if (jsonl) {
      try {
        const json j = json::parse(line);
        it.output = j.at("output").get<std::string>();
        it.gold = j.at("gold").get<std::string>();
        it.lang = j.value("lang", "");
      } catch (const json::exception& e) {
        throw Error(where + ": " + e.what());
      }
    } else {
      std::vector<std::string_view> cols;
      std::string_view rest(line);
      for (auto tab = rest.find('\t'); tab != std::string_view::npos; tab = rest.find('\t')) {
        cols.push_back(rest.substr(0, tab));
        rest.remove_prefix(tab + 1);
      }
      cols.push_back(rest);
      if (cols.size() < 2 || cols.size() > 3) throw Error(where + ": expected 2 or 3 tab-separated columns");
      it.output = unescape(cols[0]);
      it.gold = unescape(cols[1]);
      if (cols.size() == 3) it.lang = std::string(cols[2]);
    }
    items.push_back(std::move(it));
  }
  return items;
}

}  // namespace corpuskit::scoring
