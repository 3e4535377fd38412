// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#include "corpuskit/corpus.hpp"

#include <json.hpp>

#include <array>
#include <cmath>

#include "corpuskit/text.hpp"

namespace corpuskit {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 9> kStageNames = {
    "lang_id", "heuristic", "repetition", "blacklist", "dedup",
    "eval_dedup", "sft_length", "sft_short", "sft_lang_mismatch"};

constexpr std::array<std::string_view, 5> kRoleNames = {"web", "high_quality", "code", "sft", "eval"};

}  // namespace

std::string_view to_string(Stage s) { return kStageNames[static_cast<std::size_t>(s)]; }

Stage stage_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kStageNames.size(); ++i)
    if (kStageNames[i] == s) return static_cast<Stage>(i);
  throw Error("unknown stage: " + std::string(s));
}

std::string_view to_string(DatasetRole r) { return kRoleNames[static_cast<std::size_t>(r)]; }

DatasetRole role_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kRoleNames.size(); ++i)
    if (kRoleNames[i] == s) return static_cast<DatasetRole>(i);
  throw Error("unknown dataset role: " + std::string(s));
}

// ---------------------------------------------------------------------------
// Manifest

namespace {

json manifest_json(const DatasetManifest& m) {
  json shards = json::array();
  for (const auto& s : m.shards) {
    shards.push_back({{"path", s.path},
                      {"documents", s.documents},
                      {"words", s.words},
                      {"tokens", s.tokens},
                      {"lang", s.lang}});
  }
  return {{"version", 1},
          {"name", m.name},
          {"role", std::string(to_string(m.role))},
          {"tokenizer_id", m.tokenizer_id},
          {"shards", shards}};
}

}  // namespace

std::string manifest_to_json(const DatasetManifest& m) { return manifest_json(m).dump(2); }

void save_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write manifest: " + path.string());
  out << manifest_to_json(m) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error("malformed manifest " + path.string() + ": " + e.what());
  }
  DatasetManifest m;
  m.name = j.value("name", "");
  m.role = role_from_string(j.value("role", "web"));
  m.tokenizer_id = j.value("tokenizer_id", "");
  for (const auto& s : j.at("shards")) {
    ShardEntry e;
    e.path = s.value("path", "");
    e.documents = s.value("documents", std::uint64_t{0});
    e.words = s.value("words", std::uint64_t{0});
    e.tokens = s.value("tokens", std::uint64_t{0});
    e.lang = s.value("lang", "");
    m.shards.push_back(std::move(e));
  }
  return m;
}

// ---------------------------------------------------------------------------
// LanguageDistribution

LanguageDistribution::LanguageDistribution(std::map<std::string, double> weights)
    : weights_(std::move(weights)) {
  for (const auto& [lang, w] : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error("negative or non-finite weight for " + lang);
  }
}

LanguageDistribution LanguageDistribution::from_counts(const std::map<std::string, double>& counts) {
  return LanguageDistribution(counts).normalized();
}

LanguageDistribution LanguageDistribution::uniform(const std::vector<std::string>& langs) {
  std::map<std::string, double> w;
  for (const auto& l : langs) w[l] = 1.0;
  return from_counts(w);
}

LanguageDistribution LanguageDistribution::normalized() const {
  const double total = sum();
  if (!(total > 0.0)) throw Error("cannot normalize an empty or all-zero distribution");
  std::map<std::string, double> w;
  for (const auto& [lang, v] : weights_) w[lang] = v / total;
  return LanguageDistribution(std::move(w));
}

double LanguageDistribution::sum() const {
  double s = 0.0;
  for (const auto& [_, v] : weights_) s += v;
  return s;
}

double LanguageDistribution::at(const std::string& lang) const {
  auto it = weights_.find(lang);
  return it == weights_.end() ? 0.0 : it->second;
}

std::vector<std::string> LanguageDistribution::languages() const {
  std::vector<std::string> out;
  out.reserve(weights_.size());
  for (const auto& [lang, _] : weights_) out.push_back(lang);
  return out;
}

CorpusStats corpus_stats(const DatasetManifest& manifest, CountBasis basis) {
  if (manifest.shards.empty()) throw Error("corpus_stats: empty manifest");
  CorpusStats stats;
  for (const auto& s : manifest.shards) {
    auto& c = stats.per_language[s.lang];
    c.documents += s.documents;
    c.words += s.words;
    c.tokens += s.tokens;
    stats.total.documents += s.documents;
    stats.total.words += s.words;
    stats.total.tokens += s.tokens;
  }
  std::map<std::string, double> counts;
  for (const auto& [lang, c] : stats.per_language) {
    switch (basis) {
      case CountBasis::tokens: counts[lang] = static_cast<double>(c.tokens); break;
      case CountBasis::words: counts[lang] = static_cast<double>(c.words); break;
      case CountBasis::documents: counts[lang] = static_cast<double>(c.documents); break;
    }
  }
  double sum = 0.0;
  for (const auto& [lang, c] : counts) sum += c;
  // A manifest written without a tokenizer has no token counts; leave the
  // distribution empty rather than failing so callers can pick another basis.
  if (sum > 0.0) stats.distribution = LanguageDistribution::from_counts(counts);
  return stats;
}

// ---------------------------------------------------------------------------
// Records

std::string record_to_line(const Document& doc) {
  if (!text::is_valid_utf8(doc.text)) throw Error("document " + doc.id + ": text is not valid UTF-8");
  json j = {{"id", doc.id}, {"text", doc.text}, {"lang", doc.lang}, {"source", doc.source}};
  if (!doc.meta.empty()) j["meta"] = doc.meta;
  return j.dump();
}

Document record_from_line(std::string_view line) {
  try {
    json j = json::parse(line);
    if (!j.is_object()) throw Error("record is not an object");
    Document d;
    d.id = j.at("id").get<std::string>();
    if (d.id.empty()) throw Error("record has an empty id");
    d.text = j.at("text").get<std::string>();
    d.lang = j.value("lang", "und");
    d.source = j.value("source", "");
    if (auto it = j.find("meta"); it != j.end()) d.meta = it->get<std::map<std::string, std::string>>();
    return d;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed record: ") + e.what());
  }
}

void for_each_record(const std::filesystem::path& path,
                     const std::function<void(Document&&)>& on_doc,
                     const std::function<void(const RecordError&)>& on_error) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open record file: " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      on_doc(record_from_line(line));
    } catch (const std::exception& e) {
      on_error({lineno, e.what()});
    }
  }
}

ReadResult read_records(const std::filesystem::path& path) {
  ReadResult r;
  for_each_record(
      path, [&](Document&& d) { r.documents.push_back(std::move(d)); },
      [&](const RecordError& e) { r.errors.push_back(e); });
  return r;
}

ShardEntry write_records(const std::vector<Document>& docs, const std::filesystem::path& path,
                         const TokenCounter& count_tokens) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write record file: " + path.string());
  ShardEntry e;
  e.path = path.string();
  for (const auto& d : docs) {
    out << record_to_line(d) << '\n';
    ++e.documents;
    e.words += text::count_words(d.text);
    if (count_tokens) e.tokens += count_tokens(d.text);
    if (e.lang.empty()) {
      e.lang = d.lang;
    } else if (e.lang != d.lang) {
      e.lang = "mixed";
    }
  }
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
  return e;
}

// ---------------------------------------------------------------------------
// Reports

void StageReport::record(const std::string& lang, const FilterVerdict& v) {
  ++in;
  ++in_by_lang[lang];
  if (v.keep) {
    ++kept;
    ++kept_by_lang[lang];
  } else {
    ++drop_reasons[v.rule.empty() ? std::string(to_string(v.stage)) : v.rule];
  }
}

StageReport& PipelineReport::stage(Stage s) {
  for (auto& st : stages)
    if (st.stage == s) return st;
  StageReport fresh;
  fresh.stage = s;
  stages.push_back(std::move(fresh));
  return stages.back();
}

const StageReport* PipelineReport::find(Stage s) const {
  for (const auto& st : stages)
    if (st.stage == s) return &st;
  return nullptr;
}

double PipelineReport::overall_retention() const {
  if (stages.empty() || stages.front().in == 0) return 1.0;
  return static_cast<double>(stages.back().kept) / static_cast<double>(stages.front().in);
}

std::map<std::string, double> PipelineReport::retention_by_lang() const {
  std::map<std::string, double> out;
  if (stages.empty()) return out;
  for (const auto& [lang, n] : stages.front().in_by_lang) {
    auto it = stages.back().kept_by_lang.find(lang);
    const double kept = it == stages.back().kept_by_lang.end() ? 0.0 : static_cast<double>(it->second);
    out[lang] = n == 0 ? 1.0 : kept / static_cast<double>(n);
  }
  return out;
}

std::string report_to_json(const std::vector<PipelineReport>& reports) {
  json out = json::array();
  for (const auto& r : reports) {
    json stages = json::array();
    for (const auto& s : r.stages) {
      stages.push_back({{"stage", std::string(to_string(s.stage))},
                        {"in", s.in},
                        {"kept", s.kept},
                        {"retention", s.retention()},
                        {"drop_reasons", s.drop_reasons},
                        {"in_by_lang", s.in_by_lang},
                        {"kept_by_lang", s.kept_by_lang}});
    }
    out.push_back({{"dataset", r.dataset},
                   {"stages", stages},
                   {"retention", r.overall_retention()},
                   {"retention_by_lang", r.retention_by_lang()}});
  }
  return json{{"version", 1}, {"datasets", out}}.dump(2);
}

}  // namespace corpuskit
