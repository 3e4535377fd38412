// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#include "corpuskit/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "corpuskit/bpe.hpp"
#include "corpuskit/lang_id.hpp"
#include "corpuskit/text.hpp"

namespace corpuskit::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Item {
  Document doc;
  std::optional<sft::SftSample> sample;
  std::size_t shard = 0;
  bool alive = true;
};

struct Resources {
  std::optional<lang_id::LangClassifier> clf;
  quality::QualityConfig quality;
  quality::Blacklist blacklist;
  std::optional<bpe::TokenizerModel> tokenizer;
  std::optional<dedup::EvalIndex> exact_index;
  std::optional<dedup::MinHashEvalIndex> minhash_index;
};

bool concrete_lang(const std::string& l) { return !l.empty() && l != "und" && l != "mixed"; }

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& data) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  out << data;
  if (!out) throw IoError("write failed: " + p.string());
}

fs::path resolve(const fs::path& base, const fs::path& p) { return p.is_absolute() || base.empty() ? p : base / p; }

/// Runs f(i) for i in [0, n) on up to `workers` threads. The exception of the
/// lowest failing index is rethrown so failures are reproducible too.
template <typename F>
void parallel_for(std::size_t n, int workers, F f) {
  const auto threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = n;
  std::exception_ptr failure;
  auto body = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string sft_text(const sft::SftSample& s) {
  std::string t = s.instruction;
  if (s.input) t += "\n" + *s.input;
  return t + "\n" + s.response;
}

lang_id::LangPrediction predict_lang(const Document& doc, const Resources& res) {
  if (auto p = lang_id::prediction_from_meta(doc)) return *p;
  if (!res.clf) throw Error("document " + doc.id + ": no language classifier and no lang_id metadata");
  return res.clf->classify(doc.text);
}

FilterVerdict apply_stage(Stage stage, Item& it, const std::string& shard_lang, const PipelineConfig& cfg,
                          const Resources& res) {
  switch (stage) {
    case Stage::lang_id: {
      if (it.sample) {
        if (!res.clf) throw Error("sample " + it.doc.id + ": the lang_id stage needs a language classifier");
        auto v = sft::lang_match_filter(*it.sample, *res.clf, cfg.min_lang_confidence);
        v.stage = Stage::lang_id;
        return v;
      }
      const auto pred = predict_lang(it.doc, res);
      const std::string expected = concrete_lang(it.doc.lang) ? it.doc.lang : shard_lang;
      FilterVerdict v;
      if (concrete_lang(expected)) {
        v = lang_id::language_filter(pred, expected, cfg.min_lang_confidence);
      } else if (!pred.determined) {
        v = FilterVerdict::drop(Stage::lang_id, "undetermined", 0.0, cfg.min_lang_confidence);
      } else if (pred.confidence < cfg.min_lang_confidence) {
        v = FilterVerdict::drop(Stage::lang_id, "low_confidence", pred.confidence, cfg.min_lang_confidence);
      } else {
        v = FilterVerdict::pass(Stage::lang_id, pred.confidence);
      }
      if (v.keep) it.doc.lang = pred.lang;
      return v;
    }
    case Stage::heuristic:
      return quality::apply_heuristics(it.doc, res.quality.heuristic_for(it.doc.lang));
    case Stage::repetition:
      return quality::apply_repetition(it.doc, res.quality.repetition_for(it.doc.lang));
    case Stage::blacklist:
      return quality::apply_blacklist(it.doc, res.blacklist);
    case Stage::eval_dedup:
      if (res.minhash_index) return dedup::eval_dedup(it.doc, *res.minhash_index, cfg.jaccard_threshold);
      return dedup::eval_dedup(it.doc, *res.exact_index, cfg.jaccard_threshold);
    case Stage::sft_short:
      return sft::short_filter(*it.sample, cfg.sft_min_instruction_words, cfg.sft_min_response_words);
    case Stage::sft_length:
      return sft::length_filter(*it.sample, *res.tokenizer, cfg.sft_max_len);
    default:
      throw Error("stage " + std::string(to_string(stage)) + " is not a per-document stage");
  }
}

void log_drop(std::ostream* log, const std::string& dataset, const Item& it, const FilterVerdict& v) {
  if (!log) return;
  *log << json{{"event", "drop"},
               {"dataset", dataset},
               {"doc", it.doc.id},
               {"lang", it.doc.lang},
               {"stage", std::string(to_string(v.stage))},
               {"rule", v.rule},
               {"value", v.value},
               {"threshold", v.threshold}}
              .dump()
       << "\n";
}

std::vector<Document> load_docs(const fs::path& path, const std::string& default_lang) {
  std::vector<Document> docs;
  std::unordered_set<std::string> ids;
  for_each_record(
      path,
      [&](Document&& d) {
        if (!ids.insert(d.id).second) throw Error(path.string() + ": duplicate document id " + d.id);
        if (d.lang == "und" && !default_lang.empty() && concrete_lang(default_lang)) d.lang = default_lang;
        docs.push_back(std::move(d));
      },
      [&](const RecordError& e) {
        throw Error(path.string() + ":" + std::to_string(e.line) + ": " + e.message);
      });
  return docs;
}

std::vector<sft::SftSample> load_samples(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<sft::SftSample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(sft::sample_from_line(line));
    } catch (const std::exception& e) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (out.back().id.empty()) out.back().id = path.filename().string() + ":" + std::to_string(lineno);
  }
  return out;
}

std::string sft_output_line(const Item& it, const Resources& res) {
  json j = json::parse(sft::sample_to_line(*it.sample));
  if (res.tokenizer) {
    const auto w = sft::wrap_tokenized(*it.sample, *res.tokenizer);
    j["text"] = w.text;
    j["tokens"] = w.token_count;
    j["response_start"] = w.response_start;
  } else {
    j["text"] = sft::wrap(*it.sample);
  }
  return j.dump();
}

std::string report_document(const std::vector<PipelineReport>& reports, const PipelineConfig& cfg,
                            const std::string& error) {
  json j = json::parse(report_to_json(reports));
  j["status"] = error.empty() ? "ok" : "failed";
  if (!error.empty()) j["error"] = error;
  j["seed"] = cfg.seed;
  j["dedup"] = {{"shingle_width", cfg.shingle_width},
                {"jaccard_threshold", cfg.jaccard_threshold},
                {"mode", cfg.dedup_mode == DedupMode::exact ? "exact" : "minhash"}};
  return j.dump(2) + "\n";
}

}  // namespace

std::vector<Stage> default_stages(DatasetRole role) {
  switch (role) {
    case DatasetRole::web: return {Stage::blacklist, Stage::eval_dedup};
    case DatasetRole::high_quality:
      return {Stage::lang_id, Stage::heuristic, Stage::repetition, Stage::blacklist, Stage::dedup, Stage::eval_dedup};
    case DatasetRole::code: return {Stage::eval_dedup};
    case DatasetRole::sft: return {Stage::lang_id, Stage::eval_dedup, Stage::sft_short, Stage::sft_length};
    case DatasetRole::eval: return {};
  }
  return {};
}

std::vector<Stage> PipelineConfig::stages_for(DatasetRole role, const DatasetSpec& spec) const {
  std::set<Stage> on;
  for (auto s : default_stages(role)) on.insert(s);
  // Without a tokenizer the length filter is off unless explicitly requested.
  if (!tokenizer && !spec.toggles.count(Stage::sft_length)) on.erase(Stage::sft_length);
  for (const auto& [s, enabled] : spec.toggles) {
    if (enabled) {
      on.insert(s);
    } else {
      on.erase(s);
    }
  }
  std::vector<Stage> ordered;
  for (auto s : kCleaningOrder)
    if (on.count(s)) ordered.push_back(s);
  for (auto s : kSftOrder)
    if (on.count(s)) ordered.push_back(s);
  if (on.count(Stage::sft_lang_mismatch)) throw Error("use the lang_id stage toggle for SFT language matching");
  return ordered;
}

void PipelineConfig::validate() const {
  if (datasets.empty()) throw Error("config: no datasets");
  if (output_dir.empty()) throw Error("config: output_dir is required");
  if (workers < 1) throw Error("config: workers must be at least 1");
  if (shingle_width < 1) throw Error("config: shingle_width must be at least 1");
  if (!(jaccard_threshold > 0.0 && jaccard_threshold <= 1.0)) throw Error("config: jaccard_threshold must be in (0,1]");
  if (!(min_lang_confidence >= 0.0 && min_lang_confidence <= 1.0))
    throw Error("config: min_lang_confidence must be in [0,1]");
  for (double t : {overlap.max_line_overlap, overlap.max_paragraph_overlap})
    if (!(t >= 0.0 && t <= 1.0)) throw Error("config: overlap thresholds must be in [0,1]");
  for (const auto& opt : {langid_model, quality_config, blacklist_dir, tokenizer})
    if (opt && !fs::exists(*opt)) throw Error("config: path does not exist: " + opt->string());

  std::set<std::string> names;
  for (const auto& d : datasets) {
    if (!fs::exists(d.manifest)) throw Error("config: manifest does not exist: " + d.manifest.string());
    const auto m = load_manifest(d.manifest);
    if (!names.insert(m.name).second) throw Error("config: duplicate dataset name " + m.name);
    for (const auto& s : m.shards) {
      const auto p = resolve(d.manifest.parent_path(), s.path);
      if (!fs::exists(p)) throw Error("config: shard does not exist: " + p.string());
    }
    const auto role = d.role.value_or(m.role);
    const auto stages = stages_for(role, d);
    for (auto s : stages) {
      const bool sft_only = s == Stage::sft_short || s == Stage::sft_length;
      if (sft_only && role != DatasetRole::sft)
        throw Error("config: stage " + std::string(to_string(s)) + " only applies to sft datasets");
      if (s == Stage::sft_length && !tokenizer) throw Error("config: sft_length needs a tokenizer");
      if (s == Stage::lang_id && role == DatasetRole::sft && !langid_model)
        throw Error("config: SFT language matching needs langid_model");
    }
  }
}

PipelineConfig PipelineConfig::from_json(std::string_view json_text, const fs::path& base) {
  const json j = json::parse(json_text);
  if (j.value("version", kVersion) != kVersion) throw Error("config: unsupported version");
  PipelineConfig c;
  auto path_of = [&](const char* key) -> std::optional<fs::path> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return resolve(base, j[key].get<std::string>());
  };
  for (const auto& d : j.at("datasets")) {
    DatasetSpec s;
    if (d.is_string()) {
      s.manifest = resolve(base, d.get<std::string>());
    } else {
      s.manifest = resolve(base, d.at("manifest").get<std::string>());
      if (d.contains("role")) s.role = role_from_string(d["role"].get<std::string>());
      if (d.contains("stages"))
        for (auto& [name, on] : d["stages"].items()) s.toggles[stage_from_string(name)] = on.get<bool>();
    }
    c.datasets.push_back(std::move(s));
  }
  c.output_dir = resolve(base, j.at("output_dir").get<std::string>());
  c.workers = j.value("workers", 1);
  c.seed = j.value("seed", c.seed);
  c.verbose = j.value("verbose", false);
  c.langid_model = path_of("langid_model");
  c.quality_config = path_of("quality_config");
  c.blacklist_dir = path_of("blacklist_dir");
  c.tokenizer = path_of("tokenizer");
  c.min_lang_confidence = j.value("min_lang_confidence", c.min_lang_confidence);
  if (j.contains("dedup")) {
    const auto& d = j["dedup"];
    c.shingle_width = d.value("shingle_width", c.shingle_width);
    c.jaccard_threshold = d.value("jaccard_threshold", c.jaccard_threshold);
    c.overlap.max_line_overlap = d.value("max_line_overlap", c.overlap.max_line_overlap);
    c.overlap.max_paragraph_overlap = d.value("max_paragraph_overlap", c.overlap.max_paragraph_overlap);
    const auto mode = d.value("mode", std::string("exact"));
    if (mode == "exact") {
      c.dedup_mode = DedupMode::exact;
    } else if (mode == "minhash") {
      c.dedup_mode = DedupMode::minhash;
    } else {
      throw Error("config: unknown dedup mode " + mode);
    }
  }
  if (j.contains("sft")) {
    const auto& s = j["sft"];
    c.sft_max_len = s.value("max_len", c.sft_max_len);
    c.sft_min_instruction_words = s.value("min_instruction_words", c.sft_min_instruction_words);
    c.sft_min_response_words = s.value("min_response_words", c.sft_min_response_words);
  }
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  return from_json(read_text(path), path.parent_path());
}

std::vector<PipelineReport> run_pipeline(const PipelineConfig& cfg, std::ostream* log) {
  cfg.validate();

  Resources res;
  if (cfg.langid_model) res.clf = lang_id::LangClassifier::load(*cfg.langid_model);
  if (cfg.quality_config) res.quality = quality::QualityConfig::load(*cfg.quality_config);
  if (cfg.blacklist_dir) res.blacklist.load_directory(*cfg.blacklist_dir);
  if (cfg.tokenizer) res.tokenizer = bpe::TokenizerModel::load(*cfg.tokenizer);

  struct Loaded {
    DatasetManifest manifest;
    fs::path dir;
    DatasetRole role;
    std::vector<Stage> stages;
  };
  std::vector<Loaded> loaded;
  std::vector<Document> eval_docs;
  for (const auto& spec : cfg.datasets) {
    Loaded l{load_manifest(spec.manifest), spec.manifest.parent_path(), {}, {}};
    l.role = spec.role.value_or(l.manifest.role);
    l.stages = cfg.stages_for(l.role, spec);
    if (l.role == DatasetRole::eval)
      for (const auto& s : l.manifest.shards)
        for (auto& d : load_docs(resolve(l.dir, s.path), s.lang)) eval_docs.push_back(std::move(d));
    loaded.push_back(std::move(l));
  }
  if (cfg.dedup_mode == DedupMode::minhash) {
    res.minhash_index = dedup::build_minhash_index(eval_docs, cfg.shingle_width, cfg.seed);
  } else {
    res.exact_index = dedup::build_eval_index(eval_docs, cfg.shingle_width, cfg.seed);
  }

  fs::create_directories(cfg.output_dir);
  std::vector<PipelineReport> reports;
  const std::string tokenizer_id = res.tokenizer ? res.tokenizer->fingerprint() : "";
  try {
    for (const auto& l : loaded) {
      if (l.role == DatasetRole::eval) continue;
      PipelineReport report;
      report.dataset = l.manifest.name;
      reports.push_back(report);

      std::vector<Item> items;
      std::vector<std::string> shard_lang;
      for (std::size_t si = 0; si < l.manifest.shards.size(); ++si) {
        const auto& s = l.manifest.shards[si];
        shard_lang.push_back(s.lang);
        const auto path = resolve(l.dir, s.path);
        if (l.role == DatasetRole::sft) {
          for (auto& smp : load_samples(path)) {
            Item it;
            it.doc.id = smp.id;
            it.doc.lang = smp.lang;
            it.doc.source = l.manifest.name;
            it.doc.text = sft_text(smp);
            it.sample = std::move(smp);
            it.shard = si;
            items.push_back(std::move(it));
          }
        } else {
          for (auto& d : load_docs(path, s.lang)) items.push_back({std::move(d), std::nullopt, si, true});
        }
      }
      std::vector<std::vector<std::size_t>> by_shard(l.manifest.shards.size());
      for (std::size_t i = 0; i < items.size(); ++i) by_shard[items[i].shard].push_back(i);

      for (auto stage : l.stages) {
        std::vector<std::optional<FilterVerdict>> verdicts(items.size());
        if (stage == Stage::dedup) {
          // Sequential within a language, languages in parallel.
          std::map<std::string, std::vector<std::size_t>> groups;
          for (std::size_t i = 0; i < items.size(); ++i)
            if (items[i].alive) groups[items[i].doc.lang].push_back(i);
          std::vector<const std::vector<std::size_t>*> glist;
          for (const auto& [_, g] : groups) glist.push_back(&g);
          parallel_for(glist.size(), cfg.workers, [&](std::size_t gi) {
            dedup::LineParagraphDeduplicator dd(cfg.overlap, cfg.seed);
            for (auto i : *glist[gi]) verdicts[i] = dd.offer(items[i].doc);
          });
        } else {
          parallel_for(by_shard.size(), cfg.workers, [&](std::size_t si) {
            for (auto i : by_shard[si]) {
              if (!items[i].alive) continue;
              verdicts[i] = apply_stage(stage, items[i], shard_lang[si], cfg, res);
            }
          });
        }
        auto& sr = reports.back().stage(stage);
        for (std::size_t i = 0; i < items.size(); ++i) {
          if (!verdicts[i]) continue;
          auto v = *verdicts[i];
          v.stage = stage;
          sr.record(items[i].doc.lang, v);
          if (!v.keep) {
            items[i].alive = false;
            if (cfg.verbose) log_drop(log, l.manifest.name, items[i], v);
          }
        }
      }

      DatasetManifest out;
      out.name = l.manifest.name;
      out.role = l.role;
      out.tokenizer_id = tokenizer_id;
      const auto dir = cfg.output_dir / l.manifest.name;
      fs::create_directories(dir);
      std::optional<bpe::CachedEncoder> enc;
      if (res.tokenizer) enc.emplace(*res.tokenizer);
      for (std::size_t si = 0; si < by_shard.size(); ++si) {
        char name[32];
        std::snprintf(name, sizeof name, "part-%05zu.jsonl", si);
        ShardEntry entry;
        if (l.role == DatasetRole::sft) {
          std::string data;
          std::set<std::string> langs;
          for (auto i : by_shard[si]) {
            if (!items[i].alive) continue;
            data += sft_output_line(items[i], res) + "\n";
            ++entry.documents;
            entry.words += text::count_words(items[i].doc.text);
            if (res.tokenizer) entry.tokens += sft::wrap_tokenized(*items[i].sample, *res.tokenizer).token_count;
            langs.insert(items[i].doc.lang);
          }
          write_text(dir / name, data);
          entry.lang = langs.size() == 1 ? *langs.begin() : langs.empty() ? shard_lang[si] : "mixed";
        } else {
          std::vector<Document> kept;
          for (auto i : by_shard[si])
            if (items[i].alive) kept.push_back(items[i].doc);
          TokenCounter counter;
          if (enc) counter = [&](std::string_view t) { return static_cast<std::uint64_t>(enc->count_tokens(t)); };
          entry = write_records(kept, dir / name, counter);
          if (kept.empty()) entry.lang = shard_lang[si];
        }
        entry.path = name;
        out.shards.push_back(entry);
      }
      save_manifest(out, dir / "manifest.json");
    }
  } catch (const std::exception& e) {
    write_text(cfg.output_dir / "report.json", report_document(reports, cfg, e.what()));
    throw PipelineFailure(e.what(), reports);
  }
  write_text(cfg.output_dir / "report.json", report_document(reports, cfg, ""));
  return reports;
}

}  // namespace corpuskit::pipeline
