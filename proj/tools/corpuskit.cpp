// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front-end. Every subcommand wraps one library operation,
// writes structured output to --out (or stdout) and reports failures as a
// one-line JSON object on stderr with a nonzero exit code.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "corpuskit/bpe.hpp"
#include "corpuskit/corpus.hpp"
#include "corpuskit/dedup.hpp"
#include "corpuskit/fixture.hpp"
#include "corpuskit/lang_id.hpp"
#include "corpuskit/lr_schedule.hpp"
#include "corpuskit/mixtures.hpp"
#include "corpuskit/pipeline.hpp"
#include "corpuskit/scaling_law.hpp"
#include "corpuskit/scoring.hpp"
#include "corpuskit/sft.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace corpuskit;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& out_path, const std::string& data) {
  if (out_path.empty() || out_path == "-") {
    std::cout << data;
    if (!data.empty() && data.back() != '\n') std::cout << '\n';
    return;
  }
  const fs::path p(out_path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + out_path);
  out << data;
  if (!data.empty() && data.back() != '\n') out << '\n';
}

std::vector<Document> read_all(const std::vector<std::string>& paths) {
  std::vector<Document> docs;
  for (const auto& p : paths) {
    auto r = read_records(p);
    if (!r.errors.empty())
      throw Error(p + ":" + std::to_string(r.errors.front().line) + ": " + r.errors.front().message);
    for (auto& d : r.documents) docs.push_back(std::move(d));
  }
  return docs;
}

std::string docs_to_lines(const std::vector<Document>& docs) {
  std::string out;
  for (const auto& d : docs) out += record_to_line(d) + "\n";
  return out;
}

std::string verdict_json(const std::string& id, const FilterVerdict& v) {
  json j = {{"id", id}, {"keep", v.keep}, {"stage", std::string(to_string(v.stage))}, {"value", v.value}};
  if (!v.keep) {
    j["rule"] = v.rule;
    j["threshold"] = v.threshold;
  }
  return j.dump();
}

LanguageDistribution load_distribution(const fs::path& p) {
  const json j = json::parse(slurp(p));
  // Accept either a plain {lang: weight} object or a dataset manifest.
  if (j.contains("shards")) {
    const auto m = load_manifest(p);
    const auto stats = corpus_stats(m);
    return stats.total.tokens > 0 ? stats.distribution : corpus_stats(m, CountBasis::words).distribution;
  }
  return LanguageDistribution(j.get<std::map<std::string, double>>()).normalized();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corpuskit: multilingual corpus cleaning, tokenizer and training-recipe toolkit"};
  app.require_subcommand(1);

  // clean -------------------------------------------------------------------
  auto* clean = app.add_subcommand("clean", "Run the cleaning pipeline described by a config file");
  std::string clean_config;
  int clean_workers = 0;
  bool clean_verbose = false;
  clean->add_option("--config", clean_config, "Pipeline config (JSON)")->required()->check(CLI::ExistingFile);
  clean->add_option("--workers", clean_workers, "Override worker count");
  clean->add_flag("--verbose", clean_verbose, "Log one JSON event per dropped document to stderr");

  // dedup -------------------------------------------------------------------
  auto* dd = app.add_subcommand("dedup", "Line/paragraph dedup or train/eval Jaccard dedup of a record file");
  std::vector<std::string> dd_in, dd_eval;
  std::string dd_out, dd_verdicts, dd_index, dd_save_index, dd_mode = "exact";
  int dd_n = dedup::kDefaultShingleWidth;
  double dd_threshold = dedup::kDefaultJaccardThreshold;
  bool dd_within = false;
  double dd_line = 0.5, dd_para = 0.5;
  std::uint64_t dd_seed = dedup::kDefaultSeed;
  dd->add_option("--in", dd_in, "Input record files")->check(CLI::ExistingFile);
  dd->add_option("--out", dd_out, "Kept records (default stdout)");
  dd->add_option("--verdicts", dd_verdicts, "Per-document verdicts (JSON lines)");
  dd->add_option("--eval", dd_eval, "Evaluation record files to index")->check(CLI::ExistingFile);
  dd->add_option("--index", dd_index, "Prebuilt exact eval index")->check(CLI::ExistingFile);
  dd->add_option("--save-index", dd_save_index, "Write the exact eval index built from --eval");
  dd->add_option("--mode", dd_mode, "exact | minhash")->check(CLI::IsMember({"exact", "minhash"}));
  dd->add_option("--n", dd_n, "Shingle width in words");
  dd->add_option("--threshold", dd_threshold, "Jaccard drop threshold");
  dd->add_option("--seed", dd_seed, "Shingle hash seed");
  dd->add_flag("--within", dd_within, "Line/paragraph dedup within the input instead of eval dedup");
  dd->add_option("--max-line-overlap", dd_line, "Line overlap threshold for --within");
  dd->add_option("--max-paragraph-overlap", dd_para, "Paragraph overlap threshold for --within");

  // tokenizer-train -----------------------------------------------------------
  auto* tt = app.add_subcommand("tokenizer-train", "Train a byte-level BPE tokenizer");
  std::vector<std::string> tt_in, tt_specials;
  std::string tt_out;
  std::size_t tt_vocab = 0;
  bool tt_unaligned = false, tt_sft = false, tt_no_nfc = false;
  tt->add_option("--in", tt_in, "Training record files")->required()->check(CLI::ExistingFile);
  tt->add_option("--out", tt_out, "Output directory")->required();
  tt->add_option("--vocab-size", tt_vocab, "Exact vocabulary size (multiple of 8)")->required();
  tt->add_option("--special", tt_specials, "Special token (repeatable)");
  tt->add_flag("--sft-markers", tt_sft, "Register the four SFT template markers as specials");
  tt->add_flag("--allow-unaligned-vocab", tt_unaligned, "Permit sizes not divisible by 8");
  tt->add_flag("--no-nfc", tt_no_nfc, "Skip NFC normalization of training text");

  // tokenizer-eval ------------------------------------------------------------
  auto* te = app.add_subcommand("tokenizer-eval", "Per-language NSL report for a tokenizer");
  std::string te_model, te_out, te_sizes;
  std::vector<std::string> te_in;
  te->add_option("--model", te_model, "Tokenizer directory")->required()->check(CLI::ExistingDirectory);
  te->add_option("--in", te_in, "Evaluation record files (grouped by document lang)")
      ->required()
      ->check(CLI::ExistingFile);
  te->add_option("--sizes", te_sizes, "JSON {lang: size} for the weighted average")->check(CLI::ExistingFile);
  te->add_option("--out", te_out, "Report path (default stdout)");

  // mixture -------------------------------------------------------------------
  auto* mx = app.add_subcommand("mixture", "Solve a language mixture or build a sampling plan");
  std::string mx_source, mx_kind = "balanced", mx_spec, mx_hq, mx_out, mx_target;
  std::vector<std::string> mx_manifests;
  double mx_hq_share = 0.3;
  std::uint64_t mx_total = 0, mx_seed = mixtures::kDefaultPlanSeed;
  bool mx_repeat = false;
  mx->add_option("--source", mx_source, "Source distribution JSON or dataset manifest")->check(CLI::ExistingFile);
  mx->add_option("--kind", mx_kind, "balanced | intermediate | original | train | equal | decay");
  mx->add_option("--spec", mx_spec, "Mixture spec JSON (overrides --kind)")->check(CLI::ExistingFile);
  mx->add_option("--hq", mx_hq, "High-quality distribution for --kind decay")->check(CLI::ExistingFile);
  mx->add_option("--hq-share", mx_hq_share, "HQ share for --kind decay");
  mx->add_option("--plan-manifest", mx_manifests, "Dataset manifests for a sampling plan")
      ->check(CLI::ExistingFile);
  mx->add_option("--target", mx_target, "Cell weights JSON [[dataset, lang, weight], ...] for the plan")
      ->check(CLI::ExistingFile);
  mx->add_option("--total-tokens", mx_total, "Plan size in tokens");
  mx->add_flag("--allow-repetition", mx_repeat, "Upsample cells whose budget exceeds availability");
  mx->add_option("--seed", mx_seed, "Plan seed");
  mx->add_option("--out", mx_out, "Output path (default stdout)");

  // scaling-fit ---------------------------------------------------------------
  auto* sf = app.add_subcommand("scaling-fit", "Fit L(N,D) = L_inf + A_N N^-alpha + A_D D^-beta");
  std::string sf_obs, sf_out;
  int sf_evals = 30000, sf_starts = 8;
  unsigned sf_seed = 2026;
  double sf_curve_n = 0.0, sf_dmin = 1e9, sf_dmax = 1e12;
  int sf_points = 50;
  sf->add_option("--obs", sf_obs, "Observations: N, D, loss per line")->required()->check(CLI::ExistingFile);
  sf->add_option("--max-evals", sf_evals, "Function evaluation budget");
  sf->add_option("--starts", sf_starts, "Number of optimizer starts");
  sf->add_option("--seed", sf_seed, "Seed for start jitter");
  sf->add_option("--curve-n", sf_curve_n, "Emit a predicted curve at this N");
  sf->add_option("--curve-d-min", sf_dmin, "Curve start D");
  sf->add_option("--curve-d-max", sf_dmax, "Curve end D");
  sf->add_option("--curve-points", sf_points, "Curve samples (log-spaced)");
  sf->add_option("--out", sf_out, "Result path (default stdout)");

  // schedule ------------------------------------------------------------------
  auto* sc = app.add_subcommand("schedule", "Emit a warmup-stable-decay learning-rate curve");
  std::string sc_config, sc_out;
  std::int64_t sc_stride = 1000;
  std::int64_t sc_step = -1;
  sc->add_option("--config", sc_config, "WSD config JSON")->required()->check(CLI::ExistingFile);
  sc->add_option("--stride", sc_stride, "Sampling stride in steps");
  sc->add_option("--at", sc_step, "Print the learning rate at one step instead");
  sc->add_option("--out", sc_out, "TSV path (default stdout)");

  // sft-prepare ---------------------------------------------------------------
  auto* sp = app.add_subcommand("sft-prepare", "Filter and wrap instruction samples");
  std::string sp_in, sp_out, sp_tok, sp_langid, sp_verdicts;
  std::size_t sp_max_len = 2048, sp_min_instr = sft::kDefaultMinInstructionWords,
              sp_min_resp = sft::kDefaultMinResponseWords;
  double sp_conf = lang_id::kDefaultMinConfidence;
  bool sp_spaced = false;
  sp->add_option("--in", sp_in, "Sample records (instruction/input/response/lang)")
      ->required()
      ->check(CLI::ExistingFile);
  sp->add_option("--out", sp_out, "Wrapped records (default stdout)");
  sp->add_option("--verdicts", sp_verdicts, "Per-sample verdicts (JSON lines)");
  sp->add_option("--tokenizer", sp_tok, "Tokenizer directory; enables the length filter")
      ->check(CLI::ExistingDirectory);
  sp->add_option("--max-len", sp_max_len, "Maximum wrapped length in tokens");
  sp->add_option("--min-instruction-words", sp_min_instr, "Short-instruction bound");
  sp->add_option("--min-response-words", sp_min_resp, "Short-response bound");
  sp->add_option("--langid-model", sp_langid, "Classifier; enables the language-match filter")
      ->check(CLI::ExistingFile);
  sp->add_option("--min-confidence", sp_conf, "Language-match confidence bound");
  sp->add_flag("--spaced-markers", sp_spaced, "Surround instruction and response with single spaces");

  // score ---------------------------------------------------------------------
  auto* so = app.add_subcommand("score", "Fuzzy-match accuracy of model outputs against gold answers");
  std::string so_in, so_out;
  bool so_no_fold = false, so_keep_punct = false, so_keep_ws = false, so_substring = false;
  so->add_option("--in", so_in, "TSV (output, gold[, lang]) or .jsonl")->required()->check(CLI::ExistingFile);
  so->add_flag("--no-case-fold", so_no_fold, "Compare case-sensitively");
  so->add_flag("--keep-punct", so_keep_punct, "Do not map punctuation and symbols to spaces");
  so->add_flag("--keep-whitespace", so_keep_ws, "Do not collapse whitespace");
  so->add_flag("--substring", so_substring, "Raw substring match instead of token boundaries");
  so->add_option("--out", so_out, "Report path (default stdout)");

  // stats ---------------------------------------------------------------------
  auto* st = app.add_subcommand("stats", "Language distribution of a dataset manifest");
  std::string st_manifest, st_basis = "tokens", st_out;
  st->add_option("--manifest", st_manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  st->add_option("--basis", st_basis, "tokens | words | documents")
      ->check(CLI::IsMember({"tokens", "words", "documents"}));
  st->add_option("--out", st_out, "Output path (default stdout)");

  // langid-train ----------------------------------------------------------------
  auto* lt = app.add_subcommand("langid-train", "Train the character n-gram language classifier");
  std::vector<std::string> lt_in;
  std::string lt_out;
  double lt_smoothing = 0.5;
  lt->add_option("--in", lt_in, "Labeled record files (document lang is the label)")
      ->required()
      ->check(CLI::ExistingFile);
  lt->add_option("--out", lt_out, "Model path")->required();
  lt->add_option("--smoothing", lt_smoothing, "Additive smoothing");

  // make-fixture ----------------------------------------------------------------
  auto* mf = app.add_subcommand("make-fixture", "Write a synthetic multilingual corpus with a manifest");
  std::string mf_out, mf_name = "fixture", mf_role = "high_quality";
  std::size_t mf_bytes = 20000;
  std::uint64_t mf_seed = 1;
  std::vector<std::string> mf_langs;
  mf->add_option("--out", mf_out, "Output directory")->required();
  mf->add_option("--name", mf_name, "Dataset name");
  mf->add_option("--role", mf_role, "Dataset role");
  mf->add_option("--bytes-per-lang", mf_bytes, "Approximate text bytes per language");
  mf->add_option("--lang", mf_langs, "Languages (default: all 13)");
  mf->add_option("--seed", mf_seed, "Generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", e.what()}, {"kind", "usage"}}.dump() << "\n";
    return 2;
  }

  try {
    if (*clean) {
      auto cfg = pipeline::PipelineConfig::load(clean_config);
      if (clean_workers > 0) cfg.workers = clean_workers;
      if (clean_verbose) cfg.verbose = true;
      const auto reports = pipeline::run_pipeline(cfg, &std::cerr);
      std::cout << (cfg.output_dir / "report.json").string() << "\n";
    } else if (*dd) {
      const auto docs = read_all(dd_in);
      std::vector<FilterVerdict> verdicts;
      if (dd_within) {
        verdicts = dedup::line_paragraph_dedup(docs, {dd_line, dd_para}, dd_seed);
      } else if (dd_mode == "minhash") {
        if (dd_eval.empty()) throw Error("dedup: --mode minhash needs --eval");
        const auto idx = dedup::build_minhash_index(read_all(dd_eval), dd_n, dd_seed);
        for (const auto& d : docs) verdicts.push_back(dedup::eval_dedup(d, idx, dd_threshold));
      } else {
        dedup::EvalIndex idx;
        if (!dd_index.empty()) {
          idx = dedup::EvalIndex::load(dd_index);
        } else if (!dd_eval.empty()) {
          idx = dedup::build_eval_index(read_all(dd_eval), dd_n, dd_seed);
        } else {
          throw Error("dedup: eval mode needs --eval or --index");
        }
        if (!dd_save_index.empty()) idx.save(dd_save_index);
        for (const auto& d : docs) verdicts.push_back(dedup::eval_dedup(d, idx, dd_threshold));
      }
      std::vector<Document> kept;
      std::string vlines;
      for (std::size_t i = 0; i < docs.size(); ++i) {
        if (verdicts[i].keep) kept.push_back(docs[i]);
        vlines += verdict_json(docs[i].id, verdicts[i]) + "\n";
      }
      if (!dd_verdicts.empty()) emit(dd_verdicts, vlines);
      if (!dd_in.empty()) emit(dd_out, docs_to_lines(kept));
    } else if (*tt) {
      bpe::TrainOptions opts;
      opts.vocab_size = tt_vocab;
      if (tt_sft) opts.specials = sft::WrapTemplate{}.markers();
      for (const auto& s : tt_specials) opts.specials.push_back(s);
      opts.allow_unaligned_vocab = tt_unaligned;
      opts.normalize_nfc = !tt_no_nfc;
      const auto model = bpe::train_bpe(read_all(tt_in), opts);
      model.save(tt_out);
      std::cout << json{{"model", tt_out},
                        {"vocab_size", model.vocab_size()},
                        {"merges", model.merges().size()},
                        {"reserved", model.reserved_count()},
                        {"fingerprint", model.fingerprint()}}
                       .dump()
                << "\n";
    } else if (*te) {
      const auto model = bpe::TokenizerModel::load(te_model);
      std::map<std::string, std::vector<Document>> by_lang;
      for (auto& d : read_all(te_in)) by_lang[d.lang].push_back(std::move(d));
      std::optional<std::map<std::string, double>> sizes;
      if (!te_sizes.empty()) sizes = json::parse(slurp(te_sizes)).get<std::map<std::string, double>>();
      emit(te_out, bpe::nsl_report(model, by_lang, sizes).to_json());
    } else if (*mx) {
      if (!mx_manifests.empty() || !mx_target.empty()) {
        if (mx_target.empty() || mx_manifests.empty()) throw Error("mixture: a plan needs --plan-manifest and --target");
        std::vector<DatasetManifest> ms;
        for (const auto& m : mx_manifests) ms.push_back(load_manifest(m));
        mixtures::CellWeights target;
        for (const auto& row : json::parse(slurp(mx_target)))
          target[{row.at(0).get<std::string>(), row.at(1).get<std::string>()}] = row.at(2).get<double>();
        const auto plan = mixtures::build_plan(ms, target, mx_total, mx_repeat, mx_seed);
        std::cerr << plan.table();
        for (const auto& w : plan.warnings) std::cerr << json{{"warning", w}}.dump() << "\n";
        emit(mx_out, plan.to_json());
      } else {
        if (mx_source.empty()) throw Error("mixture: --source is required");
        auto spec = mx_spec.empty() ? mixtures::MixtureSpec::preset(mixtures::kind_from_string(mx_kind))
                                    : mixtures::MixtureSpec::from_json(slurp(mx_spec));
        const auto source = load_distribution(mx_source);
        if (spec.kind == mixtures::MixtureKind::decay) {
          if (mx_hq.empty()) throw Error("mixture: --kind decay needs --hq");
          const auto cells = mixtures::decay_mixture(source, load_distribution(mx_hq), mx_hq_share);
          json rows = json::array();
          for (const auto& [cell, w] : cells) rows.push_back({cell.first, cell.second, w});
          emit(mx_out, rows.dump(2));
        } else {
          emit(mx_out, mixtures::distribution_to_json(mixtures::solve_distribution(source, spec)));
        }
      }
    } else if (*sf) {
      const auto obs = scaling::read_observations(sf_obs);
      scaling::FitOptions<double> opts;
      opts.max_evals = sf_evals;
      opts.starts = sf_starts;
      opts.seed = sf_seed;
      const auto fit = scaling::fit(obs, scaling::ParamBounds<double>{}, opts);
      std::vector<std::pair<double, double>> curve;
      if (sf_curve_n > 0.0) {
        if (sf_points < 1 || !(sf_dmin > 0.0) || sf_dmax < sf_dmin) throw Error("scaling-fit: bad curve range");
        std::vector<double> grid;
        for (int i = 0; i < sf_points; ++i) {
          const double t = sf_points == 1 ? 0.0 : static_cast<double>(i) / (sf_points - 1);
          grid.push_back(sf_dmin * std::pow(sf_dmax / sf_dmin, t));
        }
        curve = scaling::predict_curve(fit.params, sf_curve_n, grid);
      }
      emit(sf_out, scaling::fit_to_json(fit, obs, curve, sf_curve_n));
    } else if (*sc) {
      const auto cfg = schedule::WsdConfig::from_json(slurp(sc_config));
      if (sc_step >= 0) {
        char buf[512];  // fixed notation of any double fits
        const double lr = schedule::lr_at(cfg, sc_step);
        const auto res = std::to_chars(buf, buf + sizeof buf, lr, std::chars_format::fixed);
        emit(sc_out, std::string(buf, res.ptr) + "\n");
      } else {
        emit(sc_out, schedule::schedule_to_tsv(schedule::emit_schedule(cfg, sc_stride)));
      }
    } else if (*sp) {
      sft::WrapTemplate tpl;
      tpl.spaced_markers = sp_spaced;
      std::optional<bpe::TokenizerModel> tok;
      if (!sp_tok.empty()) tok = bpe::TokenizerModel::load(sp_tok);
      std::optional<lang_id::LangClassifier> clf;
      if (!sp_langid.empty()) clf = lang_id::LangClassifier::load(sp_langid);
      std::ifstream in(sp_in, std::ios::binary);
      std::string line, out, vlines;
      std::size_t lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto s = sft::sample_from_line(line);
        if (s.id.empty()) s.id = std::to_string(lineno);
        std::vector<FilterVerdict> checks = {sft::short_filter(s, sp_min_instr, sp_min_resp)};
        if (clf) checks.push_back(sft::lang_match_filter(s, *clf, sp_conf));
        if (tok) checks.push_back(sft::length_filter(s, *tok, sp_max_len, tpl));
        FilterVerdict verdict = checks.back();
        for (const auto& v : checks)
          if (!v.keep) {
            verdict = v;
            break;
          }
        vlines += verdict_json(s.id, verdict) + "\n";
        if (!verdict.keep) continue;
        json j = json::parse(sft::sample_to_line(s));
        if (tok) {
          const auto w = sft::wrap_tokenized(s, *tok, tpl);
          j["text"] = w.text;
          j["tokens"] = w.token_count;
          j["response_start"] = w.response_start;
        } else {
          j["text"] = sft::wrap(s, tpl);
        }
        out += j.dump() + "\n";
      }
      if (!sp_verdicts.empty()) emit(sp_verdicts, vlines);
      emit(sp_out, out);
    } else if (*so) {
      scoring::MatchPolicy policy;
      policy.case_fold = !so_no_fold;
      policy.strip_punct = !so_keep_punct;
      policy.collapse_whitespace = !so_keep_ws;
      policy.token_boundary = !so_substring;
      emit(so_out, scoring::score(scoring::read_items(so_in), policy).to_json());
    } else if (*st) {
      const auto basis = st_basis == "words"       ? CountBasis::words
                         : st_basis == "documents" ? CountBasis::documents
                                                   : CountBasis::tokens;
      const auto stats = corpus_stats(load_manifest(st_manifest), basis);
      json j;
      j["basis"] = st_basis;
      j["distribution"] = stats.distribution.weights();
      for (const auto& [lang, c] : stats.per_language)
        j["per_language"][lang] = {{"documents", c.documents}, {"words", c.words}, {"tokens", c.tokens}};
      j["total"] = {{"documents", stats.total.documents}, {"words", stats.total.words}, {"tokens", stats.total.tokens}};
      emit(st_out, j.dump(2));
    } else if (*lt) {
      std::vector<std::pair<std::string, std::string>> labeled;
      for (auto& d : read_all(lt_in)) labeled.emplace_back(std::move(d.text), d.lang);
      lang_id::train_classifier(labeled, {}, lt_smoothing).save(lt_out);
      std::cout << json{{"model", lt_out}}.dump() << "\n";
    } else if (*mf) {
      const fixture::TextGenerator gen;
      const auto langs = mf_langs.empty() ? fixture::languages() : mf_langs;
      DatasetManifest m;
      m.name = mf_name;
      m.role = role_from_string(mf_role);
      for (const auto& lang : langs) {
        const auto docs = gen.corpus(lang, mf_bytes, mf_seed, mf_name + "-");
        auto entry = write_records(docs, fs::path(mf_out) / (lang + ".jsonl"));
        entry.path = lang + ".jsonl";
        m.shards.push_back(entry);
      }
      save_manifest(m, fs::path(mf_out) / "manifest.json");
      std::cout << (fs::path(mf_out) / "manifest.json").string() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}, {"kind", "runtime"}}.dump() << "\n";
    return 1;
  }
  return 0;
}
