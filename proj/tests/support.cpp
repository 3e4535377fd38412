// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#include "support.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include "corpuskit/hash.hpp"
#include "corpuskit/text.hpp"

namespace fs = std::filesystem;

namespace corpuskit::testing {

TempDir::TempDir(const std::string& tag) {
  static std::uint64_t counter = 0;
  const auto base = fs::temp_directory_path();
  for (;;) {
    const auto name = "corpuskit-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
    path_ = base / name;
    if (fs::create_directories(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string random_unicode(Rng& rng, std::size_t max_code_points) {
  static const std::vector<std::pair<char32_t, char32_t>> ranges = {
      {0x20, 0x7e},        // ASCII printable
      {0x20, 0x20},        // extra weight on plain spaces
      {0x61, 0x7a},        // lowercase ASCII
      {0xc0, 0xff},        // Latin-1 letters
      {0x100, 0x17f},      // Latin Extended-A (Czech, Polish)
      {0x300, 0x36f},      // combining diacritics
      {0x391, 0x3c9},      // Greek
      {0x410, 0x44f},      // Cyrillic
      {0x4e00, 0x4fff},    // CJK
      {0x2000, 0x206f},    // general punctuation, odd spaces, ZWJ
      {0x1f300, 0x1f64f},  // emoji
  };
  static const char32_t controls[] = {U'\n', U'\t', U'\r', U' ', U'\u200D', U'\uFEFF'};
  std::string out;
  const std::size_t n = rng.below(max_code_points + 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.uniform() < 0.05) {
      text::append_utf8(out, controls[rng.below(std::size(controls))]);
      continue;
    }
    const auto& [lo, hi] = ranges[rng.below(ranges.size())];
    text::append_utf8(out, lo + static_cast<char32_t>(rng.below(hi - lo + 1)));
  }
  return out;
}

double oracle_jaccard(const std::string& a, const std::string& b, int n) {
  auto grams = [n](const std::string& t) {
    const auto w = text::normalized_words(t);
    std::set<std::vector<std::string>> out;
    const auto width = static_cast<std::size_t>(n);
    if (w.empty()) return out;
    if (w.size() < width) {
      out.insert(w);
      return out;
    }
    for (std::size_t i = 0; i + width <= w.size(); ++i) out.insert({w.begin() + i, w.begin() + i + width});
    return out;
  };
  const auto A = grams(a);
  const auto B = grams(b);
  if (A.empty() && B.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& g : A) inter += B.count(g);
  return static_cast<double>(inter) / static_cast<double>(A.size() + B.size() - inter);
}

lang_id::LangClassifier fixture_classifier(const std::vector<std::string>& langs, std::size_t bytes_per_lang) {
  const fixture::TextGenerator gen;
  std::vector<std::pair<std::string, std::string>> labeled;
  for (const auto& l : langs)
    for (auto& d : gen.corpus(l, bytes_per_lang, 0x1d7a11, "lid-")) labeled.emplace_back(std::move(d.text), l);
  return lang_id::train_classifier(labeled);
}

namespace {

std::string sentences_as_lines(const fixture::TextGenerator& gen, Rng& rng, std::size_t n, const std::string& prefix,
                               const std::string& suffix) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += "\n";
    auto s = gen.sentence("en", rng);
    s.pop_back();  // drop the terminal punctuation
    out += prefix + s + suffix;
  }
  return out;
}

std::string long_english(const fixture::TextGenerator& gen, Rng& rng) {
  for (;;) {
    auto t = gen.document("en", rng, 3);
    if (text::count_words(t) >= 70) return t;
  }
}

}  // namespace

CleaningCorpus cleaning_corpus() {
  const fixture::TextGenerator gen;
  Rng rng(0xc1ea);
  CleaningCorpus c;
  c.blacklist_terms = {"online casino", "payday loan", "free spins"};

  std::vector<CleaningCase> clean;
  for (int i = 0; i < 80; ++i) {
    CleaningCase k;
    k.doc.id = "clean-" + std::to_string(i);
    k.doc.lang = "en";
    k.doc.text = long_english(gen, rng);
    clean.push_back(std::move(k));
  }
  for (int i = 0; i < 3; ++i) {
    Document e;
    e.id = "eval-" + std::to_string(i);
    e.lang = "en";
    e.text = long_english(gen, rng);
    c.eval.push_back(std::move(e));
  }

  std::vector<CleaningCase> bad;
  auto add = [&](std::string text, Stage stage, std::string rule) {
    CleaningCase k;
    k.doc.id = "bad-" + std::to_string(bad.size()) + "-" + rule;
    k.doc.lang = "en";
    k.doc.text = std::move(text);
    k.clean = false;
    k.stage = stage;
    k.rule = std::move(rule);
    bad.push_back(std::move(k));
  };

  // Wrong language under an English label.
  for (const char* l : {"de", "fi", "el"}) add(gen.document(l, rng, 3), Stage::lang_id, "lang_mismatch");

  // Gopher-style heuristics.
  add(gen.sentence("en", rng), Stage::heuristic, "min_words");
  {
    static const char* tiny[] = {"a",  "an", "as", "at", "be", "by", "do", "go", "he", "if", "in", "is",
                                 "it", "me", "my", "no", "of", "on", "or", "so", "to", "up", "us", "we"};
    std::string t;
    for (int i = 0; i < 70; ++i) t += (i ? " " : "") + std::string(tiny[rng.below(std::size(tiny))]);
    add(t + ".", Stage::heuristic, "mean_word_length");
  }
  add(sentences_as_lines(gen, rng, 10, "- ", ""), Stage::heuristic, "bullet_lines");
  {
    const auto source = long_english(gen, rng);
    const auto words = text::split_words(source);
    std::string t;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i) t += " ";
      t += i % 3 == 1 ? std::to_string(1000 + i) : std::string(words[i]);
    }
    add(t, Stage::heuristic, "alpha_words");
  }

  // Repetition.
  {
    const auto a = gen.sentence("en", rng);
    const auto b = gen.sentence("en", rng);
    std::string t;
    for (int i = 0; i < 4; ++i) t += a + "\n" + b + "\n";
    t += sentences_as_lines(gen, rng, 2, "", ".");
    add(t, Stage::repetition, "dup_line");
  }
  {
    const auto p = gen.sentence("en", rng);
    const auto q = sentences_as_lines(gen, rng, 10, "", ".");
    add(p + "\n\n" + p + "\n\n" + q, Stage::repetition, "dup_paragraph");
  }
  {
    std::string t;
    for (int i = 0; i < 12; ++i) {
      auto s = gen.sentence("en", rng);
      s.pop_back();
      t += (i ? " " : "") + s + " green apples and green apples.";
    }
    add(t, Stage::repetition, "top_2gram");
  }
  {
    const std::string phrase = "quarterly harvest reports describe wheat barley rye oats millet sorghum";
    std::string t;
    for (int i = 0; i < 6; ++i) {
      t += (i ? " " : "") + gen.paragraph("en", rng);
      t += " " + phrase + ".";
    }
    add(t, Stage::repetition, "dup_5gram");
  }

  // Blacklisted terms inside otherwise clean text.
  for (const auto& term : c.blacklist_terms) {
    auto t = long_english(gen, rng);
    const auto cut = t.find(". ") + 2;
    t.insert(cut, "Try the " + term + " today. ");
    add(t, Stage::blacklist, "blacklist_terms");
  }

  // Exact copies of earlier clean documents.
  for (int i = 0; i < 3; ++i) add(clean[static_cast<std::size_t>(i)].doc.text, Stage::dedup, "line_overlap");

  // Copies of evaluation documents.
  for (const auto& e : c.eval) add(e.text, Stage::eval_dedup, "jaccard");

  // Interleave: every fifth document is a violation, and the copies come
  // last so their originals precede them.
  std::size_t ci = 0, bi = 0;
  for (std::size_t pos = 0; pos < 100; ++pos) {
    if (pos % 5 == 4)
      c.cases.push_back(bad[bi++]);
    else
      c.cases.push_back(clean[ci++]);
  }
  return c;
}

std::vector<SftGolden> sft_goldens() {
  using sft::AnswerFormat;
  auto make = [](std::string id, std::string instr, std::optional<std::string> input, std::string resp,
                 std::string lang, AnswerFormat f, std::string wrapped) {
    SftGolden g;
    g.sample.id = std::move(id);
    g.sample.instruction = std::move(instr);
    g.sample.input = std::move(input);
    g.sample.response = std::move(resp);
    g.sample.lang = lang;
    g.sample.instruction_lang = lang;
    g.sample.answer_format = f;
    g.wrapped = std::move(wrapped);
    return g;
  };
  const auto F = AnswerFormat::full_answer;
  return {
      make("g0", "Translate to Greek: hello", std::nullopt, "γεια", "el", F,
           "<|start_of_sequence|><|im_start|>Translate to Greek: hello<|im_end|>γεια<|end_of_sequence|>"),
      make("g1", "Summarize the following text.", "The cat sat on the mat all afternoon.", "A cat rested.", "en", F,
           "<|start_of_sequence|><|im_start|>Summarize the following text.\nThe cat sat on the mat all "
           "afternoon.<|im_end|>A cat rested.<|end_of_sequence|>"),
      make("g2", "Wie heißt die Hauptstadt von Deutschland?", std::nullopt, "Die Hauptstadt ist Berlin.", "de", F,
           "<|start_of_sequence|><|im_start|>Wie heißt die Hauptstadt von Deutschland?<|im_end|>Die Hauptstadt ist "
           "Berlin.<|end_of_sequence|>"),
      make("g3", "Which one is a fruit? (A) car (B) apple (C) stone", std::nullopt, "(B)", "en", AnswerFormat::letter,
           "<|start_of_sequence|><|im_start|>Which one is a fruit? (A) car (B) apple (C) "
           "stone<|im_end|>(B)<|end_of_sequence|>"),
      make("g4", "Ile to jest 12 razy 3?", std::nullopt, "36", "pl", AnswerFormat::number,
           "<|start_of_sequence|><|im_start|>Ile to jest 12 razy 3?<|im_end|>36<|end_of_sequence|>"),
      make("g5", "Write two lines about the sea.", std::nullopt, "The sea is wide.\nThe sea is deep.", "en", F,
           "<|start_of_sequence|><|im_start|>Write two lines about the sea.<|im_end|>The sea is wide.\nThe sea is "
           "deep.<|end_of_sequence|>"),
      make("g6", "Преведи на английски:", "Добро утро, приятелю.", "Good morning, friend.", "bg", F,
           "<|start_of_sequence|><|im_start|>Преведи на английски:\nДобро утро, приятелю.<|im_end|>Good morning, "
           "friend.<|end_of_sequence|>"),
      make("g7", "Käännä ruotsiksi: kiitos paljon", std::nullopt, "tack så mycket", "fi", F,
           "<|start_of_sequence|><|im_start|>Käännä ruotsiksi: kiitos paljon<|im_end|>tack så "
           "mycket<|end_of_sequence|>"),
      make("g8", "Extrae las fechas del texto.", "Nació el 3 de mayo.\nMurió el 9 de julio.", "3 de mayo; 9 de julio",
           "es", F,
           "<|start_of_sequence|><|im_start|>Extrae las fechas del texto.\nNació el 3 de mayo.\nMurió el 9 de "
           "julio.<|im_end|>3 de mayo; 9 de julio<|end_of_sequence|>"),
      make("g9", "Réponds avec un emoji 🙂 seulement", std::nullopt, " 👍 ", "fr", F,
           "<|start_of_sequence|><|im_start|>Réponds avec un emoji 🙂 seulement<|im_end|> 👍 "
           "<|end_of_sequence|>"),
  };
}

std::vector<ScoringCase> scoring_cases() {
  return {
      {"The answer is (B).", "B", true},
      {"ABBA", "B", false},
      {"B", "B", true},
      {"b", "B", true},
      {"Answer: (C)", "C", true},
      {"The correct option is C.", "B", false},
      {"(A) Paris", "A", true},
      {"Paris", "paris", true},
      {"The capital is Paris!", "Paris", true},
      {"The capital is Parisian", "Paris", false},
      {"It is 42.", "42", true},
      {"It is 420", "42", false},
      {"It is 4,2", "42", false},
      {"The answer is New   York", "new york", true},
      {"The answer is New-York", "New York", true},
      {"The answer is NewYork", "New York", false},
      {"Option B) is right", "B", true},
      {"Option (B) is right", "(B)", true},
      {"Option AB", "B", false},
      {"Answer:B", "B", true},
      {"", "B", false},
      {"the answer is b", "B", true},
      {"Η σωστή απάντηση είναι (Β).", "β", true},
      {"Die Antwort lautet STRASSE", "Straße", true},
      {"Réponse : « C »", "C", true},
      {"I think it's D, not C", "B", false},
      {"Answer B or C", "B or C", true},
      {"Answer B and C", "B or C", false},
      {"The answer is $100.", "100", true},
      {"The year 1989", "19", false},
  };
}

pipeline::PipelineConfig write_cleaning_fixture(const CleaningCorpus& c, const fs::path& dir) {
  fs::create_directories(dir / "blacklists");
  std::vector<Document> docs;
  for (const auto& k : c.cases) docs.push_back(k.doc);
  DatasetManifest hq{"hq", DatasetRole::high_quality, "", {write_records(docs, dir / "hq.jsonl")}};
  hq.shards[0].path = "hq.jsonl";
  hq.shards[0].lang = "en";
  save_manifest(hq, dir / "hq.manifest.json");
  DatasetManifest ev{"eval", DatasetRole::eval, "", {write_records(c.eval, dir / "eval.jsonl")}};
  ev.shards[0].path = "eval.jsonl";
  ev.shards[0].lang = "en";
  save_manifest(ev, dir / "eval.manifest.json");

  fixture_classifier({"en", "de", "fi", "el"}).save(dir / "langid.bin");
  std::ofstream bl(dir / "blacklists" / "en.txt");
  for (const auto& t : c.blacklist_terms) bl << t << "\n";
  bl.close();

  pipeline::PipelineConfig cfg;
  cfg.datasets = {{dir / "hq.manifest.json", std::nullopt, {}}, {dir / "eval.manifest.json", std::nullopt, {}}};
  cfg.output_dir = dir / "out";
  cfg.langid_model = dir / "langid.bin";
  cfg.quality_config = fs::path(CORPUSKIT_CONFIG_DIR) / "quality.json";
  cfg.blacklist_dir = dir / "blacklists";
  return cfg;
}

}  // namespace corpuskit::testing
