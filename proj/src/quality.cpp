// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#include "corpuskit/quality.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "corpuskit/text.hpp"

namespace corpuskit::quality {

using nlohmann::json;

namespace {

std::size_t cp_len(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

std::vector<std::string_view> nonempty_lines(std::string_view t) {
  std::vector<std::string_view> out;
  for (auto l : text::split_lines(t)) {
    auto s = text::trim(l);
    if (!s.empty()) out.push_back(s);
  }
  return out;
}

bool starts_numbered(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && line[i] >= '0' && line[i] <= '9') ++i;
  return i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')');
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::size_t count_occurrences(std::string_view s, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string_view::npos; pos = s.find(needle, pos + needle.size())) ++n;
  return n;
}

struct DupStats {
  double item_fraction = 0.0;
  double char_fraction = 0.0;
};

DupStats duplicate_stats(const std::vector<std::string_view>& items) {
  if (items.empty()) return {};
  std::unordered_set<std::string_view> seen;
  std::size_t dup_items = 0;
  std::size_t dup_chars = 0;
  std::size_t total_chars = 0;
  for (auto it : items) {
    const auto len = cp_len(it);
    total_chars += len;
    if (!seen.insert(it).second) {
      ++dup_items;
      dup_chars += len;
    }
  }
  DupStats s;
  s.item_fraction = static_cast<double>(dup_items) / static_cast<double>(items.size());
  s.char_fraction = total_chars == 0 ? 0.0 : static_cast<double>(dup_chars) / static_cast<double>(total_chars);
  return s;
}

std::string ngram_key(const std::vector<std::string>& w, std::size_t i, int n) {
  std::string k;
  for (int j = 0; j < n; ++j) {
    if (j) k.push_back('\x1f');
    k += w[i + static_cast<std::size_t>(j)];
  }
  return k;
}

void check_fraction(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw Error(std::string("rule ") + name + " must lie in [0,1]");
}

}  // namespace

double bullet_line_fraction(std::string_view t, const std::vector<std::string>& markers, bool numbered) {
  const auto lines = nonempty_lines(t);
  if (lines.empty()) return 0.0;
  std::size_t bullets = 0;
  for (auto l : lines) {
    bool b = numbered && starts_numbered(l);
    for (const auto& m : markers) b = b || (!m.empty() && l.substr(0, m.size()) == m);
    bullets += b;
  }
  return static_cast<double>(bullets) / static_cast<double>(lines.size());
}

double ellipsis_line_fraction(std::string_view t) {
  const auto lines = nonempty_lines(t);
  if (lines.empty()) return 0.0;
  std::size_t n = 0;
  for (auto l : lines) n += ends_with(l, "...") || ends_with(l, "…");
  return static_cast<double>(n) / static_cast<double>(lines.size());
}

double non_alnum_fraction(std::string_view t) {
  std::size_t total = 0;
  std::size_t other = 0;
  for (char32_t c : text::decode_utf8(t)) {
    if (text::is_space(c)) continue;
    ++total;
    other += !(text::is_alnum(c) || text::is_mark(c));
  }
  return total == 0 ? 0.0 : static_cast<double>(other) / static_cast<double>(total);
}

double mean_word_length(std::string_view t) {
  const auto words = text::split_words(t);
  if (words.empty()) return 0.0;
  std::size_t chars = 0;
  for (auto w : words) chars += cp_len(w);
  return static_cast<double>(chars) / static_cast<double>(words.size());
}

double symbol_to_word_ratio(std::string_view t) {
  const auto words = text::count_words(t);
  if (words == 0) return 0.0;
  const auto symbols = count_occurrences(t, "#") + count_occurrences(t, "...") + count_occurrences(t, "…");
  return static_cast<double>(symbols) / static_cast<double>(words);
}

double alpha_word_fraction(std::string_view t) {
  const auto words = text::split_words(t);
  if (words.empty()) return 0.0;
  std::size_t alpha = 0;
  for (auto w : words) {
    const auto cps = text::decode_utf8(w);
    alpha += std::any_of(cps.begin(), cps.end(), [](char32_t c) { return text::is_alpha(c); });
  }
  return static_cast<double>(alpha) / static_cast<double>(words.size());
}

std::size_t stopword_hits(std::string_view t, const std::vector<std::string>& stopwords) {
  std::unordered_set<std::string> stop;
  for (const auto& s : stopwords) stop.insert(text::case_fold(s));
  std::size_t hits = 0;
  for (const auto& w : text::normalized_words(t)) hits += stop.count(w);
  return hits;
}

double duplicate_line_fraction(std::string_view t) { return duplicate_stats(nonempty_lines(t)).item_fraction; }
double duplicate_line_char_fraction(std::string_view t) { return duplicate_stats(nonempty_lines(t)).char_fraction; }
double duplicate_paragraph_fraction(std::string_view t) {
  return duplicate_stats(text::split_paragraphs(t)).item_fraction;
}
double duplicate_paragraph_char_fraction(std::string_view t) {
  return duplicate_stats(text::split_paragraphs(t)).char_fraction;
}

double top_ngram_char_fraction(std::string_view t, int n) {
  if (n < 2) throw Error("top_ngram_char_fraction: n must be >= 2");
  const auto words = text::normalized_words(t);
  const auto w = static_cast<std::size_t>(n);
  if (words.size() < w) return 0.0;
  std::vector<std::size_t> lens(words.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i < words.size(); ++i) total += lens[i] = cp_len(words[i]);
  if (total == 0) return 0.0;

  std::unordered_map<std::string, std::vector<std::size_t>> starts;
  for (std::size_t i = 0; i + w <= words.size(); ++i) starts[ngram_key(words, i, n)].push_back(i);
  std::size_t best_count = 0;
  for (const auto& [_, pos] : starts) best_count = std::max(best_count, pos.size());
  // Among the most frequent n-grams, the one covering the most characters.
  std::size_t best_chars = 0;
  for (const auto& [_, pos] : starts) {
    if (pos.size() != best_count) continue;
    std::size_t chars = 0;
    std::size_t covered_to = 0;  // words [0, covered_to) already counted
    for (auto p : pos) {
      for (std::size_t i = std::max(p, covered_to); i < p + w; ++i) chars += lens[i];
      covered_to = std::max(covered_to, p + w);
    }
    best_chars = std::max(best_chars, chars);
  }
  return static_cast<double>(best_chars) / static_cast<double>(total);
}

double duplicated_ngram_char_fraction(std::string_view t, int n) {
  if (n < 2) throw Error("duplicated_ngram_char_fraction: n must be >= 2");
  const auto words = text::normalized_words(t);
  const auto w = static_cast<std::size_t>(n);
  if (words.size() < w) return 0.0;
  std::unordered_map<std::string, std::size_t> counts;
  for (std::size_t i = 0; i + w <= words.size(); ++i) ++counts[ngram_key(words, i, n)];
  std::vector<char> covered(words.size(), 0);
  for (std::size_t i = 0; i + w <= words.size(); ++i) {
    if (counts[ngram_key(words, i, n)] >= 2)
      std::fill(covered.begin() + static_cast<std::ptrdiff_t>(i),
                covered.begin() + static_cast<std::ptrdiff_t>(i + w), 1);
  }
  std::size_t total = 0;
  std::size_t dup = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto len = cp_len(words[i]);
    total += len;
    if (covered[i]) dup += len;
  }
  return total == 0 ? 0.0 : static_cast<double>(dup) / static_cast<double>(total);
}

// ---------------------------------------------------------------------------

void HeuristicRules::validate() const {
  if (min_words > max_words) throw Error("heuristic rules: min_words > max_words");
  if (min_mean_word_length > max_mean_word_length) throw Error("heuristic rules: bad mean word length range");
  if (!(max_symbol_to_word_ratio >= 0.0)) throw Error("heuristic rules: negative symbol ratio");
  check_fraction(max_bullet_line_fraction, "max_bullet_line_fraction");
  check_fraction(max_ellipsis_line_fraction, "max_ellipsis_line_fraction");
  check_fraction(min_alpha_word_fraction, "min_alpha_word_fraction");
  check_fraction(max_non_alnum_fraction, "max_non_alnum_fraction");
}

void RepetitionRules::validate() const {
  check_fraction(max_duplicate_line_fraction, "max_duplicate_line_fraction");
  check_fraction(max_duplicate_paragraph_fraction, "max_duplicate_paragraph_fraction");
  check_fraction(max_duplicate_line_char_fraction, "max_duplicate_line_char_fraction");
  check_fraction(max_duplicate_paragraph_char_fraction, "max_duplicate_paragraph_char_fraction");
  for (const auto* m : {&top_ngram_limits, &dup_ngram_limits}) {
    for (const auto& [n, v] : *m) {
      if (n < 2) throw Error("repetition rules: n-gram width must be >= 2");
      check_fraction(v, "ngram limit");
    }
  }
}

FilterVerdict apply_heuristics(const Document& doc, const HeuristicRules& r) {
  constexpr auto S = Stage::heuristic;
  const auto& t = doc.text;
  const auto words = static_cast<double>(text::count_words(t));
  if (words < static_cast<double>(r.min_words))
    return FilterVerdict::drop(S, "min_words", words, static_cast<double>(r.min_words));
  if (words > static_cast<double>(r.max_words))
    return FilterVerdict::drop(S, "max_words", words, static_cast<double>(r.max_words));
  const double mwl = mean_word_length(t);
  if (mwl < r.min_mean_word_length)
    return FilterVerdict::drop(S, "mean_word_length", mwl, r.min_mean_word_length);
  if (mwl > r.max_mean_word_length)
    return FilterVerdict::drop(S, "mean_word_length", mwl, r.max_mean_word_length);
  if (const double v = symbol_to_word_ratio(t); v > r.max_symbol_to_word_ratio)
    return FilterVerdict::drop(S, "symbol_to_word", v, r.max_symbol_to_word_ratio);
  if (const double v = bullet_line_fraction(t, r.bullet_markers, r.numbered_bullets); v > r.max_bullet_line_fraction)
    return FilterVerdict::drop(S, "bullet_lines", v, r.max_bullet_line_fraction);
  if (const double v = ellipsis_line_fraction(t); v > r.max_ellipsis_line_fraction)
    return FilterVerdict::drop(S, "ellipsis_lines", v, r.max_ellipsis_line_fraction);
  if (const double v = alpha_word_fraction(t); v < r.min_alpha_word_fraction)
    return FilterVerdict::drop(S, "alpha_words", v, r.min_alpha_word_fraction);
  if (const double v = non_alnum_fraction(t); v > r.max_non_alnum_fraction)
    return FilterVerdict::drop(S, "non_alnum", v, r.max_non_alnum_fraction);
  if (!r.stopwords.empty()) {
    const auto hits = stopword_hits(t, r.stopwords);
    if (hits < r.min_stopword_hits)
      return FilterVerdict::drop(S, "stopwords", static_cast<double>(hits), static_cast<double>(r.min_stopword_hits));
  }
  return FilterVerdict::pass(S, words);
}

FilterVerdict apply_repetition(const Document& doc, const RepetitionRules& r) {
  constexpr auto S = Stage::repetition;
  const auto& t = doc.text;
  const auto lines = duplicate_stats(nonempty_lines(t));
  const auto paras = duplicate_stats(text::split_paragraphs(t));
  if (lines.item_fraction > r.max_duplicate_line_fraction)
    return FilterVerdict::drop(S, "dup_line", lines.item_fraction, r.max_duplicate_line_fraction);
  if (paras.item_fraction > r.max_duplicate_paragraph_fraction)
    return FilterVerdict::drop(S, "dup_paragraph", paras.item_fraction, r.max_duplicate_paragraph_fraction);
  if (lines.char_fraction > r.max_duplicate_line_char_fraction)
    return FilterVerdict::drop(S, "dup_line_chars", lines.char_fraction, r.max_duplicate_line_char_fraction);
  if (paras.char_fraction > r.max_duplicate_paragraph_char_fraction)
    return FilterVerdict::drop(S, "dup_paragraph_chars", paras.char_fraction,
                               r.max_duplicate_paragraph_char_fraction);
  for (const auto& [n, limit] : r.top_ngram_limits) {
    if (const double v = top_ngram_char_fraction(t, n); v > limit)
      return FilterVerdict::drop(S, "top_" + std::to_string(n) + "gram", v, limit);
  }
  for (const auto& [n, limit] : r.dup_ngram_limits) {
    if (const double v = duplicated_ngram_char_fraction(t, n); v > limit)
      return FilterVerdict::drop(S, "dup_" + std::to_string(n) + "gram", v, limit);
  }
  return FilterVerdict::pass(S);
}

// ---------------------------------------------------------------------------

void Blacklist::add_term(const std::string& lang, std::string_view term) {
  auto words = text::normalized_words(term);
  if (words.empty()) throw Error("blacklist term has no word characters: " + std::string(term));
  auto& bucket = terms_[lang][words.front()];
  if (std::find(bucket.begin(), bucket.end(), words) == bucket.end()) bucket.push_back(std::move(words));
}

void Blacklist::load_file(const std::string& lang, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open blacklist: " + path.string());
  terms_[lang];
  std::string line;
  while (std::getline(in, line)) {
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    add_term(lang, t);
  }
}

void Blacklist::load_directory(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) load_file(f.stem().string(), f);
}

std::size_t Blacklist::hits(const std::string& lang, std::string_view t) const {
  auto it = terms_.find(lang);
  if (it == terms_.end() || it->second.empty()) return 0;
  const auto words = text::normalized_words(t);
  std::size_t n = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    auto b = it->second.find(words[i]);
    if (b == it->second.end()) continue;
    for (const auto& term : b->second) {
      if (i + term.size() > words.size()) continue;
      if (std::equal(term.begin(), term.end(), words.begin() + static_cast<std::ptrdiff_t>(i))) ++n;
    }
  }
  return n;
}

FilterVerdict apply_blacklist(const Document& doc, const Blacklist& bl) {
  constexpr auto S = Stage::blacklist;
  if (bl.empty()) return FilterVerdict::pass(S);
  if (!bl.has_language(doc.lang)) {
    auto v = FilterVerdict::pass(S);
    v.rule = "no_list";
    return v;
  }
  const auto h = static_cast<double>(bl.hits(doc.lang, doc.text));
  if (h > static_cast<double>(bl.max_hits))
    return FilterVerdict::drop(S, "blacklist_terms", h, static_cast<double>(bl.max_hits));
  return FilterVerdict::pass(S, h);
}

// ---------------------------------------------------------------------------

namespace {

void read_heuristic(const json& j, HeuristicRules& r) {
  r.min_words = j.value("min_words", r.min_words);
  r.max_words = j.value("max_words", r.max_words);
  if (auto it = j.find("mean_word_length_range"); it != j.end()) {
    r.min_mean_word_length = it->at(0).get<double>();
    r.max_mean_word_length = it->at(1).get<double>();
  }
  r.max_symbol_to_word_ratio = j.value("max_symbol_to_word_ratio", r.max_symbol_to_word_ratio);
  r.max_bullet_line_fraction = j.value("max_bullet_line_fraction", r.max_bullet_line_fraction);
  r.max_ellipsis_line_fraction = j.value("max_ellipsis_line_fraction", r.max_ellipsis_line_fraction);
  r.min_alpha_word_fraction = j.value("min_alpha_word_fraction", r.min_alpha_word_fraction);
  r.max_non_alnum_fraction = j.value("max_non_alnum_fraction", r.max_non_alnum_fraction);
  r.min_stopword_hits = j.value("min_stopword_hits", r.min_stopword_hits);
  r.bullet_markers = j.value("bullet_markers", r.bullet_markers);
  r.numbered_bullets = j.value("numbered_bullets", r.numbered_bullets);
  r.stopwords = j.value("stopwords", r.stopwords);
}

std::map<int, double> read_limits(const json& j, std::map<int, double> dflt) {
  for (auto& [k, v] : j.items()) dflt[std::stoi(k)] = v.get<double>();
  return dflt;
}

void read_repetition(const json& j, RepetitionRules& r) {
  r.max_duplicate_line_fraction = j.value("max_duplicate_line_fraction", r.max_duplicate_line_fraction);
  r.max_duplicate_paragraph_fraction = j.value("max_duplicate_paragraph_fraction", r.max_duplicate_paragraph_fraction);
  r.max_duplicate_line_char_fraction = j.value("max_duplicate_line_char_fraction", r.max_duplicate_line_char_fraction);
  r.max_duplicate_paragraph_char_fraction =
      j.value("max_duplicate_paragraph_char_fraction", r.max_duplicate_paragraph_char_fraction);
  if (auto it = j.find("top_ngram_limits"); it != j.end()) r.top_ngram_limits = read_limits(*it, r.top_ngram_limits);
  if (auto it = j.find("dup_ngram_limits"); it != j.end()) r.dup_ngram_limits = read_limits(*it, r.dup_ngram_limits);
}

}  // namespace

const HeuristicRules& QualityConfig::heuristic_for(const std::string& lang) const {
  auto it = heuristic_by_lang.find(lang);
  return it == heuristic_by_lang.end() ? heuristic : it->second;
}

const RepetitionRules& QualityConfig::repetition_for(const std::string& lang) const {
  auto it = repetition_by_lang.find(lang);
  return it == repetition_by_lang.end() ? repetition : it->second;
}

QualityConfig QualityConfig::from_json(std::string_view json_text) {
  const json j = json::parse(json_text);
  QualityConfig c;
  if (auto it = j.find("heuristic"); it != j.end()) read_heuristic(*it, c.heuristic);
  if (auto it = j.find("repetition"); it != j.end()) read_repetition(*it, c.repetition);
  if (auto it = j.find("languages"); it != j.end()) {
    for (auto& [lang, section] : it->items()) {
      // Overrides start from the global defaults.
      HeuristicRules h = c.heuristic;
      if (auto hs = section.find("heuristic"); hs != section.end()) read_heuristic(*hs, h);
      if (auto sw = section.find("stopwords"); sw != section.end()) h.stopwords = sw->get<std::vector<std::string>>();
      h.validate();
      c.heuristic_by_lang.emplace(lang, std::move(h));
      RepetitionRules r = c.repetition;
      if (auto rs = section.find("repetition"); rs != section.end()) read_repetition(*rs, r);
      r.validate();
      c.repetition_by_lang.emplace(lang, std::move(r));
    }
  }
  c.heuristic.validate();
  c.repetition.validate();
  return c;
}

QualityConfig QualityConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open quality config: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace corpuskit::quality
