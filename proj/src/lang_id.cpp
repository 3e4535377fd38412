// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#include "corpuskit/lang_id.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "corpuskit/text.hpp"

namespace corpuskit::lang_id {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

bool is_letter_like(char32_t c) { return text::is_alpha(c) || text::is_mark(c); }

}  // namespace

std::vector<std::string> char_ngrams(std::string_view input, NgramRange range) {
  const auto folded = text::decode_utf8(text::case_fold(input));
  std::vector<std::string> grams;
  std::u32string run;
  auto flush = [&] {
    if (run.empty()) return;
    std::u32string padded;
    padded.reserve(run.size() + 2);
    padded.push_back(U' ');
    padded += run;
    padded.push_back(U' ');
    for (int n = range.min_n; n <= range.max_n; ++n) {
      const auto w = static_cast<std::size_t>(n);
      if (padded.size() < w) break;
      for (std::size_t i = 0; i + w <= padded.size(); ++i) {
        const auto g = padded.substr(i, w);
        if (g == U" ") continue;
        grams.push_back(text::encode_utf8(g));
      }
    }
    run.clear();
  };
  for (char32_t c : folded) {
    if (is_letter_like(c)) {
      run.push_back(c);
    } else {
      flush();
    }
  }
  flush();
  return grams;
}

bool LangClassifier::has_label(std::string_view lang) const {
  return std::find(labels_.begin(), labels_.end(), lang) != labels_.end();
}

std::vector<double> LangClassifier::posterior(std::string_view input) const {
  const auto grams = char_ngrams(text::trim(input), range_);
  if (grams.empty()) return {};
  std::vector<double> score(labels_.size(), 0.0);
  for (const auto& g : grams) {
    auto it = weights_.find(g);
    const auto& w = it == weights_.end() ? unseen_ : it->second;
    for (std::size_t l = 0; l < score.size(); ++l) score[l] += w[l];
  }
  const double mx = *std::max_element(score.begin(), score.end());
  double z = 0.0;
  for (auto& s : score) {
    s = std::exp(s - mx);
    z += s;
  }
  for (auto& s : score) s /= z;
  return score;
}

LangPrediction LangClassifier::classify(std::string_view input) const {
  const auto post = posterior(input);
  LangPrediction p;
  if (post.empty()) return p;
  std::vector<std::size_t> order(post.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return post[a] > post[b]; });
  p.determined = true;
  p.lang = labels_[order[0]];
  p.confidence = post[order[0]];
  if (order.size() > 1) p.runner_up = labels_[order[1]];
  return p;
}

std::string LangClassifier::serialize() const {
  json j;
  j["format"] = "corpuskit-langid";
  j["version"] = kFormatVersion;
  j["labels"] = labels_;
  j["ngram_range"] = {range_.min_n, range_.max_n};
  j["smoothing"] = smoothing_;
  j["unseen"] = unseen_;
  // std::map gives a stable key order and therefore stable bytes.
  std::map<std::string, std::vector<double>> sorted(weights_.begin(), weights_.end());
  j["ngrams"] = sorted;
  return j.dump();
}

LangClassifier LangClassifier::deserialize(std::string_view data) {
  json j = json::parse(data);
  if (j.value("format", "") != "corpuskit-langid") throw Error("not a language classifier file");
  if (j.value("version", 0) != kFormatVersion) throw Error("unsupported language classifier version");
  LangClassifier c;
  c.labels_ = j.at("labels").get<std::vector<std::string>>();
  c.range_ = {j.at("ngram_range")[0].get<int>(), j.at("ngram_range")[1].get<int>()};
  c.smoothing_ = j.at("smoothing").get<double>();
  c.unseen_ = j.at("unseen").get<std::vector<double>>();
  for (auto& [g, w] : j.at("ngrams").items()) {
    auto row = w.get<std::vector<double>>();
    if (row.size() != c.labels_.size()) throw Error("language classifier row has wrong width");
    c.weights_.emplace(g, std::move(row));
  }
  if (c.labels_.size() < 2 || c.unseen_.size() != c.labels_.size()) throw Error("malformed language classifier");
  return c;
}

void LangClassifier::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write classifier: " + path.string());
  out << serialize();
  if (!out) throw IoError("write failed: " + path.string());
}

LangClassifier LangClassifier::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open classifier: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

LangClassifier train_classifier(const std::vector<std::pair<std::string, std::string>>& labeled,
                                NgramRange range, double smoothing) {
  if (labeled.empty()) throw Error("train_classifier: empty corpus");
  if (!(smoothing > 0.0)) throw Error("train_classifier: smoothing must be positive");
  if (range.min_n < 1 || range.max_n < range.min_n) throw Error("train_classifier: bad n-gram range");
  std::set<std::string> label_set;
  for (const auto& [txt, lang] : labeled) {
    if (text::trim(txt).empty()) throw Error("train_classifier: empty training text");
    label_set.insert(lang);
  }
  if (label_set.size() < 2) throw Error("train_classifier: need at least two distinct labels");

  LangClassifier c;
  c.labels_.assign(label_set.begin(), label_set.end());
  c.range_ = range;
  c.smoothing_ = smoothing;
  std::map<std::string, std::size_t> label_idx;
  for (std::size_t i = 0; i < c.labels_.size(); ++i) label_idx[c.labels_[i]] = i;

  const std::size_t L = c.labels_.size();
  std::unordered_map<std::string, std::vector<double>> counts;
  std::vector<double> totals(L, 0.0);
  for (const auto& [txt, lang] : labeled) {
    const auto l = label_idx.at(lang);
    for (auto& g : char_ngrams(txt, range)) {
      auto& row = counts[g];
      if (row.empty()) row.assign(L, 0.0);
      row[l] += 1.0;
      totals[l] += 1.0;
    }
  }
  const double V = static_cast<double>(counts.size());
  c.unseen_.resize(L);
  for (std::size_t l = 0; l < L; ++l) c.unseen_[l] = std::log(smoothing / (totals[l] + smoothing * V));
  c.weights_.reserve(counts.size());
  for (auto& [g, row] : counts) {
    std::vector<double> w(L);
    for (std::size_t l = 0; l < L; ++l) w[l] = std::log((row[l] + smoothing) / (totals[l] + smoothing * V));
    c.weights_.emplace(g, std::move(w));
  }
  return c;
}

FilterVerdict language_filter(const LangPrediction& pred, std::string_view expected, double min_confidence,
                              Stage stage) {
  if (!pred.determined)
    return FilterVerdict::drop(stage, "undetermined", 0.0, min_confidence);
  if (pred.lang != expected)
    return FilterVerdict::drop(stage, "lang_mismatch", pred.confidence, min_confidence);
  if (pred.confidence < min_confidence)
    return FilterVerdict::drop(stage, "low_confidence", pred.confidence, min_confidence);
  return FilterVerdict::pass(stage, pred.confidence);
}

FilterVerdict language_filter(const Document& doc, const LangClassifier& clf, std::string_view expected,
                              double min_confidence) {
  if (!clf.has_label(expected)) throw Error("language_filter: classifier has no label " + std::string(expected));
  return language_filter(clf.classify(doc.text), expected, min_confidence);
}

std::optional<LangPrediction> prediction_from_meta(const Document& doc) {
  auto l = doc.meta.find("lang_id.lang");
  auto c = doc.meta.find("lang_id.confidence");
  if (l == doc.meta.end() || c == doc.meta.end()) return std::nullopt;
  LangPrediction p;
  p.lang = l->second;
  try {
    p.confidence = std::stod(c->second);
  } catch (const std::exception&) {
    throw Error("document " + doc.id + ": bad lang_id.confidence");
  }
  if (!(p.confidence >= 0.0 && p.confidence <= 1.0))
    throw Error("document " + doc.id + ": lang_id.confidence outside [0,1]");
  p.determined = p.lang != "und";
  return p;
}

}  // namespace corpuskit::lang_id
