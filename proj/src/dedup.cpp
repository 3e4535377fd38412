// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#include "corpuskit/dedup.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <limits>

#include "corpuskit/hash.hpp"
#include "corpuskit/text.hpp"

namespace corpuskit::dedup {

namespace {

constexpr char kIndexMagic[8] = {'C', 'K', 'E', 'V', 'I', 'D', 'X', '\0'};
constexpr std::uint32_t kIndexVersion = 1;

std::uint64_t hash_words(const std::vector<std::string>& words, std::size_t begin, std::size_t end,
                         std::uint64_t seed) {
  std::string key;
  for (std::size_t i = begin; i < end; ++i) {
    if (i != begin) key.push_back('\x1f');
    key += words[i];
  }
  return hash64(key, seed);
}

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error("truncated eval index");
  return v;
}

// A zero threshold would flag every document, including ones sharing nothing.
void check_threshold(double t) {
  if (!(t > 0.0 && t <= 1.0)) throw Error("jaccard threshold must lie in (0,1]");
}

}  // namespace

ShingleSet make_shingles(std::string id, std::string_view text, int n, std::uint64_t seed) {
  if (n < 1) throw Error("shingle width must be >= 1");
  ShingleSet s;
  s.doc_id = std::move(id);
  s.n = n;
  const auto words = text::normalized_words(text);
  if (words.empty()) return s;
  const auto width = static_cast<std::size_t>(n);
  if (words.size() < width) {
    s.hashes.push_back(hash_words(words, 0, words.size(), seed));
  } else {
    s.hashes.reserve(words.size() - width + 1);
    for (std::size_t i = 0; i + width <= words.size(); ++i)
      s.hashes.push_back(hash_words(words, i, i + width, seed));
  }
  std::sort(s.hashes.begin(), s.hashes.end());
  s.hashes.erase(std::unique(s.hashes.begin(), s.hashes.end()), s.hashes.end());
  return s;
}

double jaccard(const ShingleSet& a, const ShingleSet& b) {
  if (a.n != b.n) throw Error("jaccard: shingle widths differ");
  if (a.hashes.empty() && b.hashes.empty()) return 0.0;
  std::size_t inter = 0;
  auto i = a.hashes.begin();
  auto j = b.hashes.begin();
  while (i != a.hashes.end() && j != b.hashes.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++inter;
      ++i;
      ++j;
    }
  }
  const std::size_t uni = a.hashes.size() + b.hashes.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

// ---------------------------------------------------------------------------

LineParagraphDeduplicator::LineParagraphDeduplicator(OverlapThresholds t, std::uint64_t seed)
    : thresholds_(t), seed_(seed) {
  for (double v : {t.max_line_overlap, t.max_paragraph_overlap})
    if (!(v >= 0.0 && v <= 1.0)) throw Error("overlap thresholds must lie in [0,1]");
}

FilterVerdict LineParagraphDeduplicator::offer(const Document& doc) {
  std::vector<std::uint64_t> lines;
  for (auto l : text::split_lines(doc.text)) {
    auto t = text::trim(l);
    if (!t.empty()) lines.push_back(hash64(t, seed_));
  }
  std::vector<std::uint64_t> paras;
  for (auto p : text::split_paragraphs(doc.text)) paras.push_back(hash64(p, seed_ ^ 0x9a9aULL));

  auto overlap = [](const std::vector<std::uint64_t>& hs, const std::unordered_set<std::uint64_t>& seen) {
    if (hs.empty()) return 0.0;
    std::size_t hit = 0;
    for (auto h : hs) hit += seen.count(h);
    return static_cast<double>(hit) / static_cast<double>(hs.size());
  };
  const double line_ov = overlap(lines, lines_);
  if (line_ov > thresholds_.max_line_overlap)
    return FilterVerdict::drop(Stage::dedup, "line_overlap", line_ov, thresholds_.max_line_overlap);
  const double para_ov = overlap(paras, paragraphs_);
  if (para_ov > thresholds_.max_paragraph_overlap)
    return FilterVerdict::drop(Stage::dedup, "paragraph_overlap", para_ov,
                               thresholds_.max_paragraph_overlap);
  lines_.insert(lines.begin(), lines.end());
  paragraphs_.insert(paras.begin(), paras.end());
  return FilterVerdict::pass(Stage::dedup, std::max(line_ov, para_ov));
}

std::vector<FilterVerdict> line_paragraph_dedup(const std::vector<Document>& docs,
                                                OverlapThresholds t, std::uint64_t seed) {
  LineParagraphDeduplicator d(t, seed);
  std::vector<FilterVerdict> out;
  out.reserve(docs.size());
  for (const auto& doc : docs) out.push_back(d.offer(doc));
  return out;
}

// ---------------------------------------------------------------------------

void EvalIndex::add(const ShingleSet& s) {
  if (s.n != n_) throw Error("eval index: shingle width mismatch");
  if (s.hashes.empty()) return;
  const auto idx = static_cast<std::uint32_t>(ids_.size());
  ids_.push_back(s.doc_id);
  counts_.push_back(s.hashes.size());
  for (auto h : s.hashes) postings_[h].push_back(idx);
}

const std::vector<std::uint32_t>* EvalIndex::postings(std::uint64_t hash) const {
  auto it = postings_.find(hash);
  return it == postings_.end() ? nullptr : &it->second;
}

void EvalIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write eval index: " + path.string());
  out.write(kIndexMagic, sizeof(kIndexMagic));
  put(out, kIndexVersion);
  put(out, static_cast<std::int32_t>(n_));
  put(out, seed_);
  put(out, static_cast<std::uint64_t>(ids_.size()));
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    put(out, static_cast<std::uint32_t>(ids_[i].size()));
    out.write(ids_[i].data(), static_cast<std::streamsize>(ids_[i].size()));
    put(out, counts_[i]);
  }
  std::vector<std::uint64_t> keys;
  keys.reserve(postings_.size());
  for (const auto& [h, _] : postings_) keys.push_back(h);
  std::sort(keys.begin(), keys.end());
  put(out, static_cast<std::uint64_t>(keys.size()));
  for (auto h : keys) {
    const auto& list = postings_.at(h);
    put(out, h);
    put(out, static_cast<std::uint32_t>(list.size()));
    out.write(reinterpret_cast<const char*>(list.data()),
              static_cast<std::streamsize>(list.size() * sizeof(std::uint32_t)));
  }
  if (!out) throw IoError("write failed: " + path.string());
}

EvalIndex EvalIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open eval index: " + path.string());
  char magic[sizeof(kIndexMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kIndexMagic, sizeof(magic)) != 0) throw Error("not an eval index file");
  if (get<std::uint32_t>(in) != kIndexVersion) throw Error("unsupported eval index version");
  EvalIndex idx(get<std::int32_t>(in), 0);
  idx.seed_ = get<std::uint64_t>(in);
  const auto ndocs = get<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < ndocs; ++i) {
    std::string id(get<std::uint32_t>(in), '\0');
    in.read(id.data(), static_cast<std::streamsize>(id.size()));
    idx.ids_.push_back(std::move(id));
    idx.counts_.push_back(get<std::uint64_t>(in));
  }
  const auto nkeys = get<std::uint64_t>(in);
  for (std::uint64_t k = 0; k < nkeys; ++k) {
    const auto h = get<std::uint64_t>(in);
    std::vector<std::uint32_t> list(get<std::uint32_t>(in));
    in.read(reinterpret_cast<char*>(list.data()),
            static_cast<std::streamsize>(list.size() * sizeof(std::uint32_t)));
    if (!in) throw Error("truncated eval index");
    for (auto d : list)
      if (d >= ndocs) throw Error("eval index posting out of range");
    idx.postings_.emplace(h, std::move(list));
  }
  return idx;
}

EvalIndex build_eval_index(const std::vector<Document>& eval_docs, int n, std::uint64_t seed) {
  if (n < 1) throw Error("shingle width must be >= 1");
  EvalIndex idx(n, seed);
  for (const auto& d : eval_docs) idx.add(make_shingles(d.id, d.text, n, seed));
  return idx;
}

EvalMatch best_eval_match(const ShingleSet& doc, const EvalIndex& index) {
  if (doc.n != index.n()) throw Error("eval_dedup: shingle width differs from index");
  std::unordered_map<std::uint32_t, std::uint64_t> inter;
  for (auto h : doc.hashes) {
    if (const auto* list = index.postings(h))
      for (auto d : *list) ++inter[d];
  }
  EvalMatch best;
  std::uint32_t best_idx = std::numeric_limits<std::uint32_t>::max();
  for (const auto& [d, common] : inter) {
    const auto uni = doc.hashes.size() + index.shingle_count(d) - common;
    const double sim = static_cast<double>(common) / static_cast<double>(uni);
    if (sim > best.similarity || (sim == best.similarity && d < best_idx)) {
      best.similarity = sim;
      best_idx = d;
    }
  }
  if (best_idx != std::numeric_limits<std::uint32_t>::max()) best.eval_id = index.doc_id(best_idx);
  return best;
}

FilterVerdict eval_dedup(const Document& doc, const EvalIndex& index, double threshold) {
  check_threshold(threshold);
  const auto m = best_eval_match(make_shingles(doc.id, doc.text, index.n(), index.seed()), index);
  if (m.similarity >= threshold)
    return FilterVerdict::drop(Stage::eval_dedup, "jaccard", m.similarity, threshold);
  return FilterVerdict::pass(Stage::eval_dedup, m.similarity);
}

// ---------------------------------------------------------------------------

MinHashEvalIndex::MinHashEvalIndex(int n, std::uint64_t seed, int num_perm, int bands)
    : n_(n), seed_(seed), num_perm_(num_perm), bands_(bands), buckets_(static_cast<std::size_t>(bands)) {
  if (num_perm < 1 || bands < 1 || num_perm % bands != 0)
    throw Error("minhash: num_perm must be a positive multiple of bands");
  perm_seeds_.reserve(static_cast<std::size_t>(num_perm));
  for (int i = 0; i < num_perm; ++i) perm_seeds_.push_back(mix64(seed ^ (0xabcdULL + static_cast<std::uint64_t>(i))));
}

std::vector<std::uint64_t> MinHashEvalIndex::signature(const ShingleSet& s) const {
  std::vector<std::uint64_t> sig(perm_seeds_.size(), std::numeric_limits<std::uint64_t>::max());
  for (auto h : s.hashes) {
    for (std::size_t k = 0; k < perm_seeds_.size(); ++k) sig[k] = std::min(sig[k], mix64(h ^ perm_seeds_[k]));
  }
  return sig;
}

std::uint64_t MinHashEvalIndex::band_key(const std::vector<std::uint64_t>& sig, int band) const {
  const int rows = num_perm_ / bands_;
  std::uint64_t k = static_cast<std::uint64_t>(band);
  for (int r = 0; r < rows; ++r) k = hash_combine(k, sig[static_cast<std::size_t>(band * rows + r)]);
  return k;
}

void MinHashEvalIndex::add(ShingleSet s) {
  if (s.n != n_) throw Error("minhash index: shingle width mismatch");
  if (s.hashes.empty()) return;
  const auto idx = static_cast<std::uint32_t>(sets_.size());
  const auto sig = signature(s);
  for (int b = 0; b < bands_; ++b) buckets_[static_cast<std::size_t>(b)][band_key(sig, b)].push_back(idx);
  sets_.push_back(std::move(s));
}

EvalMatch MinHashEvalIndex::best_match(const ShingleSet& doc) const {
  if (doc.n != n_) throw Error("eval_dedup: shingle width differs from index");
  EvalMatch best;
  if (doc.hashes.empty()) return best;
  const auto sig = signature(doc);
  std::vector<std::uint32_t> cands;
  for (int b = 0; b < bands_; ++b) {
    const auto& tbl = buckets_[static_cast<std::size_t>(b)];
    if (auto it = tbl.find(band_key(sig, b)); it != tbl.end())
      cands.insert(cands.end(), it->second.begin(), it->second.end());
  }
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  for (auto c : cands) {
    const double sim = jaccard(doc, sets_[c]);
    if (sim > best.similarity) {
      best.similarity = sim;
      best.eval_id = sets_[c].doc_id;
    }
  }
  return best;
}

MinHashEvalIndex build_minhash_index(const std::vector<Document>& eval_docs, int n, std::uint64_t seed) {
  MinHashEvalIndex idx(n, seed);
  for (const auto& d : eval_docs) idx.add(make_shingles(d.id, d.text, n, seed));
  return idx;
}

FilterVerdict eval_dedup(const Document& doc, const MinHashEvalIndex& index, double threshold) {
  check_threshold(threshold);
  const auto m = index.best_match(make_shingles(doc.id, doc.text, index.n(), index.seed()));
  if (m.similarity >= threshold)
    return FilterVerdict::drop(Stage::eval_dedup, "jaccard", m.similarity, threshold);
  return FilterVerdict::pass(Stage::eval_dedup, m.similarity);
}

}  // namespace corpuskit::dedup
