// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#include "corpuskit/bpe.hpp"

#include <unicode/utf8.h>

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <queue>
#include <sstream>

#include "corpuskit/hash.hpp"
#include "corpuskit/text.hpp"

namespace corpuskit::bpe {

using nlohmann::json;

namespace {

enum class CharClass { space, letter, digit, other };

CharClass classify(char32_t c) {
  if (text::is_space(c)) return CharClass::space;
  if (text::is_alpha(c) || text::is_mark(c)) return CharClass::letter;
  if (text::is_digit(c)) return CharClass::digit;
  return CharClass::other;
}

struct CodePoint {
  std::size_t begin;
  std::size_t end;
  char32_t value;
  CharClass cls;
};

std::vector<CodePoint> scan(std::string_view s) {
  std::vector<CodePoint> out;
  out.reserve(s.size());
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const auto len = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < len) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(p, i, len, c);
    const char32_t v = c < 0 ? U'\uFFFD' : static_cast<char32_t>(c);
    out.push_back({static_cast<std::size_t>(start), static_cast<std::size_t>(i), v, classify(v)});
  }
  return out;
}

std::uint64_t pair_key(TokenId a, TokenId b) { return (static_cast<std::uint64_t>(a) << 32) | b; }

// GPT-2 style printable mapping of bytes used in the vocab and merges files.
const std::array<std::string, 256>& byte_to_printable() {
  static const auto table = [] {
    std::array<std::string, 256> t;
    int extra = 0;
    for (int b = 0; b < 256; ++b) {
      const bool printable = (b >= '!' && b <= '~') || (b >= 0xA1 && b <= 0xAC) || (b >= 0xAE && b <= 0xFF);
      const char32_t cp = printable ? static_cast<char32_t>(b) : static_cast<char32_t>(256 + extra++);
      text::append_utf8(t[b], cp);
    }
    return t;
  }();
  return table;
}

std::string to_printable(std::string_view bytes) {
  std::string out;
  for (unsigned char b : bytes) out += byte_to_printable()[b];
  return out;
}

std::string from_printable(std::string_view s) {
  static const auto reverse = [] {
    std::unordered_map<char32_t, unsigned char> r;
    for (int b = 0; b < 256; ++b) r[text::decode_utf8(byte_to_printable()[b])[0]] = static_cast<unsigned char>(b);
    return r;
  }();
  std::string out;
  for (char32_t c : text::decode_utf8(s)) {
    auto it = reverse.find(c);
    if (it == reverse.end()) throw Error("tokenizer file contains an unmapped character");
    out.push_back(static_cast<char>(it->second));
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << data;
  if (!out) throw IoError("write failed: " + path.string());
}

constexpr const char* kMergesHeader = "#version: corpuskit-bpe 1";

}  // namespace

std::vector<std::string_view> pretokenize(std::string_view s) {
  const auto cps = scan(s);
  std::vector<std::string_view> pieces;
  auto emit = [&](std::size_t b, std::size_t e) {
    if (e > b) pieces.push_back(s.substr(b, e - b));
  };
  std::size_t i = 0;
  while (i < cps.size()) {
    const auto cls = cps[i].cls;
    if (cls == CharClass::space) {
      std::size_t j = i;
      while (j < cps.size() && cps[j].cls == CharClass::space) ++j;
      // A final U+0020 before a non-space run travels with that run.
      std::size_t cut = j;
      if (j < cps.size() && cps[j - 1].value == U' ') cut = j - 1;
      emit(cps[i].begin, cut < j ? cps[cut].begin : cps[j - 1].end);
      if (cut < j) {
        std::size_t k = j;
        const auto run_cls = cps[j].cls;
        while (k < cps.size() && cps[k].cls == run_cls) ++k;
        emit(cps[cut].begin, cps[k - 1].end);
        j = k;
      }
      i = j;
      continue;
    }
    std::size_t k = i;
    while (k < cps.size() && cps[k].cls == cls) ++k;
    emit(cps[i].begin, cps[k - 1].end);
    i = k;
  }
  return pieces;
}

// ---------------------------------------------------------------------------
// TokenizerModel

void TokenizerModel::init_base(const std::vector<std::string>& specials) {
  vocab_.clear();
  special_.clear();
  specials_.clear();
  special_ids_.clear();
  merges_.clear();
  merge_rank_.clear();
  reserved_ = 0;
  reserved_counter_ = 0;
  for (int b = 0; b < 256; ++b) {
    vocab_.emplace_back(1, static_cast<char>(b));
    special_.push_back(false);
  }
  for (const auto& sp : specials) {
    if (sp.empty()) throw Error("special token must not be empty");
    if (special_ids_.count(sp)) throw Error("duplicate special token: " + sp);
    special_ids_.emplace(sp, static_cast<TokenId>(vocab_.size()));
    specials_.push_back(sp);
    vocab_.push_back(sp);
    special_.push_back(true);
  }
}

void TokenizerModel::add_merge(TokenId a, TokenId b) {
  if (a >= vocab_.size() || b >= vocab_.size() || special_[a] || special_[b])
    throw Error("merge refers to an invalid token");
  const auto id = static_cast<TokenId>(vocab_.size());
  if (!merge_rank_.emplace(pair_key(a, b), id).second) throw Error("duplicate merge");
  merges_.emplace_back(a, b);
  vocab_.push_back(vocab_[a] + vocab_[b]);
  special_.push_back(false);
}

void TokenizerModel::add_reserved(std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    std::string name;
    do {
      name = "<|reserved_" + std::to_string(reserved_counter_++) + "|>";
    } while (special_ids_.count(name));
    ++reserved_;
    special_ids_.emplace(name, static_cast<TokenId>(vocab_.size()));
    vocab_.push_back(std::move(name));
    special_.push_back(true);
  }
}

std::optional<TokenId> TokenizerModel::special_id(std::string_view surface) const {
  auto it = special_ids_.find(std::string(surface));
  if (it == special_ids_.end()) return std::nullopt;
  return it->second;
}

void TokenizerModel::encode_piece(std::string_view piece, std::vector<TokenId>& out) const {
  std::vector<TokenId> ids;
  ids.reserve(piece.size());
  for (unsigned char b : piece) ids.push_back(b);
  // Merge ids are assigned in rank order, so the smallest resulting id is
  // the earliest-learned applicable merge.
  while (ids.size() > 1) {
    TokenId best = 0;
    bool found = false;
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
      auto it = merge_rank_.find(pair_key(ids[i], ids[i + 1]));
      if (it != merge_rank_.end() && (!found || it->second < best)) {
        best = it->second;
        found = true;
      }
    }
    if (!found) break;
    const auto& [a, b] = merges_[best - kByteAlphabet - specials_.size()];
    std::size_t w = 0;
    for (std::size_t r = 0; r < ids.size();) {
      if (r + 1 < ids.size() && ids[r] == a && ids[r + 1] == b) {
        ids[w++] = best;
        r += 2;
      } else {
        ids[w++] = ids[r++];
      }
    }
    ids.resize(w);
  }
  out.insert(out.end(), ids.begin(), ids.end());
}

std::vector<TokenId> TokenizerModel::encode(std::string_view text) const {
  std::vector<TokenId> out;
  out.reserve(text.size() / 2 + 1);
  for (auto piece : pretokenize(text)) encode_piece(piece, out);
  return out;
}

std::vector<TokenId> TokenizerModel::encode_with_specials(std::string_view text) const {
  std::unordered_map<char, std::vector<std::pair<std::string_view, TokenId>>> by_first;
  for (const auto& [surface, id] : special_ids_) by_first[surface[0]].emplace_back(surface, id);
  std::vector<TokenId> out;
  std::size_t seg = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    // Longest registered special starting at i.
    std::size_t best_len = 0;
    TokenId best_id = 0;
    if (auto it = by_first.find(text[i]); it != by_first.end()) {
      for (const auto& [surface, id] : it->second) {
        if (surface.size() > best_len && text.substr(i, surface.size()) == surface) {
          best_len = surface.size();
          best_id = id;
        }
      }
    }
    if (best_len == 0) {
      ++i;
      continue;
    }
    for (auto piece : pretokenize(text.substr(seg, i - seg))) encode_piece(piece, out);
    out.push_back(best_id);
    i += best_len;
    seg = i;
  }
  for (auto piece : pretokenize(text.substr(seg))) encode_piece(piece, out);
  return out;
}

std::string TokenizerModel::decode(std::span<const TokenId> ids) const {
  std::string out;
  for (auto id : ids) {
    if (id >= vocab_.size()) throw Error("decode: unknown token id " + std::to_string(id));
    out += vocab_[id];
  }
  return out;
}

std::string TokenizerModel::fingerprint() const {
  std::uint64_t h = hash64("corpuskit-bpe");
  for (const auto& sp : specials_) h = hash_combine(h, hash64(sp));
  h = hash_combine(h, reserved_);
  for (const auto& [a, b] : merges_) h = hash_combine(h, pair_key(a, b));
  char buf[32];
  std::snprintf(buf, sizeof buf, "bpe-%zu-%016llx", vocab_.size(), static_cast<unsigned long long>(h));
  return buf;
}

void TokenizerModel::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  json vocab = json::object();
  for (std::size_t id = 0; id < vocab_.size(); ++id)
    vocab[special_[id] ? vocab_[id] : to_printable(vocab_[id])] = id;
  write_file(dir / "vocab.json", vocab.dump(1) + "\n");

  std::string merges = std::string(kMergesHeader) + "\n";
  for (const auto& [a, b] : merges_) merges += to_printable(vocab_[a]) + " " + to_printable(vocab_[b]) + "\n";
  write_file(dir / "merges.txt", merges);

  json sp;
  sp["specials"] = specials_;
  sp["reserved"] = reserved_;
  sp["vocab_size"] = vocab_.size();
  sp["normalize_nfc"] = normalize_nfc_;
  sp["fingerprint"] = fingerprint();
  write_file(dir / "specials.json", sp.dump(1) + "\n");
}

TokenizerModel TokenizerModel::load(const std::filesystem::path& dir) {
  const json sp = json::parse(read_file(dir / "specials.json"));
  std::istringstream merges_in(read_file(dir / "merges.txt"));
  std::string line;
  std::vector<std::pair<std::string, std::string>> merges;
  bool first = true;
  while (std::getline(merges_in, line)) {
    if (first) {
      first = false;
      if (line != kMergesHeader) throw Error("unsupported merges file header");
      continue;
    }
    if (line.empty()) continue;
    const auto space = line.find(' ');
    if (space == std::string::npos || line.find(' ', space + 1) != std::string::npos)
      throw Error("malformed merge line: " + line);
    merges.emplace_back(from_printable(line.substr(0, space)), from_printable(line.substr(space + 1)));
  }
  auto model = from_merges(merges, sp.at("specials").get<std::vector<std::string>>(),
                           sp.at("reserved").get<std::size_t>(), sp.value("normalize_nfc", true));
  if (model.vocab_size() != sp.at("vocab_size").get<std::size_t>())
    throw Error("tokenizer vocab size does not match its manifest");

  const json vocab = json::parse(read_file(dir / "vocab.json"));
  if (vocab.size() != model.vocab_size()) throw Error("vocab.json size mismatch");
  for (auto& [key, id] : vocab.items()) {
    const auto i = id.get<std::size_t>();
    if (i >= model.vocab_size()) throw Error("vocab.json id out of range");
    const auto bytes = model.is_special(static_cast<TokenId>(i)) ? key : from_printable(key);
    if (bytes != model.vocab_[i]) throw Error("vocab.json disagrees with merges.txt at id " + std::to_string(i));
  }
  return model;
}

TokenizerModel TokenizerModel::from_merges(const std::vector<std::pair<std::string, std::string>>& merges,
                                           const std::vector<std::string>& specials, std::size_t reserved,
                                           bool normalize_nfc) {
  TokenizerModel m;
  m.normalize_nfc_ = normalize_nfc;
  m.init_base(specials);
  std::unordered_map<std::string, TokenId> by_bytes;
  for (TokenId b = 0; b < 256; ++b) by_bytes.emplace(m.vocab_[b], b);
  for (const auto& [l, r] : merges) {
    auto a = by_bytes.find(l);
    auto b = by_bytes.find(r);
    if (a == by_bytes.end() || b == by_bytes.end()) throw Error("merge refers to an unknown token");
    m.add_merge(a->second, b->second);
    by_bytes.emplace(m.vocab_.back(), static_cast<TokenId>(m.vocab_.size() - 1));
  }
  m.add_reserved(reserved);
  return m;
}

// ---------------------------------------------------------------------------
// Training

TokenizerModel train_bpe(const std::vector<Document>& corpus, const TrainOptions& opts) {
  const std::size_t base = kByteAlphabet + opts.specials.size();
  if (opts.vocab_size < base)
    throw Error("vocab_size " + std::to_string(opts.vocab_size) + " is smaller than bytes plus specials (" +
                std::to_string(base) + ")");
  if (opts.vocab_size % 8 != 0 && !opts.allow_unaligned_vocab)
    throw Error("vocab_size must be a multiple of 8");

  std::unordered_map<std::string, std::int64_t> piece_counts;
  bool any_text = false;
  for (const auto& doc : corpus) {
    const std::string norm = opts.normalize_nfc ? text::to_nfc(doc.text) : doc.text;
    if (!norm.empty()) any_text = true;
    for (auto piece : pretokenize(norm)) ++piece_counts[std::string(piece)];
  }
  if (!any_text) throw Error("train_bpe: empty corpus");

  TokenizerModel model;
  model.normalize_nfc_ = opts.normalize_nfc;
  model.init_base(opts.specials);

  // Sorted piece list keeps every later step independent of hash order.
  std::vector<std::pair<std::string, std::int64_t>> pieces(piece_counts.begin(), piece_counts.end());
  std::sort(pieces.begin(), pieces.end());
  std::vector<std::vector<TokenId>> words(pieces.size());
  std::vector<std::int64_t> freq(pieces.size());
  for (std::size_t w = 0; w < pieces.size(); ++w) {
    for (unsigned char b : pieces[w].first) words[w].push_back(b);
    freq[w] = pieces[w].second;
  }

  std::unordered_map<std::uint64_t, std::int64_t> pair_count;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> where;
  for (std::size_t w = 0; w < words.size(); ++w) {
    const auto& ids = words[w];
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
      const auto k = pair_key(ids[i], ids[i + 1]);
      pair_count[k] += freq[w];
      auto& list = where[k];
      if (list.empty() || list.back() != w) list.push_back(static_cast<std::uint32_t>(w));
    }
  }

  const auto& vocab = model.vocab_;
  struct Entry {
    std::int64_t count;
    std::uint64_t key;
  };
  auto worse = [&vocab](const Entry& x, const Entry& y) {
    if (x.count != y.count) return x.count < y.count;
    const auto xa = static_cast<TokenId>(x.key >> 32), xb = static_cast<TokenId>(x.key);
    const auto ya = static_cast<TokenId>(y.key >> 32), yb = static_cast<TokenId>(y.key);
    if (int c = vocab[xa].compare(vocab[ya]); c != 0) return c > 0;
    return vocab[xb].compare(vocab[yb]) > 0;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
  for (const auto& [k, c] : pair_count) heap.push({c, k});

  std::vector<std::uint32_t> stamp(words.size(), 0);
  std::uint32_t iteration = 0;
  std::unordered_map<std::uint64_t, std::int64_t> touched;
  while (model.vocab_.size() < opts.vocab_size && !heap.empty()) {
    const Entry top = heap.top();
    heap.pop();
    auto pc = pair_count.find(top.key);
    if (pc == pair_count.end() || pc->second != top.count || top.count <= 0) continue;

    const auto a = static_cast<TokenId>(top.key >> 32);
    const auto b = static_cast<TokenId>(top.key);
    model.add_merge(a, b);
    const auto merged = static_cast<TokenId>(model.vocab_.size() - 1);
    ++iteration;
    touched.clear();

    const auto occurrences = where[top.key];  // copy: `where` grows below
    for (auto w : occurrences) {
      if (stamp[w] == iteration) continue;
      stamp[w] = iteration;
      auto& ids = words[w];
      bool present = false;
      for (std::size_t i = 0; i + 1 < ids.size(); ++i)
        if (ids[i] == a && ids[i + 1] == b) {
          present = true;
          break;
        }
      if (!present) continue;
      const auto f = freq[w];
      for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
        const auto k = pair_key(ids[i], ids[i + 1]);
        pair_count[k] -= f;
        touched[k] -= f;
      }
      std::size_t out = 0;
      for (std::size_t r = 0; r < ids.size();) {
        if (r + 1 < ids.size() && ids[r] == a && ids[r + 1] == b) {
          ids[out++] = merged;
          r += 2;
        } else {
          ids[out++] = ids[r++];
        }
      }
      ids.resize(out);
      for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
        const auto k = pair_key(ids[i], ids[i + 1]);
        pair_count[k] += f;
        touched[k] += f;
        auto& list = where[k];
        if (list.empty() || list.back() != w) list.push_back(w);
      }
    }
    pair_count.erase(top.key);
    where.erase(top.key);
    for (const auto& [k, delta] : touched) {
      if (delta == 0) continue;
      auto it = pair_count.find(k);
      if (it == pair_count.end()) continue;
      if (it->second <= 0) {
        pair_count.erase(it);
        continue;
      }
      heap.push({it->second, k});
    }
  }
  model.add_reserved(opts.vocab_size - model.vocab_.size());
  return model;
}

// ---------------------------------------------------------------------------
// NSL

std::size_t CachedEncoder::count_tokens(std::string_view text) {
  std::size_t n = 0;
  for (auto piece : pretokenize(text)) {
    auto it = cache_.find(std::string(piece));
    if (it == cache_.end()) it = cache_.emplace(std::string(piece), model_->encode(piece).size()).first;
    n += it->second;
  }
  return n;
}

double nsl(const TokenizerModel& model, const std::vector<Document>& docs) {
  CachedEncoder enc(model);
  std::size_t tokens = 0;
  std::size_t words = 0;
  for (const auto& d : docs) {
    const std::string norm = model.normalize_nfc() ? text::to_nfc(d.text) : d.text;
    tokens += enc.count_tokens(norm);
    words += text::count_words(norm);
  }
  if (words == 0) throw Error("nsl: corpus has no words");
  return static_cast<double>(tokens) / static_cast<double>(words);
}

NslReport nsl_report(const TokenizerModel& model, const std::map<std::string, std::vector<Document>>& corpora,
                     const std::optional<std::map<std::string, double>>& sizes) {
  if (corpora.empty()) throw Error("nsl_report: no languages");
  NslReport r;
  double sum = 0.0;
  for (const auto& [lang, docs] : corpora) {
    const double v = nsl(model, docs);
    r.per_language[lang] = v;
    sum += v;
  }
  r.average_nsl = sum / static_cast<double>(corpora.size());
  if (sizes) {
    double total = 0.0;
    for (const auto& [lang, _] : corpora) {
      auto it = sizes->find(lang);
      if (it == sizes->end()) throw Error("nsl_report: missing size for language " + lang);
      if (!(it->second >= 0.0)) throw Error("nsl_report: negative size for language " + lang);
      total += it->second;
    }
    if (!(total > 0.0)) throw Error("nsl_report: sizes sum to zero");
    double weighted = 0.0;
    for (const auto& [lang, v] : r.per_language) {
      const double w = sizes->at(lang) / total;
      r.weights[lang] = w;
      weighted += w * v;
    }
    r.weighted_nsl = weighted;
  }
  return r;
}

std::string NslReport::to_json() const {
  json j;
  j["per_language"] = per_language;
  j["average_nsl"] = average_nsl;
  if (weighted_nsl) {
    j["weighted_nsl"] = *weighted_nsl;
    j["weights"] = weights;
  }
  return j.dump(2);
}

}  // namespace corpuskit::bpe
