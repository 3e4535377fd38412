// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#include "corpuskit/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <stdexcept>

namespace corpuskit::text {

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const int32_t len = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < len) {
    UChar32 c;
    U8_NEXT(p, i, len, c);
    out.push_back(c < 0 ? U'\uFFFD' : static_cast<char32_t>(c));
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t n = 0;
  UBool err = false;
  U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(cp), err);
  if (err) {
    out.append("\xEF\xBF\xBD");
    return;
  }
  out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
}

std::string encode_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t c : s) append_utf8(out, c);
  return out;
}

bool is_valid_utf8(std::string_view s) {
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const int32_t len = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < len) {
    UChar32 c;
    U8_NEXT(p, i, len, c);
    if (c < 0) return false;
  }
  return true;
}

bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }
bool is_alpha(char32_t c) { return u_isUAlphabetic(static_cast<UChar32>(c)); }
bool is_digit(char32_t c) { return u_isdigit(static_cast<UChar32>(c)); }
bool is_alnum(char32_t c) { return is_alpha(c) || is_digit(c); }
bool is_mark(char32_t c) { return (U_GET_GC_MASK(static_cast<UChar32>(c)) & U_GC_M_MASK) != 0; }

bool is_punct_or_symbol(char32_t c) {
  const auto mask = U_GET_GC_MASK(static_cast<UChar32>(c));
  return (mask & (U_GC_P_MASK | U_GC_S_MASK)) != 0;
}

namespace {

// Iterates code points of `s`, reporting byte offsets.
template <class F>
void for_each_cp(std::string_view s, F&& f) {
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const int32_t len = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < len) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(p, i, len, c);
    f(c < 0 ? U'\uFFFD' : static_cast<char32_t>(c), static_cast<std::size_t>(start),
      static_cast<std::size_t>(i));
  }
}

bool is_word_char(char32_t c) { return is_alnum(c) || is_mark(c); }

}  // namespace

std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> words;
  std::size_t begin = 0;
  bool in_word = false;
  for_each_cp(s, [&](char32_t c, std::size_t start, std::size_t) {
    const bool ws = is_space(c);
    if (!ws && !in_word) {
      begin = start;
      in_word = true;
    } else if (ws && in_word) {
      words.push_back(s.substr(begin, start - begin));
      in_word = false;
    }
  });
  if (in_word) words.push_back(s.substr(begin));
  return words;
}

std::size_t count_words(std::string_view s) {
  std::size_t n = 0;
  bool in_word = false;
  for_each_cp(s, [&](char32_t c, std::size_t, std::size_t) {
    const bool ws = is_space(c);
    if (!ws && !in_word) ++n;
    in_word = !ws;
  });
  return n;
}

std::vector<std::string_view> split_lines(std::string_view s) {
  std::vector<std::string_view> lines;
  if (s.empty()) return lines;
  std::size_t pos = 0;
  while (true) {
    const auto nl = s.find('\n', pos);
    auto line = s.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return lines;
}

std::string_view trim(std::string_view s) {
  std::size_t first = s.size();
  std::size_t last = 0;
  for_each_cp(s, [&](char32_t c, std::size_t start, std::size_t end) {
    if (!is_space(c)) {
      if (first == s.size()) first = start;
      last = end;
    }
  });
  if (first == s.size()) return {};
  return s.substr(first, last - first);
}

std::vector<std::string_view> split_paragraphs(std::string_view s) {
  std::vector<std::string_view> paras;
  const auto lines = split_lines(s);
  std::size_t begin = std::string_view::npos;
  std::size_t end = 0;
  auto flush = [&] {
    if (begin != std::string_view::npos) paras.push_back(trim(s.substr(begin, end - begin)));
    begin = std::string_view::npos;
  };
  for (auto line : lines) {
    const std::size_t off = static_cast<std::size_t>(line.data() - s.data());
    if (trim(line).empty()) {
      flush();
      continue;
    }
    if (begin == std::string_view::npos) begin = off;
    end = off + line.size();
  }
  flush();
  return paras;
}

std::string case_fold(std::string_view s) {
  auto u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  u.foldCase();
  std::string out;
  u.toUTF8String(out);
  return out;
}

std::string to_nfc(std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
  auto u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  if (nfc->isNormalized(u, status) && U_SUCCESS(status)) return std::string(s);
  status = U_ZERO_ERROR;
  auto n = nfc->normalize(u, status);
  if (U_FAILURE(status)) throw std::runtime_error("NFC normalization failed");
  std::string out;
  n.toUTF8String(out);
  return out;
}

std::vector<std::string> normalized_words(std::string_view s) {
  const std::string folded = case_fold(s);
  std::vector<std::string> words;
  std::string cur;
  for_each_cp(folded, [&](char32_t c, std::size_t, std::size_t) {
    if (is_word_char(c)) {
      append_utf8(cur, c);
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  });
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

}  // namespace corpuskit::text
