// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace corpuskit::text {

// UTF-8 helpers backed by ICU character properties. All functions accept
// arbitrary bytes; invalid sequences decode to U+FFFD and are never dropped.

std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
void append_utf8(std::string& out, char32_t cp);
bool is_valid_utf8(std::string_view s);

bool is_space(char32_t c);
bool is_alpha(char32_t c);
bool is_digit(char32_t c);
bool is_alnum(char32_t c);
bool is_mark(char32_t c);
// Unicode general categories P* and S*.
bool is_punct_or_symbol(char32_t c);

// Maximal runs of non-whitespace code points.
std::vector<std::string_view> split_words(std::string_view s);
std::size_t count_words(std::string_view s);

// Lines split on '\n' with a trailing '\r' removed. Empty lines are kept.
std::vector<std::string_view> split_lines(std::string_view s);
// Paragraphs are separated by one or more blank lines; returned trimmed.
std::vector<std::string_view> split_paragraphs(std::string_view s);

std::string_view trim(std::string_view s);

std::string case_fold(std::string_view s);
std::string to_nfc(std::string_view s);

// Case fold, map P*/S* to spaces, keep only alphanumeric runs as words.
std::vector<std::string> normalized_words(std::string_view s);

}  // namespace corpuskit::text
