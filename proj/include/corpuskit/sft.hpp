// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corpuskit/bpe.hpp"
#include "corpuskit/corpus.hpp"
#include "corpuskit/lang_id.hpp"

namespace corpuskit::sft {

enum class AnswerFormat { letter, number, full_answer };

std::string_view to_string(AnswerFormat f);
AnswerFormat answer_format_from_string(std::string_view s);

struct SftSample {
  std::string id;
  std::string instruction;
  std::optional<std::string> input;
  std::string response;
  std::string lang = "und";
  AnswerFormat answer_format = AnswerFormat::full_answer;
  std::string instruction_lang = "und";

  bool operator==(const SftSample&) const = default;
};

struct WrapTemplate {
  std::string bos = "<|start_of_sequence|>";
  std::string im_start = "<|im_start|>";
  std::string im_end = "<|im_end|>";
  std::string eos = "<|end_of_sequence|>";
  // Between instruction and optional input.
  std::string separator = "\n";
  // Puts one space on each side of the instruction and response blocks, as
  // in typeset renderings of the template.
  bool spaced_markers = false;

  std::vector<std::string> markers() const { return {bos, im_start, im_end, eos}; }
  void validate() const;
};

/// bos + im_start + instruction [+ separator + input] + im_end + response + eos.
/// Throws if a field is empty where required, contains a marker, or if the
/// instruction contains the separator (which would make unwrap ambiguous).
std::string wrap(const SftSample& sample, const WrapTemplate& tpl = {});

/// Inverse of wrap. Only instruction, input and response are recovered.
SftSample unwrap(std::string_view wrapped, const WrapTemplate& tpl = {});

struct WrappedSample {
  std::string text;
  std::size_t token_count = 0;
  // Index of the first token after im_end; trainers mask the loss before it.
  std::size_t response_start = 0;
};

/// Throws if the tokenizer does not have the template markers as specials.
WrappedSample wrap_tokenized(const SftSample& sample, const bpe::TokenizerModel& model,
                             const WrapTemplate& tpl = {});

inline constexpr std::size_t kDefaultMinInstructionWords = 3;
inline constexpr std::size_t kDefaultMinResponseWords = 2;

/// Keep iff the wrapped token count is <= max_len; value is the count.
FilterVerdict length_filter(const SftSample& sample, const bpe::TokenizerModel& model, std::size_t max_len,
                            const WrapTemplate& tpl = {});

FilterVerdict short_filter(const SftSample& sample, std::size_t min_instruction_words = kDefaultMinInstructionWords,
                           std::size_t min_response_words = kDefaultMinResponseWords);

/// Instruction must classify as instruction_lang and response as lang, both
/// with confidence >= min_confidence.
FilterVerdict lang_match_filter(const SftSample& sample, const lang_id::LangClassifier& clf,
                                double min_confidence = lang_id::kDefaultMinConfidence);

// JSON-lines records with instruction/input/response/lang fields.
std::string sample_to_line(const SftSample& s);
SftSample sample_from_line(std::string_view line);

}  // namespace corpuskit::sft
