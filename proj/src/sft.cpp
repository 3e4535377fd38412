// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#include "corpuskit/sft.hpp"

#include <json.hpp>

#include <set>

#include "corpuskit/text.hpp"

namespace corpuskit::sft {

using nlohmann::json;

namespace {

void check_field(std::string_view name, std::string_view value, const WrapTemplate& tpl) {
  for (const auto& m : tpl.markers())
    if (value.find(m) != std::string_view::npos)
      throw Error("sft: " + std::string(name) + " contains template marker " + m);
}

bool consume(std::string_view& s, std::string_view prefix) {
  if (s.substr(0, prefix.size()) != prefix) return false;
  s.remove_prefix(prefix.size());
  return true;
}

bool consume_back(std::string_view& s, std::string_view suffix) {
  if (s.size() < suffix.size() || s.substr(s.size() - suffix.size()) != suffix) return false;
  s.remove_suffix(suffix.size());
  return true;
}

void require_specials(const bpe::TokenizerModel& model, const WrapTemplate& tpl) {
  for (const auto& m : tpl.markers())
    if (!model.special_id(m)) throw Error("sft: tokenizer has no special token " + m);
}

}  // namespace

std::string_view to_string(AnswerFormat f) {
  switch (f) {
    case AnswerFormat::letter: return "letter";
    case AnswerFormat::number: return "number";
    case AnswerFormat::full_answer: return "full_answer";
  }
  return "full_answer";
}

AnswerFormat answer_format_from_string(std::string_view s) {
  if (s == "letter") return AnswerFormat::letter;
  if (s == "number") return AnswerFormat::number;
  if (s == "full_answer") return AnswerFormat::full_answer;
  throw Error("unknown answer format: " + std::string(s));
}

void WrapTemplate::validate() const {
  const auto m = markers();
  std::set<std::string> distinct(m.begin(), m.end());
  if (distinct.size() != m.size()) throw Error("sft: template markers must be pairwise distinct");
  for (const auto& x : m)
    if (x.empty()) throw Error("sft: template markers must be non-empty");
  if (separator.empty()) throw Error("sft: separator must be non-empty");
}

std::string wrap(const SftSample& s, const WrapTemplate& tpl) {
  tpl.validate();
  if (s.instruction.empty()) throw Error("sft: empty instruction");
  if (s.response.empty()) throw Error("sft: empty response");
  check_field("instruction", s.instruction, tpl);
  check_field("response", s.response, tpl);
  if (s.input) check_field("input", *s.input, tpl);
  if (s.instruction.find(tpl.separator) != std::string::npos)
    throw Error("sft: instruction contains the input separator");
  const std::string pad = tpl.spaced_markers ? " " : "";
  std::string out = tpl.bos + tpl.im_start + pad + s.instruction;
  if (s.input) out += tpl.separator + *s.input;
  out += pad + tpl.im_end + pad + s.response + pad + tpl.eos;
  return out;
}

SftSample unwrap(std::string_view w, const WrapTemplate& tpl) {
  tpl.validate();
  const std::string pad = tpl.spaced_markers ? " " : "";
  if (!consume(w, tpl.bos) || !consume(w, tpl.im_start) || !consume(w, pad))
    throw Error("sft: unwrap: missing sequence header");
  if (!consume_back(w, tpl.eos) || !consume_back(w, pad)) throw Error("sft: unwrap: missing end marker");
  const auto end = w.find(pad + tpl.im_end + pad);
  if (end == std::string_view::npos) throw Error("sft: unwrap: missing im_end marker");
  SftSample s;
  std::string_view body = w.substr(0, end);
  s.response = std::string(w.substr(end + tpl.im_end.size() + 2 * pad.size()));
  const auto sep = body.find(tpl.separator);
  if (sep == std::string_view::npos) {
    s.instruction = std::string(body);
  } else {
    s.instruction = std::string(body.substr(0, sep));
    s.input = std::string(body.substr(sep + tpl.separator.size()));
  }
  return s;
}

WrappedSample wrap_tokenized(const SftSample& sample, const bpe::TokenizerModel& model, const WrapTemplate& tpl) {
  require_specials(model, tpl);
  WrappedSample w;
  w.text = wrap(sample, tpl);
  w.token_count = model.encode_with_specials(w.text).size();
  // Specials split encoding into independent segments, so the prefix
  // through im_end tokenizes the same on its own.
  const auto cut = w.text.rfind(tpl.im_end) + tpl.im_end.size();
  w.response_start = model.encode_with_specials(std::string_view(w.text).substr(0, cut)).size();
  return w;
}

FilterVerdict length_filter(const SftSample& sample, const bpe::TokenizerModel& model, std::size_t max_len,
                            const WrapTemplate& tpl) {
  const auto w = wrap_tokenized(sample, model, tpl);
  const auto n = static_cast<double>(w.token_count);
  if (w.token_count > max_len) return FilterVerdict::drop(Stage::sft_length, "max_len", n, double(max_len));
  return FilterVerdict::pass(Stage::sft_length, n);
}

FilterVerdict short_filter(const SftSample& sample, std::size_t min_instruction_words,
                           std::size_t min_response_words) {
  const auto iw = text::count_words(sample.instruction);
  if (iw < min_instruction_words)
    return FilterVerdict::drop(Stage::sft_short, "short_instruction", double(iw), double(min_instruction_words));
  const auto rw = text::count_words(sample.response);
  if (rw < min_response_words)
    return FilterVerdict::drop(Stage::sft_short, "short_response", double(rw), double(min_response_words));
  return FilterVerdict::pass(Stage::sft_short, double(rw));
}

FilterVerdict lang_match_filter(const SftSample& sample, const lang_id::LangClassifier& clf,
                                double min_confidence) {
  for (const auto* tag : {&sample.lang, &sample.instruction_lang})
    if (!clf.has_label(*tag)) throw Error("sft: classifier has no label " + *tag);
  constexpr auto stage = Stage::sft_lang_mismatch;
  const auto ip = clf.classify(sample.instruction);
  if (!ip.determined || ip.lang != sample.instruction_lang)
    return FilterVerdict::drop(stage, "instruction_lang", ip.confidence, min_confidence);
  const auto rp = clf.classify(sample.response);
  if (!rp.determined || rp.lang != sample.lang)
    return FilterVerdict::drop(stage, "response_lang", rp.confidence, min_confidence);
  const double conf = std::min(ip.confidence, rp.confidence);
  if (conf < min_confidence) return FilterVerdict::drop(stage, "low_confidence", conf, min_confidence);
  return FilterVerdict::pass(stage, conf);
}

std::string sample_to_line(const SftSample& s) {
  json j = {{"id", s.id},
            {"instruction", s.instruction},
            {"response", s.response},
            {"lang", s.lang},
            {"instruction_lang", s.instruction_lang},
            {"answer_format", to_string(s.answer_format)}};
  if (s.input) j["input"] = *s.input;
  return j.dump();
}

SftSample sample_from_line(std::string_view line) {
  const json j = json::parse(line);
  SftSample s;
  s.id = j.value("id", "");
  s.instruction = j.at("instruction").get<std::string>();
  if (j.contains("input") && !j["input"].is_null()) s.input = j["input"].get<std::string>();
  s.response = j.at("response").get<std::string>();
  s.lang = j.value("lang", "und");
  s.instruction_lang = j.value("instruction_lang", s.lang);
  s.answer_format = answer_format_from_string(j.value("answer_format", "full_answer"));
  return s;
}

}  // namespace corpuskit::sft
