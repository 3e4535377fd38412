// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#include "corpuskit/fixture.hpp"

#include <unicode/uchar.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "corpuskit/hash.hpp"
#include "corpuskit/text.hpp"

namespace corpuskit::fixture {

namespace {

struct LangData {
  std::vector<std::string> function_words;
  std::vector<std::string> syllables;
};

const std::map<std::string, LangData, std::less<>>& table() {
  static const std::map<std::string, LangData, std::less<>> t = {
      {"en",
       {{"the", "of", "and", "to", "in", "is", "that", "it", "for", "was", "on", "with", "as", "by", "at", "from",
         "this", "be", "are", "not", "have", "which", "or", "had"},
        {"th", "er", "in", "an", "re", "on", "at", "ou", "ight", "ly", "st", "ch", "wh", "or", "al", "ea", "ow",
         "ness", "tion", "ble", "ing", "ed", "ter", "com", "pro", "ver", "ex", "ple", "ment", "ous"}}},
      {"de",
       {{"der", "die", "und", "in", "den", "von", "zu", "das", "mit", "sich", "des", "auf", "für", "ist", "im", "dem",
         "nicht", "ein", "eine", "als", "auch", "es", "an", "werden"},
        {"sch", "ung", "ein", "ich", "ver", "ge", "keit", "lich", "ach", "eit", "en", "der", "tz", "ü", "ö", "ä",
         "str", "pf", "heit", "ß", "be", "zu", "auf", "ern", "wa", "gen", "te", "ke", "mä", "rü"}}},
      {"es",
       {{"de", "la", "que", "el", "en", "y", "a", "los", "del", "se", "las", "por", "un", "para", "con", "no", "una",
         "su", "al", "es", "lo", "como", "más", "pero"},
        {"ción", "ar", "os", "as", "ña", "ie", "ue", "es", "lla", "mo", "ra", "to", "do", "ci", "ó", "é", "í", "pa",
         "qui", "gu", "re", "co", "te", "mi", "ne", "que", "ía", "nte", "dad", "mente"}}},
      {"fr",
       {{"de", "la", "le", "et", "les", "des", "en", "un", "du", "une", "que", "est", "pour", "qui", "dans", "par",
         "plus", "pas", "au", "sur", "ne", "se", "ce", "il"},
        {"eau", "ou", "oi", "ai", "é", "è", "ç", "ê", "ment", "tion", "eur", "ie", "qu", "ch", "ge", "ant", "on",
         "re", "té", "ll", "ois", "ence", "ier", "aux", "gne", "ire", "pré", "con", "em", "ble"}}},
      {"it",
       {{"di", "e", "il", "la", "che", "in", "a", "per", "un", "del", "non", "una", "con", "le", "si", "da", "è",
         "della", "sono", "gli", "nel", "come", "anche", "più"},
        {"zz", "gli", "cci", "ò", "à", "zione", "tt", "ll", "gn", "ia", "io", "ri", "to", "ta", "no", "ne", "co",
         "chi", "sc", "pe", "ssi", "mente", "tà", "vo", "do", "ca", "lu", "pi", "re", "ti"}}},
      {"nl",
       {{"de", "van", "het", "een", "en", "in", "is", "dat", "op", "te", "zijn", "voor", "met", "die", "niet", "aan",
         "er", "om", "ook", "als", "bij", "of", "dan", "nog"},
        {"ij", "oe", "aa", "ui", "sch", "ee", "oo", "ge", "lijk", "heid", "en", "ver", "ing", "cht", "gen", "ke",
         "uw", "eu", "ie", "ou", "be", "tje", "kk", "zij", "wa", "dr", "ro", "la", "te", "vo"}}},
      {"pt",
       {{"de", "a", "o", "que", "e", "do", "da", "em", "um", "para", "é", "com", "não", "uma", "os", "no", "se",
         "na", "por", "mais", "as", "dos", "como", "mas"},
        {"ção", "ões", "ão", "nh", "lh", "ç", "ê", "á", "õ", "mente", "ei", "ou", "ra", "to", "do", "ca", "pa",
         "ma", "ri", "te", "co", "que", "gu", "se", "di", "vo", "ção", "dade", "ar", "os"}}},
      {"pl",
       {{"i", "w", "na", "z", "się", "nie", "do", "to", "że", "jest", "o", "jak", "a", "po", "co", "tak", "za", "od",
         "ale", "przez", "by", "są", "dla", "już"},
        {"rz", "sz", "cz", "ą", "ę", "ł", "ś", "ć", "ż", "ź", "ni", "ow", "ski", "prz", "wie", "sta", "ko", "go",
         "dz", "ja", "mi", "ny", "ła", "rze", "ści", "ach", "em", "po", "wy", "cy"}}},
      {"sv",
       {{"och", "i", "att", "det", "som", "en", "på", "är", "av", "för", "med", "till", "den", "har", "de", "inte",
         "om", "ett", "var", "jag", "men", "så", "kan", "vid"},
        {"å", "ä", "ö", "sj", "kj", "tt", "ll", "ng", "ska", "het", "ning", "lig", "er", "ar", "or", "sk", "tj",
         "gö", "fö", "rå", "bl", "st", "na", "de", "ta", "va", "li", "ke", "ig", "en"}}},
      {"cs",
       {{"a", "v", "se", "na", "je", "že", "s", "z", "do", "to", "o", "i", "jako", "pro", "by", "ale", "po", "od",
         "jsou", "k", "tak", "být", "jeho", "které"},
        {"ř", "č", "š", "ž", "ě", "ů", "ý", "á", "í", "ch", "ov", "ní", "st", "pr", "ost", "ky", "ti", "né", "vá",
         "zá", "kr", "dn", "le", "sk", "va", "ce", "ro", "mi", "tě", "ná"}}},
      {"fi",
       {{"ja", "on", "ei", "että", "se", "hän", "oli", "ovat", "mutta", "kun", "niin", "myös", "tai", "jos", "kuin",
         "vain", "tämä", "sen", "ole", "jo", "hyvin", "mitä", "nyt", "sitä"},
        {"aa", "ää", "kk", "tt", "yy", "ö", "ssa", "llä", "lla", "sta", "nen", "inen", "ka", "ko", "ta", "ti", "va",
         "pa", "lu", "mi", "sa", "ke", "hä", "yö", "uo", "ie", "ja", "ri", "no", "ku"}}},
      {"bg",
       {{"и", "на", "да", "в", "се", "е", "за", "от", "с", "не", "че", "по", "са", "до", "как", "това", "но", "като",
         "той", "при", "или", "ще", "си", "след"},
        {"ст", "ни", "то", "ва", "ра", "ко", "ли", "ще", "ъ", "ж", "ч", "ш", "щ", "ия", "ен", "ов", "ка", "та",
         "не", "пр", "бъ", "ду", "зи", "ме", "ло", "ри", "на", "ски", "ност", "ата"}}},
      {"el",
       {{"και", "το", "να", "η", "της", "του", "σε", "με", "για", "τα", "την", "που", "ο", "από", "οι", "των", "στο",
         "είναι", "θα", "δεν", "ένα", "στην", "αυτό", "μια"},
        {"ου", "αι", "ει", "οι", "ση", "τη", "κα", "πο", "λα", "μα", "ρο", "νε", "ία", "ός", "ής", "ά", "έ", "ί",
         "ό", "ύ", "ώ", "στ", "θε", "χρ", "ψη", "ξι", "γε", "δι", "φα", "ντ"}}},
  };
  return t;
}

const LangData& data_for(std::string_view lang) {
  auto it = table().find(lang);
  if (it == table().end()) throw Error("fixture: unsupported language " + std::string(lang));
  return it->second;
}

std::string capitalize(std::string_view w) {
  auto cps = text::decode_utf8(w);
  if (!cps.empty()) cps[0] = static_cast<char32_t>(u_toupper(static_cast<UChar32>(cps[0])));
  return text::encode_utf8(cps);
}

}  // namespace

const std::vector<std::string>& languages() {
  static const std::vector<std::string> langs = {"en", "de", "es", "fr", "it", "nl", "pt",
                                                 "pl", "sv", "cs", "fi", "bg", "el"};
  return langs;
}

const std::vector<std::string>& function_words(std::string_view lang) { return data_for(lang).function_words; }

std::uint64_t Rng::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix64(state_);
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::size_t Rng::below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(next() % n); }

TextGenerator::TextGenerator(std::size_t lexicon_size, double zipf_exponent)
    : lexicon_size_(lexicon_size), zipf_exponent_(zipf_exponent) {
  if (lexicon_size_ == 0) throw Error("fixture: empty lexicon");
  for (const auto& lang : languages()) {
    const auto& d = data_for(lang);
    Rng rng(hash64(lang, 0x1e71c0));
    std::set<std::string> seen(d.function_words.begin(), d.function_words.end());
    Lexicon lex;
    std::size_t attempts = 0;
    while (lex.words.size() < lexicon_size_ && attempts < lexicon_size_ * 50) {
      ++attempts;
      const double r = rng.uniform();
      const std::size_t syllables = r < 0.25 ? 1 : r < 0.65 ? 2 : r < 0.9 ? 3 : 4;
      std::string w;
      for (std::size_t s = 0; s < syllables; ++s) w += d.syllables[rng.below(d.syllables.size())];
      if (text::decode_utf8(w).size() < 2 || !seen.insert(w).second) continue;
      lex.words.push_back(std::move(w));
    }
    double acc = 0.0;
    for (std::size_t r = 0; r < lex.words.size(); ++r) {
      acc += 1.0 / std::pow(static_cast<double>(r + 1), zipf_exponent_);
      lex.cumulative.push_back(acc);
    }
    lexicons_.emplace_back(lang, std::move(lex));
  }
}

const TextGenerator::Lexicon& TextGenerator::lexicon(std::string_view lang) const {
  for (const auto& [l, lex] : lexicons_)
    if (l == lang) return lex;
  throw Error("fixture: unsupported language " + std::string(lang));
}

std::string TextGenerator::word(std::string_view lang, Rng& rng) const {
  const auto& fw = data_for(lang).function_words;
  if (rng.uniform() < 0.4) {
    // Earlier function words are more frequent.
    const std::size_t a = rng.below(fw.size());
    const std::size_t b = rng.below(fw.size());
    return fw[std::min(a, b)];
  }
  const auto& lex = lexicon(lang);
  const double x = rng.uniform() * lex.cumulative.back();
  const auto it = std::upper_bound(lex.cumulative.begin(), lex.cumulative.end(), x);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - lex.cumulative.begin()), lex.words.size() - 1);
  return lex.words[idx];
}

std::string TextGenerator::sentence(std::string_view lang, Rng& rng) const {
  const std::size_t n = 6 + rng.below(11);
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string w = rng.uniform() < 0.02 ? std::to_string(1 + rng.below(2025)) : word(lang, rng);
    if (i == 0) {
      out += capitalize(w);
    } else {
      out += " " + w;
    }
    if (i + 1 < n && rng.uniform() < 0.08) out += ",";
  }
  out += rng.uniform() < 0.05 ? "?" : ".";
  return out;
}

std::string TextGenerator::paragraph(std::string_view lang, Rng& rng) const {
  const std::size_t n = 3 + rng.below(4);
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += " ";
    out += sentence(lang, rng);
  }
  return out;
}

std::string TextGenerator::document(std::string_view lang, Rng& rng, std::size_t paragraphs) const {
  std::string out;
  for (std::size_t i = 0; i < paragraphs; ++i) {
    if (i) out += "\n\n";
    out += paragraph(lang, rng);
  }
  return out;
}

std::vector<Document> TextGenerator::corpus(std::string_view lang, std::size_t bytes, std::uint64_t seed,
                                            std::string_view id_prefix) const {
  Rng rng(hash_combine(seed, hash64(lang)));
  std::vector<Document> docs;
  std::size_t produced = 0;
  while (produced < bytes) {
    Document d;
    d.id = std::string(id_prefix) + std::string(lang) + "-" + std::to_string(docs.size());
    d.lang = std::string(lang);
    d.source = "fixture";
    d.text = document(lang, rng, 2 + rng.below(3));
    produced += d.text.size();
    docs.push_back(std::move(d));
  }
  return docs;
}

}  // namespace corpuskit::fixture
