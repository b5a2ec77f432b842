//
// Copyright 2026 The svlc-kit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "svlc/parser.h"

#include <array>
#include <cctype>
#include <utility>

#include "svlc/common.h"
#include "svlc/corpus.h"
#include "svlc/lexicon.h"

namespace svlc {

namespace {

constexpr std::string_view kDetachable = ".,!?;:";

constexpr std::array<std::pair<Pos, std::string_view>, 7> kPosNames{{
    {Pos::kNoun, "NOUN"},
    {Pos::kVerb, "VERB"},
    {Pos::kAdj, "ADJ"},
    {Pos::kAdv, "ADV"},
    {Pos::kAdp, "ADP"},
    {Pos::kDet, "DET"},
    {Pos::kOther, "OTHER"},
}};

const std::unordered_map<std::string, Pos>& closed_class() {
  static const auto* table = [] {
    auto* t = new std::unordered_map<std::string, Pos>;
    for (const char* w : {"a", "an", "the", "this", "that", "these", "those", "some", "any",
                          "each", "every", "no", "my", "your", "his", "her", "its", "our",
                          "their", "another", "both", "either", "neither", "all"}) {
      (*t)[w] = Pos::kDet;
    }
    for (const char* w : {"in",     "on",      "at",      "of",     "with",  "by",     "for",
                          "from",   "to",      "into",    "onto",   "over",  "under",  "near",
                          "behind", "above",   "below",   "beside", "between", "through",
                          "across", "along",   "around",  "inside", "outside", "up",   "down",
                          "off",    "out",     "about",   "against", "among", "toward",
                          "towards", "upon",   "within",  "without", "beneath", "atop",
                          "during", "past",    "via",     "like"}) {
      (*t)[w] = Pos::kAdp;
    }
    for (const char* w : {"and",  "or",    "but",   "nor",  "so",   "yet",  "if",   "while",
                          "as",   "than",  "i",     "you",  "he",   "she",  "it",   "we",
                          "they", "me",    "him",   "us",   "them", "who",  "whom", "which",
                          "what", "there", "here",  "is",   "are",  "was",  "were", "be",
                          "been", "am",    "not",   "one",  "two",  "three", "four", "five",
                          "six",  "seven", "eight", "nine", "ten",  "can",  "will", "would",
                          "should", "could", "may", "might", "must", "do", "does", "did",
                          "has",  "have",  "had",   "'s"}) {
      (*t)[w] = Pos::kOther;
    }
    return t;
  }();
  return *table;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool has_alpha(std::string_view s) {
  for (unsigned char c : s) {
    if (std::isalpha(c)) return true;
  }
  return false;
}

}  // namespace

std::string_view to_string(Pos pos) {
  for (const auto& [p, name] : kPosNames) {
    if (p == pos) return name;
  }
  return "OTHER";
}

std::optional<Pos> parse_pos(std::string_view name) {
  std::string upper = ascii_upper(name);
  for (const auto& [p, n] : kPosNames) {
    if (n == upper) return p;
  }
  // Common coarse tags from external taggers that map onto our partition.
  if (upper == "PROPN") return Pos::kNoun;
  if (upper == "AUX") return Pos::kVerb;
  return std::nullopt;
}

std::vector<Token> tokenize_with_spans(std::string_view caption) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < caption.size()) {
    while (i < caption.size() && std::isspace(static_cast<unsigned char>(caption[i]))) ++i;
    if (i >= caption.size()) break;
    std::size_t start = i;
    while (i < caption.size() && !std::isspace(static_cast<unsigned char>(caption[i]))) ++i;
    std::size_t end = i;

    std::size_t word_end = end;
    while (word_end > start && kDetachable.find(caption[word_end - 1]) != std::string_view::npos) {
      --word_end;
    }
    if (word_end > start) {
      tokens.push_back({std::string(caption.substr(start, word_end - start)), {start, word_end}});
    }
    for (std::size_t p = word_end; p < end; ++p) {
      tokens.push_back({std::string(1, caption[p]), {p, p + 1}});
    }
  }
  return tokens;
}

std::vector<std::string> tokenize(std::string_view caption) {
  std::vector<std::string> out;
  for (auto& t : tokenize_with_spans(caption)) out.push_back(std::move(t.text));
  return out;
}

std::string splice(std::string_view caption, CharSpan span, std::string_view replacement) {
  if (span.begin > span.end || span.end > caption.size()) {
    throw DomainError("splice: span out of range");
  }
  std::string out;
  out.reserve(caption.size() + replacement.size());
  out.append(caption.substr(0, span.begin));
  out.append(replacement);
  out.append(caption.substr(span.end));
  return out;
}

BuiltinTagger::BuiltinTagger(const std::vector<SvlcLexicon>& lexicons) {
  for (const auto& lex : lexicons) {
    if (lex.type() == SvlcType::kAction) continue;
    for (const auto& w : lex.words()) adjectives_.emplace(w, Pos::kAdj);
  }
}

BuiltinTagger::BuiltinTagger() : BuiltinTagger(builtin_lexicons()) {}

Pos BuiltinTagger::tag_word(std::string_view word) const {
  if (!has_alpha(word)) return Pos::kOther;
  std::string w = ascii_lower(word);
  if (auto it = closed_class().find(w); it != closed_class().end()) return it->second;
  if (adjectives_.count(w)) return Pos::kAdj;
  // Stem-length guards keep "thing", "bed", "fly" from being caught.
  if (ends_with(w, "ing") && w.size() >= 6) return Pos::kVerb;
  if (ends_with(w, "ed") && w.size() >= 5) return Pos::kVerb;
  if (ends_with(w, "ly") && w.size() >= 5) return Pos::kAdv;
  return Pos::kNoun;
}

std::vector<TaggedToken> BuiltinTagger::tag(std::string_view caption) const {
  std::vector<TaggedToken> out;
  for (auto& t : tokenize_with_spans(caption)) {
    Pos pos = tag_word(t.text);
    out.push_back({std::move(t.text), pos, t.span});
  }
  return out;
}

std::vector<TaggedToken> align_tags(std::string_view caption,
                                    const std::vector<std::pair<std::string, Pos>>& tags) {
  std::vector<TaggedToken> out;
  std::size_t cursor = 0;
  for (const auto& [text, pos] : tags) {
    if (text.empty()) throw FormatError("tagger returned an empty token");
    auto at = caption.find(text, cursor);
    if (at == std::string_view::npos) {
      throw FormatError("tagger token '" + text + "' not found in caption");
    }
    out.push_back({text, pos, {at, at + text.size()}});
    cursor = at + text.size();
  }
  return out;
}

}  // namespace svlc
