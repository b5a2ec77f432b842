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

#include "svlc/lexicon.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "builtin_lexicon_data.h"
#include "svlc/parser.h"

namespace svlc {

SvlcLexicon::SvlcLexicon(SvlcType type, std::vector<std::string> words) : type_(type) {
  if (type == SvlcType::kSpatialRelation || type == SvlcType::kActionRelation) {
    throw DomainError("no substitution lexicon for type " + std::string(to_string(type)));
  }
  std::unordered_set<std::string> seen;
  for (auto& w : words) {
    std::string lw = ascii_lower(trim(w));
    if (lw.empty()) continue;
    if (std::any_of(lw.begin(), lw.end(), [](unsigned char c) { return std::isspace(c); })) {
      throw DomainError("lexicon word contains whitespace: '" + lw + "'");
    }
    if (seen.insert(lw).second) words_.push_back(std::move(lw));
  }
  if (words_.size() < 2) {
    throw DomainError("lexicon " + std::string(to_string(type)) + " needs at least two words");
  }
}

bool SvlcLexicon::contains(std::string_view word) const {
  std::string lw = ascii_lower(word);
  return std::find(words_.begin(), words_.end(), lw) != words_.end();
}

SvlcLexicon parse_lexicon(SvlcType type, std::string_view text) {
  std::vector<std::string> words;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto word = trim(line);
    if (!word.empty()) words.emplace_back(word);
  }
  return SvlcLexicon(type, std::move(words));
}

SvlcLexicon load_lexicon_file(SvlcType type, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read lexicon file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_lexicon(type, buf.str());
}

const std::vector<SvlcLexicon>& builtin_lexicons() {
  static const std::vector<SvlcLexicon> lexicons = [] {
    std::vector<SvlcLexicon> out;
    for (const auto& entry : generated::kBuiltinLexicons) {
      out.push_back(parse_lexicon(*parse_svlc_type(entry.type), entry.text));
    }
    return out;
  }();
  return lexicons;
}

const SvlcLexicon& builtin_lexicon(SvlcType type) {
  for (const auto& lex : builtin_lexicons()) {
    if (lex.type() == type) return lex;
  }
  throw DomainError("no builtin lexicon for " + std::string(to_string(type)));
}

std::string match_case(std::string_view model, std::string_view word) {
  std::size_t letters = 0, upper = 0;
  for (unsigned char c : model) {
    if (std::isalpha(c)) {
      ++letters;
      if (std::isupper(c)) ++upper;
    }
  }
  if (letters > 1 && upper == letters) return ascii_upper(word);
  std::string out = ascii_lower(word);
  if (!model.empty() && std::isupper(static_cast<unsigned char>(model.front())) && !out.empty()) {
    out.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(out.front())));
  }
  return out;
}

std::optional<GeneratedText> rb_negative(const CaptionRecord& record, const SvlcLexicon& lexicon,
                                         Rng& rng, MatchPolicy policy) {
  const auto tokens = tokenize_with_spans(record.caption);
  std::vector<std::size_t> matches;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (lexicon.contains(tokens[i].text)) {
      matches.push_back(i);
      if (policy == MatchPolicy::kFirst) break;
    }
  }
  if (matches.empty()) return std::nullopt;

  std::size_t pick = matches.size() == 1 ? matches.front() : matches[rng.uniform_index(matches.size())];
  const Token& target = tokens[pick];
  const auto& words = lexicon.words();
  const std::string original = ascii_lower(target.text);

  // Uniform over the lexicon minus the matched word: draw from n-1 slots and
  // skip over the original's position.
  auto orig_pos = static_cast<std::size_t>(
      std::find(words.begin(), words.end(), original) - words.begin());
  std::size_t draw = rng.uniform_index(words.size() - 1);
  if (draw >= orig_pos) ++draw;

  std::string replacement = match_case(target.text, words[draw]);

  GeneratedText out;
  out.text = splice(record.caption, target.span, replacement);
  out.method = Method::kRuleBased;
  out.svlc_type = lexicon.type();
  out.replaced_word = target.text;
  out.replacement_word = std::move(replacement);
  out.token_index = pick;
  return out;
}

}  // namespace svlc
