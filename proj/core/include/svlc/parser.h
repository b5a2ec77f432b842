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

#ifndef SVLC_PARSER_H_
#define SVLC_PARSER_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace svlc {

class SvlcLexicon;

enum class Pos { kNoun, kVerb, kAdj, kAdv, kAdp, kDet, kOther };

std::string_view to_string(Pos pos);
std::optional<Pos> parse_pos(std::string_view name);

// Byte range [begin, end) into the caption.
struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const CharSpan&) const = default;
};

struct Token {
  std::string text;
  CharSpan span;
};

struct TaggedToken {
  std::string text;
  Pos pos = Pos::kOther;
  CharSpan span;
};

// Whitespace split; trailing . , ! ? ; : are detached as separate tokens.
std::vector<Token> tokenize_with_spans(std::string_view caption);
std::vector<std::string> tokenize(std::string_view caption);

// Replaces the bytes covered by `span` with `replacement`.
std::string splice(std::string_view caption, CharSpan span, std::string_view replacement);

class PosTagger {
 public:
  virtual ~PosTagger() = default;
  virtual std::vector<TaggedToken> tag(std::string_view caption) const = 0;
};

// Heuristic tagger. Precedence: closed-class word table, lexicon adjectives,
// suffixes (-ing/-ed verbs, -ly adverbs), then NOUN.
class BuiltinTagger : public PosTagger {
 public:
  // Adjectives come from every lexicon except the action list.
  explicit BuiltinTagger(const std::vector<SvlcLexicon>& lexicons);
  BuiltinTagger();

  std::vector<TaggedToken> tag(std::string_view caption) const override;
  Pos tag_word(std::string_view word) const;

 private:
  std::unordered_map<std::string, Pos> adjectives_;
};

// Aligns externally produced (text, pos) pairs with the caption to recover
// byte spans. Throws FormatError if the texts cannot be located in order.
std::vector<TaggedToken> align_tags(std::string_view caption,
                                    const std::vector<std::pair<std::string, Pos>>& tags);

}  // namespace svlc

#endif  // SVLC_PARSER_H_
