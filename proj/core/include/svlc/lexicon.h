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

#ifndef SVLC_LEXICON_H_
#define SVLC_LEXICON_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svlc/common.h"
#include "svlc/corpus.h"

namespace svlc {

// Substitution word list for one SVLC type. Words are lowercase single
// tokens, deduplicated, at least two of them. Immutable once built.
class SvlcLexicon {
 public:
  // Lowercases and deduplicates (first occurrence wins). Throws DomainError
  // if a word contains whitespace, fewer than two words remain, or the type
  // is a relation type.
  SvlcLexicon(SvlcType type, std::vector<std::string> words);

  SvlcType type() const { return type_; }
  const std::vector<std::string>& words() const { return words_; }
  bool contains(std::string_view word) const;

 private:
  SvlcType type_;
  std::vector<std::string> words_;
};

// One word per line, `#` starts a comment, blank lines ignored.
SvlcLexicon parse_lexicon(SvlcType type, std::string_view text);
SvlcLexicon load_lexicon_file(SvlcType type, const std::filesystem::path& path);

// Color, material, size, state, action, in that order. Only the color list
// is the published one; the others are curated placeholders.
const std::vector<SvlcLexicon>& builtin_lexicons();
const SvlcLexicon& builtin_lexicon(SvlcType type);

enum class MatchPolicy {
  kFirst,    // leftmost matching token
  kUniform,  // uniformly among all matching tokens
};

// Copies the case pattern of `model` (Title, UPPER or lower) onto `word`.
std::string match_case(std::string_view model, std::string_view word);

// Rule-based negative: finds a lexicon word (whole token, case-insensitive),
// swaps it for a uniformly drawn different word from the same lexicon and
// reports the substitution. Returns nullopt when no token matches.
std::optional<GeneratedText> rb_negative(const CaptionRecord& record, const SvlcLexicon& lexicon,
                                         Rng& rng, MatchPolicy policy = MatchPolicy::kFirst);

}  // namespace svlc

#endif  // SVLC_LEXICON_H_
