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

#ifndef SVLC_CORPUS_H_
#define SVLC_CORPUS_H_

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace svlc {

enum class SvlcType {
  kColor,
  kMaterial,
  kSize,
  kState,
  kAction,
  kSpatialRelation,
  kActionRelation,
};

std::string_view to_string(SvlcType type);
std::optional<SvlcType> parse_svlc_type(std::string_view name);

enum class Method { kRuleBased, kLlmUnmask, kLlmPrompt };

std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view name);

struct CaptionRecord {
  std::string id;
  std::string image_ref;  // never dereferenced
  std::string caption;

  bool operator==(const CaptionRecord&) const = default;
};

// One generated caption. Negatives (rb, llm-unmask) carry the single-word
// substitution that produced them; prompted positives carry none.
struct GeneratedText {
  std::string text;
  Method method = Method::kRuleBased;
  std::optional<SvlcType> svlc_type;
  std::optional<std::string> replaced_word;
  std::optional<std::string> replacement_word;
  std::optional<std::size_t> token_index;

  bool operator==(const GeneratedText&) const = default;
};

struct AugmentedRecord {
  CaptionRecord source;
  std::vector<GeneratedText> negatives;
  std::vector<GeneratedText> positives;

  bool operator==(const AugmentedRecord&) const = default;
};

// Throws DomainError when a record breaks the provenance or distinctness
// rules (negative equal to source, missing substitution fields, ...).
void validate(const AugmentedRecord& record);

// Trims, then collapses every whitespace run (tabs and newlines included)
// to a single space.
std::string normalize_caption(std::string_view raw);

enum class PairFormat { kTsv, kJsonl };

std::optional<PairFormat> parse_pair_format(std::string_view name);

// Streaming reader for caption/image pair files.
//
// TSV rows are `caption<TAB>image_ref`; JSONL rows are objects with
// `caption`, `image_ref` and an optional `id`. Rows without an id get their
// zero-based line number. Malformed rows (empty, wrong field count, blank
// caption, duplicate id, bad JSON) are skipped and counted. When the stream
// is exhausted and more than half the rows were malformed, next() throws
// FormatError.
class PairReader {
 public:
  PairReader(std::istream& in, PairFormat format);

  std::optional<CaptionRecord> next();

  std::size_t lines_read() const { return line_no_; }
  std::size_t malformed() const { return malformed_; }

 private:
  std::optional<CaptionRecord> parse_line(const std::string& line);

  std::istream& in_;
  PairFormat format_;
  std::size_t line_no_ = 0;
  std::size_t malformed_ = 0;
  bool finished_ = false;
  std::unordered_set<std::string> seen_ids_;
};

// Drains a reader. Convenience for small inputs and tests.
std::vector<CaptionRecord> read_pairs(std::istream& in, PairFormat format,
                                      std::size_t* malformed = nullptr);

// One JSON object per line with a fixed key order:
// id, caption, image_ref, negatives[], positives[].
std::string to_jsonl_line(const AugmentedRecord& record);
AugmentedRecord parse_jsonl_line(std::string_view line);

class AugmentedWriter {
 public:
  explicit AugmentedWriter(std::ostream& out) : out_(out) {}

  void write(const AugmentedRecord& record);
  std::size_t count() const { return count_; }

 private:
  std::ostream& out_;
  std::size_t count_ = 0;
};

std::size_t write_augmented(const std::vector<AugmentedRecord>& records, std::ostream& out);

}  // namespace svlc

#endif  // SVLC_CORPUS_H_
