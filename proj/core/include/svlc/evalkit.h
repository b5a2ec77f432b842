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

#ifndef SVLC_EVALKIT_H_
#define SVLC_EVALKIT_H_

#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svlc/matrix.h"
#include "svlc/service.h"

namespace svlc::eval {

// Checklist categories, grouped as Object / Attribute / Relation.
enum class ChecklistType {
  kObjectLocation,
  kObjectSize,
  kAttrColor,
  kAttrMaterial,
  kAttrSize,
  kAttrState,
  kAttrAction,
  kRelationSpatial,
  kRelationAction,
};

std::string_view to_string(ChecklistType type);
std::optional<ChecklistType> parse_checklist_type(std::string_view name);

struct ChecklistItem {
  std::string image_ref;
  std::string positive;
  std::string negative;
  ChecklistType type = ChecklistType::kAttrColor;
};

// Strict reader: a malformed line, an unknown type, or positive == negative
// raises FormatError naming the line.
std::vector<ChecklistItem> read_items(std::istream& in);

class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  virtual std::size_t dim() const = 0;
  // One row per input. Implementations throw on failure.
  virtual Matrix embed_text(const std::vector<std::string>& texts) const = 0;
  virtual Matrix embed_image(const std::vector<std::string>& image_refs) const = 0;
};

// Deterministic pseudo-embeddings: each string hashes (with the seed) to a
// Gaussian vector. No semantics; exercises the plumbing.
class SyntheticBackend : public EmbeddingBackend {
 public:
  explicit SyntheticBackend(std::uint64_t seed, std::size_t dim = 64) : seed_(seed), dim_(dim) {}

  std::size_t dim() const override { return dim_; }
  Matrix embed_text(const std::vector<std::string>& texts) const override;
  Matrix embed_image(const std::vector<std::string>& image_refs) const override;

 private:
  Matrix embed(std::string_view domain, const std::vector<std::string>& inputs) const;

  std::uint64_t seed_;
  std::size_t dim_;
};

// `POST /embed/text` and `POST /embed/image`; dimension read from `GET /info`
// unless given.
class HttpEmbeddingBackend : public EmbeddingBackend {
 public:
  explicit HttpEmbeddingBackend(ServiceOptions options, std::optional<std::size_t> dim = std::nullopt);
  ~HttpEmbeddingBackend() override;

  std::size_t dim() const override { return dim_; }
  Matrix embed_text(const std::vector<std::string>& texts) const override;
  Matrix embed_image(const std::vector<std::string>& image_refs) const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::size_t dim_ = 0;
};

struct TypeStats {
  std::size_t correct = 0;
  std::size_t incorrect = 0;  // includes ties
  std::size_t ties = 0;
  std::size_t skipped = 0;
  std::size_t total = 0;      // correct + incorrect + skipped
  double accuracy = 0.0;      // correct / total
};

struct EvalReport {
  std::map<std::string, TypeStats> per_type;
  TypeStats pooled;               // every item together
  double macro_accuracy = 0.0;    // unweighted mean over present types
};

struct EvalOptions {
  double tau = 1.0;
  std::size_t batch_size = 64;
};

// An item is correct iff S(positive, image) > S(negative, image). Since S is
// exp(tau * cosine) with tau > 0, the cosines are compared directly; a tie
// is incorrect. Items whose embedding fails are skipped and counted.
EvalReport evaluate(const std::vector<ChecklistItem>& items, const EmbeddingBackend& backend,
                    const EvalOptions& options = {});

std::string report_to_json(const EvalReport& report);

}  // namespace svlc::eval

#endif  // SVLC_EVALKIT_H_
