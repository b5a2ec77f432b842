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

#ifndef SVLC_UNMASK_H_
#define SVLC_UNMASK_H_

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svlc/common.h"
#include "svlc/corpus.h"
#include "svlc/parser.h"
#include "svlc/service.h"

namespace svlc {

inline constexpr std::string_view kMaskToken = "<mask>";
inline constexpr int kDefaultTopK = 10;

struct UnmaskCandidate {
  std::string token;
  double score = 0.0;
};

class FillMaskClient {
 public:
  virtual ~FillMaskClient() = default;
  // `masked_text` holds exactly one kMaskToken. Returns at most top_k
  // candidates, best first. Throws TransportError on failure.
  virtual std::vector<UnmaskCandidate> unmask(const std::string& masked_text, int top_k) const = 0;
};

// Client for `POST /unmask`.
class HttpFillMaskClient : public FillMaskClient {
 public:
  explicit HttpFillMaskClient(ServiceOptions options);
  ~HttpFillMaskClient() override;

  std::vector<UnmaskCandidate> unmask(const std::string& masked_text, int top_k) const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Client for `POST /tag`; tokens are re-aligned against the caption.
class HttpTagger : public PosTagger {
 public:
  explicit HttpTagger(ServiceOptions options);
  ~HttpTagger() override;

  std::vector<TaggedToken> tag(std::string_view caption) const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Keeps alphabetic candidates that differ from `original` (ignoring case),
// drops duplicates, preserves the client's order.
std::vector<std::string> filter_candidates(const std::vector<UnmaskCandidate>& candidates,
                                           std::string_view original);

// LLM-unmasking negative: picks a content POS class present in the caption,
// then a token of that class, masks it, asks the client for fillers and
// substitutes one surviving candidate, all choices uniform. Returns nullopt
// when nothing is maskable or every candidate is filtered out.
std::optional<GeneratedText> llm_negative(const CaptionRecord& record, const PosTagger& tagger,
                                          const FillMaskClient& client, Rng& rng,
                                          int top_k = kDefaultTopK);

}  // namespace svlc

#endif  // SVLC_UNMASK_H_
