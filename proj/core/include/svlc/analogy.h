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

#ifndef SVLC_ANALOGY_H_
#define SVLC_ANALOGY_H_

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "svlc/corpus.h"
#include "svlc/service.h"

namespace svlc {

inline constexpr int kDefaultMaxTokens = 40;
inline constexpr std::size_t kDefaultMinAnalogyTokens = 3;

// The four in-context analogy pairs, each ending in ". ".
extern const std::string_view kAnalogyPromptPrefix;
inline constexpr std::string_view kAnalogyConnector = " is semantic similar to ";

class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  // Returns only the continuation. Throws TransportError on failure.
  virtual std::string complete(const std::string& prompt, int max_tokens) const = 0;
};

// Client for `POST /complete`.
class HttpCompletionClient : public CompletionClient {
 public:
  explicit HttpCompletionClient(ServiceOptions options);
  ~HttpCompletionClient() override;

  std::string complete(const std::string& prompt, int max_tokens) const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::string build_prompt(std::string_view caption);

// Cuts the completion at its first period and trims it. Rejects empty
// results, echoes of the caption (ignoring case) and anything shorter than
// `min_tokens` whitespace-separated words.
std::optional<GeneratedText> parse_completion(std::string_view raw, std::string_view original_caption,
                                              std::size_t min_tokens = kDefaultMinAnalogyTokens);

struct AnalogyOptions {
  int max_tokens = kDefaultMaxTokens;
  std::size_t min_tokens = kDefaultMinAnalogyTokens;
};

std::optional<GeneratedText> llm_positive(const CaptionRecord& record, const CompletionClient& client,
                                          const AnalogyOptions& options = {});

}  // namespace svlc

#endif  // SVLC_ANALOGY_H_
