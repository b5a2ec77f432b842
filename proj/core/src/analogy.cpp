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

#include "svlc/analogy.h"

#include <sstream>

#include "json_endpoint.h"
#include "svlc/common.h"

namespace svlc {

const std::string_view kAnalogyPromptPrefix =
    "a woman standing left to a sitting cat is semantic similar to a cat standing right to a "
    "woman. a baby crying to the right of a box is semantic similar to a box placed to the left "
    "of a crying baby. a man sitting to the right of a dog is semantic similar to a dog sitting "
    "to the left of a man. a blue boat is semantic similar to a boat that is blue. ";

struct HttpCompletionClient::Impl {
  detail::JsonEndpoint endpoint;
};

HttpCompletionClient::HttpCompletionClient(ServiceOptions options)
    : impl_(std::make_unique<Impl>(Impl{detail::JsonEndpoint(std::move(options))})) {}

HttpCompletionClient::~HttpCompletionClient() = default;

std::string HttpCompletionClient::complete(const std::string& prompt, int max_tokens) const {
  auto reply = impl_->endpoint.post("/complete", {{"prompt", prompt}, {"max_tokens", max_tokens}});
  auto it = reply.find("completion");
  if (it == reply.end() || !it->is_string()) {
    throw TransportError("malformed /complete response: missing string 'completion'");
  }
  return it->get<std::string>();
}

std::string build_prompt(std::string_view caption) {
  std::string prompt(kAnalogyPromptPrefix);
  prompt.append(caption);
  prompt.append(kAnalogyConnector);
  return prompt;
}

std::optional<GeneratedText> parse_completion(std::string_view raw, std::string_view original_caption,
                                              std::size_t min_tokens) {
  std::string text = normalize_caption(raw.substr(0, raw.find('.')));
  if (text.empty() || iequals(text, normalize_caption(original_caption))) return std::nullopt;

  std::istringstream words{text};
  std::size_t count = 0;
  for (std::string w; words >> w;) ++count;
  if (count < min_tokens) return std::nullopt;

  GeneratedText out;
  out.text = std::move(text);
  out.method = Method::kLlmPrompt;
  return out;
}

std::optional<GeneratedText> llm_positive(const CaptionRecord& record, const CompletionClient& client,
                                          const AnalogyOptions& options) {
  std::string raw = client.complete(build_prompt(record.caption), options.max_tokens);
  return parse_completion(raw, record.caption, options.min_tokens);
}

}  // namespace svlc
