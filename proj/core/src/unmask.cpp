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

#include "svlc/unmask.h"

#include <algorithm>
#include <array>
#include <cctype>

#include "json_endpoint.h"

namespace svlc {

namespace {

constexpr std::array<Pos, 4> kMaskableClasses{Pos::kNoun, Pos::kVerb, Pos::kAdj, Pos::kAdv};

bool is_alphabetic(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalpha(c) != 0; });
}

}  // namespace

struct HttpFillMaskClient::Impl {
  detail::JsonEndpoint endpoint;
};

HttpFillMaskClient::HttpFillMaskClient(ServiceOptions options)
    : impl_(std::make_unique<Impl>(Impl{detail::JsonEndpoint(std::move(options))})) {}

HttpFillMaskClient::~HttpFillMaskClient() = default;

std::vector<UnmaskCandidate> HttpFillMaskClient::unmask(const std::string& masked_text,
                                                        int top_k) const {
  auto reply = impl_->endpoint.post("/unmask", {{"text", masked_text}, {"top_k", top_k}});
  std::vector<UnmaskCandidate> out;
  try {
    for (const auto& c : reply.at("candidates")) {
      out.push_back({c.at("token").get<std::string>(), c.value("score", 0.0)});
    }
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed /unmask response: ") + e.what());
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.score > b.score; });
  if (top_k > 0 && out.size() > static_cast<std::size_t>(top_k)) out.resize(static_cast<std::size_t>(top_k));
  return out;
}

struct HttpTagger::Impl {
  detail::JsonEndpoint endpoint;
};

HttpTagger::HttpTagger(ServiceOptions options)
    : impl_(std::make_unique<Impl>(Impl{detail::JsonEndpoint(std::move(options))})) {}

HttpTagger::~HttpTagger() = default;

std::vector<TaggedToken> HttpTagger::tag(std::string_view caption) const {
  auto reply = impl_->endpoint.post("/tag", {{"text", std::string(caption)}});
  std::vector<std::pair<std::string, Pos>> tags;
  try {
    for (const auto& t : reply.at("tokens")) {
      auto pos = parse_pos(t.at("pos").get<std::string>());
      tags.emplace_back(t.at("text").get<std::string>(), pos.value_or(Pos::kOther));
    }
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed /tag response: ") + e.what());
  }
  try {
    return align_tags(caption, tags);
  } catch (const FormatError& e) {
    throw TransportError(e.what());
  }
}

std::vector<std::string> filter_candidates(const std::vector<UnmaskCandidate>& candidates,
                                           std::string_view original) {
  std::vector<std::string> out;
  for (const auto& c : candidates) {
    auto token = trim(c.token);
    if (!is_alphabetic(token) || iequals(token, original)) continue;
    if (std::find(out.begin(), out.end(), token) != out.end()) continue;
    out.emplace_back(token);
  }
  return out;
}

std::optional<GeneratedText> llm_negative(const CaptionRecord& record, const PosTagger& tagger,
                                          const FillMaskClient& client, Rng& rng, int top_k) {
  if (top_k < 2) throw DomainError("top_k must be at least 2");
  // A literal placeholder already in the caption would make the query ambiguous.
  if (record.caption.find(kMaskToken) != std::string::npos) return std::nullopt;
  const auto tagged = tagger.tag(record.caption);

  std::vector<Pos> present;
  for (Pos p : kMaskableClasses) {
    bool found = std::any_of(tagged.begin(), tagged.end(),
                             [&](const TaggedToken& t) { return t.pos == p && is_alphabetic(t.text); });
    if (found) present.push_back(p);
  }
  if (present.empty()) return std::nullopt;
  const Pos chosen_class = present[rng.uniform_index(present.size())];

  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < tagged.size(); ++i) {
    if (tagged[i].pos == chosen_class && is_alphabetic(tagged[i].text)) members.push_back(i);
  }
  const std::size_t index = members[rng.uniform_index(members.size())];
  const TaggedToken& target = tagged[index];

  const std::string masked = splice(record.caption, target.span, kMaskToken);
  auto survivors = filter_candidates(client.unmask(masked, top_k), target.text);
  if (survivors.empty()) return std::nullopt;
  std::string replacement = survivors[rng.uniform_index(survivors.size())];

  GeneratedText out;
  out.text = splice(record.caption, target.span, replacement);
  out.method = Method::kLlmUnmask;
  out.replaced_word = target.text;
  out.replacement_word = std::move(replacement);
  out.token_index = index;
  return out;
}

}  // namespace svlc
