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

#include <chrono>
#include <map>

#include "doctest.h"
#include "stub_services.h"

using namespace svlc;
using svlc::testing::StubServer;

namespace {

ServiceOptions fast_options(const std::string& url) {
  ServiceOptions o;
  o.endpoint = url;
  o.initial_backoff = std::chrono::milliseconds(1);
  o.timeout = std::chrono::seconds(5);
  return o;
}

// Returns a fixed candidate list and remembers the last query.
class ScriptedFillMask : public FillMaskClient {
 public:
  explicit ScriptedFillMask(std::vector<UnmaskCandidate> c) : candidates_(std::move(c)) {}
  std::vector<UnmaskCandidate> unmask(const std::string& masked, int) const override {
    last_query = masked;
    ++calls;
    return candidates_;
  }
  mutable std::string last_query;
  mutable int calls = 0;

 private:
  std::vector<UnmaskCandidate> candidates_;
};

const CaptionRecord kKids{"0", "kids.jpg", "Two kids playing in the park"};

}  // namespace

TEST_CASE("filter_candidates") {
  std::vector<UnmaskCandidate> c{{"sitting", .9}, {"Playing", .8}, {" eating ", .7}, {"##s", .6},
                                 {",", .5},       {"", .4},        {"sitting", .3}, {"re-run", .2}};
  CHECK(filter_candidates(c, "playing") == std::vector<std::string>{"sitting", "eating"});
  CHECK(filter_candidates({}, "x").empty());
}

TEST_CASE("masked query and replacement for a two-kids caption") {
  BuiltinTagger tagger;
  ScriptedFillMask client({{"sitting", .5}, {"playing", .4}, {"eating", .3}, {"drawing", .2}, {"running", .1}});
  int verb_hits = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    Rng rng(seed);
    auto g = llm_negative(kKids, tagger, client, rng);
    REQUIRE(g);
    CHECK(g->method == Method::kLlmUnmask);
    CHECK_FALSE(g->svlc_type);
    CHECK(g->replacement_word != g->replaced_word);
    if (client.last_query == "Two kids <mask> in the park") {
      ++verb_hits;
      CHECK(g->replaced_word == "playing");
      CHECK(g->token_index == 2u);
      CHECK(*g->replacement_word != "playing");
      CHECK(g->text == "Two kids " + *g->replacement_word + " in the park");
    }
  }
  // Two classes are present (NOUN, VERB); the verb is chosen about half the time.
  CHECK(verb_hits > 150);
  CHECK(verb_hits < 250);
}

TEST_CASE("replacement choice is uniform over surviving candidates") {
  // A caption whose only content word is a verb pins the masked position.
  struct VerbOnly : PosTagger {
    std::vector<TaggedToken> tag(std::string_view caption) const override {
      return align_tags(caption, {{"the", Pos::kDet}, {"running", Pos::kVerb}});
    }
  } tagger;
  ScriptedFillMask client({{"walking", .5}, {"running", .4}, {"jumping", .3}, {"sitting", .2}, {"##x", .1}});
  std::map<std::string, int> counts;
  const int n = 8000;
  for (int i = 0; i < n; ++i) {
    Rng rng(static_cast<std::uint64_t>(i) * 7919u + 1u);
    ++counts[*llm_negative({"0", "x", "the running"}, tagger, client, rng)->replacement_word];
  }
  REQUIRE(counts.size() == 3);
  double chi2 = 0.0;
  const double expected = n / 3.0;
  for (const auto& [word, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 2 degrees of freedom, p = 0.001 critical value.
  CHECK(chi2 < 13.82);
}

TEST_CASE("llm_negative edge cases") {
  BuiltinTagger tagger;
  Rng rng(1);
  ScriptedFillMask only_original({{"playing", .9}, {"PLAYING", .8}, {"12", .1}});
  CHECK_FALSE(llm_negative({"0", "x", "the of and"}, tagger, only_original, rng));
  CHECK(only_original.calls == 0);
  CHECK_FALSE(llm_negative({"0", "x", "a <mask> here"}, tagger, only_original, rng));
  CHECK_THROWS_AS(llm_negative(kKids, tagger, only_original, rng, 1), DomainError);

  // Every candidate filtered away yields no negative.
  struct PlayingOnly : PosTagger {
    std::vector<TaggedToken> tag(std::string_view caption) const override {
      return align_tags(caption, {{"playing", Pos::kVerb}});
    }
  };
  CHECK_FALSE(llm_negative({"0", "x", "playing"}, PlayingOnly{}, only_original, rng));
  CHECK(only_original.calls == 1);
}

TEST_CASE("HTTP fill-mask client wire format") {
  StubServer server;
  svlc::testing::install_default_handlers(server);
  HttpFillMaskClient client(fast_options(server.url()));

  auto got = client.unmask("Two kids <mask> in the park", 10);
  REQUIRE(server.requests("/unmask").size() == 1);
  CHECK(server.requests("/unmask")[0] ==
        nlohmann::json{{"text", "Two kids <mask> in the park"}, {"top_k", 10}});
  REQUIRE(got.size() == 8);
  CHECK(got[0].token == "sitting");
  CHECK(filter_candidates(got, "playing") == std::vector<std::string>{"sitting", "eating", "drawing", "running"});

  SUBCASE("results are re-sorted and truncated to top_k") {
    server.on("/unmask", [](const nlohmann::json&) {
      return nlohmann::json{{"candidates", {{{"token", "low"}, {"score", 0.1}}, {{"token", "high"}, {"score", 0.9}},
                                            {{"token", "mid"}, {"score", 0.5}}}}};
    });
    auto c = client.unmask("a <mask>", 2);
    REQUIRE(c.size() == 2);
    CHECK(c[0].token == "high");
    CHECK(c[1].token == "mid");
  }
  SUBCASE("transient failures are retried") {
    server.fail_next("/unmask", 2);
    CHECK(client.unmask("a <mask>", 5).size() == 5);
    CHECK(server.hits("/unmask") == 4);
  }
  SUBCASE("persistent failure surfaces after three attempts") {
    server.fail_next("/unmask", 3);
    CHECK_THROWS_AS(client.unmask("a <mask>", 5), TransportError);
    CHECK(server.hits("/unmask") == 4);
  }
  SUBCASE("malformed body") {
    server.on("/unmask", [](const nlohmann::json&) { return nlohmann::json{{"nope", 1}}; });
    CHECK_THROWS_AS(client.unmask("a <mask>", 5), TransportError);
  }
}

TEST_CASE("HTTP tagger") {
  StubServer server;
  server.on("/tag", [](const nlohmann::json& body) {
    CHECK(body.at("text") == "Two kids playing.");
    return nlohmann::json{{"tokens",
                           {{{"text", "Two"}, {"pos", "NUM"}},
                            {{"text", "kids"}, {"pos", "NOUN"}},
                            {{"text", "playing"}, {"pos", "VERB"}},
                            {{"text", "."}, {"pos", "PUNCT"}}}}};
  });
  HttpTagger tagger(fast_options(server.url()));
  auto tags = tagger.tag("Two kids playing.");
  REQUIRE(tags.size() == 4);
  CHECK(tags[0].pos == Pos::kOther);
  CHECK(tags[2].pos == Pos::kVerb);
  CHECK(tags[2].span == CharSpan{9, 16});

  server.on("/tag", [](const nlohmann::json&) {
    return nlohmann::json{{"tokens", {{{"text", "cats"}, {"pos", "NOUN"}}}}};
  });
  CHECK_THROWS_AS(tagger.tag("dogs"), TransportError);
}

TEST_CASE("unreachable endpoint") {
  ServiceOptions o = fast_options("http://127.0.0.1:1");
  o.timeout = std::chrono::seconds(1);
  HttpFillMaskClient client(o);
  CHECK_THROWS_AS(client.unmask("a <mask>", 5), TransportError);
  o.endpoint = "https://example.invalid";
  CHECK_THROWS_AS(HttpFillMaskClient{o}, DomainError);
}
