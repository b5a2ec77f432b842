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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "loss_oracle.h"
#include "stub_services.h"
#include "subprocess.h"
#include "svlc/common.h"
#include "svlc/evalkit.h"
#include "svlc/lexicon.h"
#include "svlc/lora.h"
#include "svlc/losses.h"
#include "svlc/parser.h"
#include "svlc/unmask.h"
#include "synthetic_corpus.h"

using namespace svlc;
using namespace svlc::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first failure only; later ones add nothing to the verdict.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && out_.pass) {
      out_.pass = false;
      out_.detail = what;
    }
  }
  bool ok() const { return out_.pass; }
  Outcome done(std::string detail) {
    if (out_.pass) out_.detail = std::move(detail);
    return out_;
  }

 private:
  Outcome out_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

Matrix gaussian(std::mt19937_64& gen, std::size_t r, std::size_t c) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(r, c);
  for (double& v : m.data()) v = normal(gen);
  return m;
}

// ---------------------------------------------------------------------------

Outcome rb_properties() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const auto captions = synthetic_captions(1000, 2024);
  std::size_t produced = 0, without_words = 0;
  for (std::size_t i = 0; i < captions.size() && c.ok(); ++i) {
    const CaptionRecord rec{std::to_string(i), "img", captions[i]};
    const auto before = tokenize(rec.caption);
    for (const auto& lex : builtin_lexicons()) {
      bool has_word = false;
      for (const auto& t : before) has_word = has_word || lex.contains(ascii_lower(t));
      Rng rng(derive_seed(99, rec.id));
      auto g = rb_negative(rec, lex, rng);
      if (!has_word) {
        ++without_words;
        c.expect(!g, "negative produced without a lexicon word: " + rec.caption);
        continue;
      }
      c.expect(g.has_value(), "no negative for caption with a lexicon word: " + rec.caption);
      if (!g) continue;
      ++produced;
      const auto after = tokenize(g->text);
      c.expect(after.size() == before.size(), "token count changed: " + g->text);
      if (after.size() != before.size()) continue;
      std::size_t changed = 0, where = 0;
      for (std::size_t k = 0; k < before.size(); ++k) {
        if (before[k] != after[k]) {
          ++changed;
          where = k;
        }
      }
      c.expect(changed == 1, "expected exactly one changed token: " + g->text);
      c.expect(g->token_index == where, "token_index does not mark the changed token");
      c.expect(lex.contains(ascii_lower(after[where])), "replacement not in lexicon: " + after[where]);
      c.expect(!iequals(after[where], before[where]), "replacement equals original: " + after[where]);
      c.expect(g->text != rec.caption, "negative equals caption");
    }
  }
  const double secs = seconds_since(t0);
  c.expect(produced > 0 && without_words > 0, "corpus did not exercise both branches");
  c.expect(secs < 5.0, "runtime " + fmt(secs) + " s exceeds 5 s");
  return c.done(std::to_string(produced) + " negatives over 1000 captions x 5 lexicons, " + fmt(secs) + " s");
}

Outcome worked_examples() {
  Check c;
  const std::set<std::string> published_colors{
      "teal",  "brown",  "green",  "black",    "silver", "white", "yellow", "purple",   "gray",
      "blue",  "orange", "red",    "blond",    "concrete", "cream", "beige", "tan",     "pink",
      "maroon", "olive", "violet", "charcoal", "bronze", "gold",  "navy",   "coral",    "burgundy",
      "mauve", "peach",  "rust",   "cyan",     "clay",   "ruby",  "amber"};
  c.expect(published_colors.size() == 34, "reference color list size");
  const CaptionRecord car{"0", "car.jpg", "A blue car on the road"};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    auto g = rb_negative(car, builtin_lexicon(SvlcType::kColor), rng);
    c.expect(g && g->svlc_type == SvlcType::kColor, "no color negative for the car caption");
    if (!g) break;
    c.expect(published_colors.count(*g->replacement_word) == 1, "replacement outside the color list");
    c.expect(g->text == "A " + *g->replacement_word + " car on the road", "unexpected negative text " + g->text);
  }

  StubServer server;
  install_default_handlers(server);
  ServiceOptions o;
  o.endpoint = server.url();
  HttpFillMaskClient client(o);
  BuiltinTagger tagger;
  const CaptionRecord kids{"1", "kids.jpg", "Two kids playing in the park"};
  std::size_t verb_masks = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    auto g = llm_negative(kids, tagger, client, rng);
    c.expect(g.has_value(), "no unmask negative");
    if (!g) break;
    c.expect(*g->replacement_word != *g->replaced_word, "replacement equals original");
    if (g->replaced_word == "playing") {
      ++verb_masks;
      c.expect(*g->replacement_word != "playing", "'playing' substituted back");
      c.expect(g->text.find("playing") == std::string::npos, "'playing' still present");
    }
  }
  const auto sent = server.requests("/unmask");
  std::size_t exact = 0;
  for (const auto& body : sent) {
    const std::string text = body.at("text");
    c.expect(text.find("<mask>") == text.rfind("<mask>") && text.find("<mask>") != std::string::npos,
             "query without exactly one mask: " + text);
    if (text == "Two kids <mask> in the park") ++exact;
  }
  c.expect(exact == verb_masks && exact > 0, "verb masking did not send the exact query");
  return c.done("34-word color check over 200 seeds; " + std::to_string(exact) +
                " exact 'Two kids <mask> in the park' queries");
}

Outcome loss_oracle() {
  Check c;
  std::mt19937_64 gen(77);
  double worst = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + gen() % 8;
    const std::size_t d = 2 + gen() % 15;
    const double tau = 0.5 + static_cast<double>(gen() % 1000) / 100.0;
    auto b = random_batch(gen(), n, d, true, true, /*full_masks=*/t % 2 == 0);
    LossConfig cfg{tau, 1.0, 1.0, NegMode::kSeparateLoss};
    auto compare = [&](double got, double want, const char* name) {
      double e = relative_error(got, want);
      worst = std::max(worst, e);
      c.expect(e <= 1e-12, std::string(name) + " off by " + fmt(e) + " relative on batch " + std::to_string(t));
    };
    const auto neg_mask = negative_rows(b), pos_mask = positive_rows(b);
    compare(contrastive_loss(b, cfg).value, oracle_contrastive(rows_of(b.text), rows_of(b.image), tau), "contrastive");
    compare(negatives_loss(b, cfg).value,
            oracle_negatives(rows_of(b.text), rows_of(b.image), rows_of(*b.neg_text), neg_mask, tau), "negatives");
    compare(analogy_text_loss(b, cfg).value, oracle_analogy(rows_of(*b.pos_text), rows_of(b.text), pos_mask, tau),
            "analogy_text");
    compare(analogy_image_loss(b, cfg).value, oracle_analogy(rows_of(*b.pos_text), rows_of(b.image), pos_mask, tau),
            "analogy_image");
    LossConfig merged = cfg;
    merged.neg_mode = NegMode::kMergedIntoContrastive;
    compare(contrastive_loss(b, merged).value,
            oracle_contrastive(rows_of(b.text), rows_of(b.image), tau, masked_rows(*b.neg_text, neg_mask)),
            "merged contrastive");
  }
  return c.done("50 batches, worst relative error " + fmt(worst));
}

Outcome gradient_check() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(31);
  double worst = 0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + gen() % 7;
    const std::size_t d = 2 + gen() % 15;
    auto b = random_batch(gen(), n, d, true, true, /*full_masks=*/t < 4);
    LossConfig cfg{0.5 + static_cast<double>(gen() % 500) / 100.0, 0.5, 0.25,
                   t % 5 == 4 ? NegMode::kMergedIntoContrastive : NegMode::kSeparateLoss};
    double e = max_gradient_error(b, cfg);
    worst = std::max(worst, e);
    c.expect(e <= 1e-5, "batch " + std::to_string(t) + " gradient error " + fmt(e));
  }
  const double secs = seconds_since(t0);
  c.expect(secs < 30.0, "runtime " + fmt(secs) + " s exceeds 30 s");
  return c.done("20 batches (16 with partial masks), worst " + fmt(worst) + ", " + fmt(secs) + " s");
}

Outcome anchors() {
  Check c;
  std::mt19937_64 gen(5);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 1 + gen() % 8, d = 2 + gen() % 15;
    auto b = random_batch(gen(), n, d, true, false);
    b.neg_text = b.text;  // equal similarities on every row
    LossConfig cfg{0.1 + static_cast<double>(gen() % 100), 1, 1, NegMode::kSeparateLoss};
    c.expect(std::abs(negatives_loss(b, cfg).value - std::log(2.0)) <= 1e-12, "negatives loss is not ln 2");
  }
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = 2 + gen() % 15;
    auto b = random_batch(gen(), 1, d, false, true);
    b.image = b.text;
    b.pos_text = b.text;
    auto out = total_loss(b, {1.0 + t, 1, 1, NegMode::kSeparateLoss});
    c.expect(out.parts.contrastive == 0 && out.parts.negatives == 0 && out.parts.analogy_text == 0 &&
                 out.parts.analogy_image == 0 && out.total == 0,
             "n = 1 perfect-match batch has nonzero loss");
  }
  for (int t = 0; t < 20; ++t) {
    auto b = random_batch(gen(), 1 + gen() % 8, 2 + gen() % 15, true, true, false);
    auto out = total_loss(b, {2.0, 0.0, 0.0, NegMode::kSeparateLoss});
    c.expect(out.total == out.parts.contrastive, "alpha = beta = 0 total differs from contrastive part");
  }
  return c.done("ln 2 to 1e-12, zero at n = 1, bit-exact degenerate total");
}

Outcome lora_equivalence() {
  Check c;
  std::mt19937_64 gen(8);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t m = 1 + gen() % 24, l = 1 + gen() % 24;
    const std::size_t r = 1 + gen() % std::min(m, l);
    for (auto kind : {lora::LayerKind::kLinear, lora::LayerKind::kEmbedding}) {
      lora::BaseWeight w{"w", kind, gaussian(gen, m, l), {}};
      lora::LoraAdapter ad{"w", gaussian(gen, m, r), gaussian(gen, r, l)};
      const auto folded = lora::fold(w, ad);
      Rng rng(gen());
      const auto fresh = lora::init_adapter(w, r, rng);
      if (kind == lora::LayerKind::kLinear) {
        std::vector<double> x(l);
        for (double& v : x) v = normal(gen);
        auto a = lora::apply_linear(w, &ad, x);
        auto b = lora::apply_linear(folded, nullptr, x);
        for (std::size_t i = 0; i < m; ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
        c.expect(lora::apply_linear(w, &fresh, x) == lora::apply_linear(w, nullptr, x), "fresh adapter not neutral");
      } else {
        std::vector<std::int64_t> ids;
        for (std::size_t k = 0; k < 1 + gen() % 5; ++k) ids.push_back(static_cast<std::int64_t>(gen() % l));
        auto a = lora::apply_embedding(w, &ad, ids);
        auto b = lora::apply_embedding(folded, nullptr, ids);
        for (std::size_t k = 0; k < ids.size(); ++k)
          for (std::size_t i = 0; i < m; ++i) worst = std::max(worst, std::abs(a[k][i] - b[k][i]));
        c.expect(lora::apply_embedding(w, &fresh, ids) == lora::apply_embedding(w, nullptr, ids),
                 "fresh embedding adapter not neutral");
      }
    }
  }
  c.expect(worst <= 1e-10, "fold mismatch " + fmt(worst));
  lora::BaseWeight big{"big", lora::LayerKind::kLinear, Matrix(512, 512), {}};
  Rng rng(1);
  const auto count = lora::init_adapter(big, 4, rng).parameter_count();
  c.expect(count == 512 * 4 + 4 * 512 && count == 4096, "parameter count " + std::to_string(count));
  return c.done("200 draws, worst abs " + fmt(worst) + ", rank-4 512x512 adapter has 4096 parameters");
}

// Table-backed embedding backend with a positive per-input scale.
class ConstructedBackend : public eval::EmbeddingBackend {
 public:
  std::map<std::string, std::vector<double>> table;
  std::map<std::string, double> scale;
  std::size_t d = 0;
  std::size_t dim() const override { return d; }
  Matrix embed_text(const std::vector<std::string>& in) const override { return lookup(in); }
  Matrix embed_image(const std::vector<std::string>& in) const override { return lookup(in); }

 private:
  Matrix lookup(const std::vector<std::string>& in) const {
    Matrix m(in.size(), d);
    for (std::size_t r = 0; r < in.size(); ++r) {
      const auto& v = table.at(in[r]);
      auto s = scale.count(in[r]) ? scale.at(in[r]) : 1.0;
      for (std::size_t k = 0; k < d; ++k) m(r, k) = v[k] * s;
    }
    return m;
  }
};

Outcome eval_oracle() {
  Check c;
  std::mt19937_64 gen(17);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    ConstructedBackend backend;
    backend.d = 3;
    std::vector<eval::ChecklistItem> items;
    const std::size_t n = 5 + gen() % 30;
    std::size_t expected_correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      // The image sits on the x axis; the caption at angle a_pos (a_neg) has cosine cos(a).
      const double a_pos = unit(gen) * 3.0, a_neg = unit(gen) * 3.0;
      const std::string id = std::to_string(trial) + "_" + std::to_string(i);
      backend.table["img" + id] = {1, 0, 0};
      backend.table["pos" + id] = {std::cos(a_pos), std::sin(a_pos), 0};
      backend.table["neg" + id] = {std::cos(a_neg), 0, std::sin(a_neg)};
      if (a_pos < a_neg) ++expected_correct;  // smaller angle, larger cosine
      items.push_back({"img" + id, "pos" + id, "neg" + id, eval::ChecklistType::kAttrColor});
    }
    const double expected = static_cast<double>(expected_correct) / static_cast<double>(n);
    for (double tau : {0.1, 1.0, 100.0}) {
      auto r = eval::evaluate(items, backend, {tau, 7});
      c.expect(r.pooled.accuracy == expected, "accuracy differs from hand count at tau " + fmt(tau));
      c.expect(r.pooled.correct == expected_correct, "correct count differs");
    }
    for (const auto& [key, _] : backend.table) backend.scale[key] = 0.01 + 100.0 * unit(gen);
    c.expect(eval::evaluate(items, backend).pooled.accuracy == expected, "accuracy changed under rescaling");
  }
  return c.done("10 constructed sets; exact under tau in {0.1, 1, 100} and rescaling");
}

Outcome determinism() {
  Check c;
  StubServer server;
  install_default_handlers(server);
  TempDir dir("acceptance");
  spit(dir / "pairs.tsv", synthetic_tsv(400, 99));
  const std::string env = "env SVLC_UNMASK_ENDPOINT=" + server.url() + " SVLC_COMPLETE_ENDPOINT=" + server.url() + " ";
  auto run = [&](const std::string& out, int workers) {
    return run_shell(env + quote(SVLC_CLI_PATH) + " augment --methods rb,llm-neg,llm-pos --seed 1234 --workers " +
                     std::to_string(workers) + " -i " + quote((dir / "pairs.tsv").string()) + " -o " +
                     quote((dir / out).string()))
        .exit_code;
  };
  c.expect(run("a.jsonl", 1) == 0, "first run failed");
  c.expect(run("b.jsonl", 1) == 0, "second run failed");
  c.expect(run("c.jsonl", 8) == 0, "8-worker run failed");
  const auto a = slurp(dir / "a.jsonl");
  c.expect(!a.empty(), "empty output");
  c.expect(a == slurp(dir / "b.jsonl"), "repeat run differs");
  c.expect(a == slurp(dir / "c.jsonl"), "8-worker run differs");
  return c.done("400 records, " + std::to_string(a.size()) + " bytes identical across runs and workers {1, 8}");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"rb-negative-properties", rb_properties},
      {"worked-examples", worked_examples},
      {"loss-oracle-equivalence", loss_oracle},
      {"gradient-check", gradient_check},
      {"analytic-anchors", anchors},
      {"lora-fold-equivalence", lora_equivalence},
      {"eval-harness-oracle", eval_oracle},
      {"augment-determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
