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

#include "svlc/pipeline.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "json.hpp"

namespace svlc {

namespace {

bool already_has(const std::vector<GeneratedText>& list, const std::string& text) {
  return std::any_of(list.begin(), list.end(), [&](const GeneratedText& g) { return g.text == text; });
}

void check_services(const AugmentConfig& cfg, const Services& services) {
  if (!cfg.rule_based && !cfg.llm_negatives && !cfg.llm_positives) {
    throw DomainError("no generation method enabled");
  }
  if (cfg.rule_based && cfg.lexicons.empty()) throw DomainError("rule-based negatives need a lexicon");
  if (cfg.llm_negatives && (!services.tagger || !services.fill_mask)) {
    throw DomainError("unmasking negatives need a tagger and a fill-mask client");
  }
  if (cfg.llm_positives && !services.completion) {
    throw DomainError("analogy positives need a completion client");
  }
}

}  // namespace

AugmentedRecord augment_record(const CaptionRecord& record, const AugmentConfig& cfg,
                               const Services& services, std::size_t* llm_failures) {
  AugmentedRecord out{record, {}, {}};
  Rng rng(derive_seed(cfg.seed, record.id));

  auto keep_negative = [&](std::optional<GeneratedText> g) {
    if (g && g->text != record.caption && !already_has(out.negatives, g->text)) {
      out.negatives.push_back(std::move(*g));
    }
  };

  if (cfg.rule_based) {
    for (const auto& lexicon : cfg.lexicons) {
      for (std::size_t k = 0; k < cfg.negatives_per_source; ++k) {
        auto g = rb_negative(record, lexicon, rng, cfg.match_policy);
        if (!g) break;  // no lexicon word; further draws cannot help
        keep_negative(std::move(g));
      }
    }
  }

  if (cfg.llm_negatives) {
    try {
      for (std::size_t k = 0; k < cfg.negatives_per_source; ++k) {
        keep_negative(llm_negative(record, *services.tagger, *services.fill_mask, rng, cfg.top_k));
      }
    } catch (const TransportError&) {
      if (llm_failures) ++*llm_failures;
    }
  }

  if (cfg.llm_positives) {
    try {
      if (auto g = llm_positive(record, *services.completion, cfg.analogy)) {
        out.positives.push_back(std::move(*g));
      }
    } catch (const TransportError&) {
      if (llm_failures) ++*llm_failures;
    }
  }
  return out;
}

AugmentSummary run_augment(std::istream& in, PairFormat format, std::ostream& out,
                           const AugmentConfig& cfg, const Services& services) {
  check_services(cfg, services);
  PairReader reader(in, format);
  AugmentedWriter writer(out);
  AugmentSummary summary;
  const std::size_t workers = std::max<std::size_t>(1, cfg.workers);
  const std::size_t batch_size = std::max<std::size_t>(1, cfg.batch_size);

  std::vector<CaptionRecord> batch;
  std::vector<AugmentedRecord> results;
  std::atomic<std::size_t> failures{0};

  auto process_batch = [&] {
    results.assign(batch.size(), {});
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto work = [&] {
      for (std::size_t i = next++; i < batch.size(); i = next++) {
        try {
          std::size_t local_failures = 0;
          results[i] = augment_record(batch[i], cfg, services, &local_failures);
          failures += local_failures;
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    };
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 1; w < std::min(workers, batch.size()); ++w) pool.emplace_back(work);
      work();
    }
    if (error) std::rethrow_exception(error);
    for (const auto& r : results) {
      writer.write(r);
      for (const auto& n : r.negatives) {
        (n.method == Method::kRuleBased ? summary.rb_negatives : summary.unmask_negatives)++;
      }
      summary.positives += r.positives.size();
    }
    summary.records += batch.size();
    batch.clear();
  };

  while (auto rec = reader.next()) {
    batch.push_back(std::move(*rec));
    if (batch.size() == batch_size) process_batch();
  }
  if (!batch.empty()) process_batch();
  out.flush();
  if (!out) throw IoError("failed flushing augmented output");

  summary.skipped = reader.malformed();
  summary.llm_failures = failures;
  return summary;
}

std::string summary_to_json(const AugmentSummary& s) {
  nlohmann::ordered_json j;
  j["records"] = s.records;
  j["negatives_by_method"] = {{"rb", s.rb_negatives}, {"llm-unmask", s.unmask_negatives}};
  j["positives"] = s.positives;
  j["skipped"] = s.skipped;
  j["llm_failures"] = s.llm_failures;
  return j.dump();
}

}  // namespace svlc
