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

#ifndef SVLC_PIPELINE_H_
#define SVLC_PIPELINE_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "svlc/analogy.h"
#include "svlc/corpus.h"
#include "svlc/lexicon.h"
#include "svlc/unmask.h"

namespace svlc {

struct AugmentConfig {
  std::uint64_t seed = 0;
  bool rule_based = false;
  bool llm_negatives = false;
  bool llm_positives = false;
  std::vector<SvlcLexicon> lexicons;  // rule-based lists, applied in order
  MatchPolicy match_policy = MatchPolicy::kFirst;
  std::size_t negatives_per_source = 1;  // per lexicon, and for unmasking
  int top_k = kDefaultTopK;
  AnalogyOptions analogy;
  std::size_t workers = 1;
  std::size_t batch_size = 256;
};

// Non-owning. Only the services required by the enabled methods must be set.
struct Services {
  const PosTagger* tagger = nullptr;
  const FillMaskClient* fill_mask = nullptr;
  const CompletionClient* completion = nullptr;
};

struct AugmentSummary {
  std::size_t records = 0;
  std::size_t rb_negatives = 0;
  std::size_t unmask_negatives = 0;
  std::size_t positives = 0;
  std::size_t skipped = 0;  // malformed input rows
  std::size_t llm_failures = 0;
};

// All generation for one record. Draws come from a substream seeded by
// (cfg.seed, record.id), so the result does not depend on scheduling.
// Service failures are counted in `llm_failures` and that method is
// abandoned for the record.
AugmentedRecord augment_record(const CaptionRecord& record, const AugmentConfig& cfg,
                               const Services& services, std::size_t* llm_failures = nullptr);

// read -> parallel per-record generation -> in-order JSONL output.
AugmentSummary run_augment(std::istream& in, PairFormat format, std::ostream& out,
                           const AugmentConfig& cfg, const Services& services);

std::string summary_to_json(const AugmentSummary& summary);

}  // namespace svlc

#endif  // SVLC_PIPELINE_H_
