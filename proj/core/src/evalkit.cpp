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

#include "svlc/evalkit.h"

#include <array>
#include <cmath>
#include <utility>

#include "json_endpoint.h"
#include "svlc/common.h"
#include "svlc/losses.h"

namespace svlc::eval {

namespace {

constexpr std::array<std::pair<ChecklistType, std::string_view>, 9> kTypeNames{{
    {ChecklistType::kObjectLocation, "object-location"},
    {ChecklistType::kObjectSize, "object-size"},
    {ChecklistType::kAttrColor, "attr-color"},
    {ChecklistType::kAttrMaterial, "attr-material"},
    {ChecklistType::kAttrSize, "attr-size"},
    {ChecklistType::kAttrState, "attr-state"},
    {ChecklistType::kAttrAction, "attr-action"},
    {ChecklistType::kRelationSpatial, "relation-spatial"},
    {ChecklistType::kRelationAction, "relation-action"},
}};

Matrix vectors_from_reply(const nlohmann::json& reply, std::size_t expected_rows, std::size_t dim) {
  try {
    const auto& vectors = reply.at("vectors");
    if (vectors.size() != expected_rows) {
      throw TransportError("embedding service returned " + std::to_string(vectors.size()) +
                           " vectors for " + std::to_string(expected_rows) + " inputs");
    }
    Matrix out(expected_rows, dim);
    for (std::size_t r = 0; r < expected_rows; ++r) {
      if (vectors[r].size() != dim) throw TransportError("embedding dimension mismatch");
      for (std::size_t c = 0; c < dim; ++c) out(r, c) = vectors[r][c].get<double>();
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed embedding response: ") + e.what());
  }
}

enum class Outcome { kCorrect, kIncorrect, kTie };

Outcome score(std::span<const double> image, std::span<const double> pos, std::span<const double> neg) {
  double cp = cosine(pos, image);
  double cn = cosine(neg, image);
  if (cp > cn) return Outcome::kCorrect;
  if (cp == cn) return Outcome::kTie;
  return Outcome::kIncorrect;
}

void finalize(TypeStats& s) {
  s.total = s.correct + s.incorrect + s.skipped;
  s.accuracy = s.total ? static_cast<double>(s.correct) / static_cast<double>(s.total) : 0.0;
}

struct Embedded {
  Matrix images, positives, negatives;
};

Embedded embed_items(const EmbeddingBackend& backend, const ChecklistItem* first, std::size_t count) {
  std::vector<std::string> refs, pos, neg;
  for (std::size_t i = 0; i < count; ++i) {
    refs.push_back(first[i].image_ref);
    pos.push_back(first[i].positive);
    neg.push_back(first[i].negative);
  }
  Embedded e{backend.embed_image(refs), backend.embed_text(pos), backend.embed_text(neg)};
  for (const Matrix* m : {&e.images, &e.positives, &e.negatives}) {
    if (m->rows() != count || m->cols() != backend.dim()) {
      throw DomainError("backend returned embeddings of the wrong shape");
    }
  }
  return e;
}

}  // namespace

std::string_view to_string(ChecklistType type) {
  for (const auto& [t, n] : kTypeNames) {
    if (t == type) return n;
  }
  return "unknown";
}

std::optional<ChecklistType> parse_checklist_type(std::string_view name) {
  for (const auto& [t, n] : kTypeNames) {
    if (n == name) return t;
  }
  return std::nullopt;
}

std::vector<ChecklistItem> read_items(std::istream& in) {
  if (!in) throw IoError("checklist source is not readable");
  std::vector<ChecklistItem> items;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = "checklist line " + std::to_string(line_no);
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (!j.is_object()) throw FormatError(where + ": not a JSON object");
    ChecklistItem item;
    try {
      item.image_ref = j.at("image_ref").get<std::string>();
      item.positive = j.at("positive").get<std::string>();
      item.negative = j.at("negative").get<std::string>();
      auto type = parse_checklist_type(j.at("svlc_type").get<std::string>());
      if (!type) throw FormatError(where + ": unknown svlc_type " + j.at("svlc_type").dump());
      item.type = *type;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(where + ": " + e.what());
    }
    if (item.positive == item.negative) throw FormatError(where + ": positive equals negative");
    items.push_back(std::move(item));
  }
  if (in.bad()) throw IoError("read failure in checklist input");
  return items;
}

Matrix SyntheticBackend::embed(std::string_view domain, const std::vector<std::string>& inputs) const {
  Matrix out(inputs.size(), dim_);
  for (std::size_t r = 0; r < inputs.size(); ++r) {
    Rng rng(derive_seed(seed_, std::string(domain) + inputs[r]));
    for (double& v : out.row(r)) v = rng.normal(0.0, 1.0);
  }
  return out;
}

Matrix SyntheticBackend::embed_text(const std::vector<std::string>& texts) const {
  return embed("text:", texts);
}

Matrix SyntheticBackend::embed_image(const std::vector<std::string>& image_refs) const {
  return embed("image:", image_refs);
}

struct HttpEmbeddingBackend::Impl {
  detail::JsonEndpoint endpoint;
};

HttpEmbeddingBackend::HttpEmbeddingBackend(ServiceOptions options, std::optional<std::size_t> dim)
    : impl_(std::make_unique<Impl>(Impl{detail::JsonEndpoint(std::move(options))})) {
  if (dim) {
    dim_ = *dim;
    return;
  }
  auto reply = impl_->endpoint.get("/info");
  if (auto it = reply.find("dim"); it != reply.end() && it->is_number_unsigned()) {
    dim_ = it->get<std::size_t>();
  }
  if (dim_ == 0) throw TransportError("embedding service did not report a dimension");
}

HttpEmbeddingBackend::~HttpEmbeddingBackend() = default;

Matrix HttpEmbeddingBackend::embed_text(const std::vector<std::string>& texts) const {
  auto reply = impl_->endpoint.post("/embed/text", {{"texts", texts}});
  return vectors_from_reply(reply, texts.size(), dim_);
}

Matrix HttpEmbeddingBackend::embed_image(const std::vector<std::string>& image_refs) const {
  auto reply = impl_->endpoint.post("/embed/image", {{"image_refs", image_refs}});
  return vectors_from_reply(reply, image_refs.size(), dim_);
}

EvalReport evaluate(const std::vector<ChecklistItem>& items, const EmbeddingBackend& backend,
                    const EvalOptions& options) {
  if (!std::isfinite(options.tau) || options.tau <= 0) {
    throw DomainError("evaluation temperature must be finite and > 0");
  }
  const std::size_t batch = options.batch_size ? options.batch_size : 1;
  EvalReport report;

  auto record = [&](const ChecklistItem& item, std::optional<Outcome> outcome) {
    TypeStats& s = report.per_type[std::string(to_string(item.type))];
    for (TypeStats* t : {&s, &report.pooled}) {
      if (!outcome) {
        ++t->skipped;
      } else if (*outcome == Outcome::kCorrect) {
        ++t->correct;
      } else {
        ++t->incorrect;
        if (*outcome == Outcome::kTie) ++t->ties;
      }
    }
  };

  auto score_one = [&](const Embedded& e, std::size_t r) -> std::optional<Outcome> {
    try {
      return score(e.images.row(r), e.positives.row(r), e.negatives.row(r));
    } catch (const DomainError&) {
      return std::nullopt;  // zero-norm embedding
    }
  };

  for (std::size_t start = 0; start < items.size(); start += batch) {
    const std::size_t count = std::min(batch, items.size() - start);
    std::optional<Embedded> e;
    try {
      e = embed_items(backend, items.data() + start, count);
    } catch (const std::exception&) {
      e.reset();
    }
    if (e) {
      for (std::size_t r = 0; r < count; ++r) record(items[start + r], score_one(*e, r));
      continue;
    }
    // Batch failed: retry item by item so one bad input only costs itself.
    for (std::size_t r = 0; r < count; ++r) {
      std::optional<Outcome> outcome;
      try {
        auto single = embed_items(backend, items.data() + start + r, 1);
        outcome = score_one(single, 0);
      } catch (const std::exception&) {
        outcome.reset();
      }
      record(items[start + r], outcome);
    }
  }

  double macro = 0.0;
  for (auto& [_, s] : report.per_type) {
    finalize(s);
    macro += s.accuracy;
  }
  finalize(report.pooled);
  report.macro_accuracy = report.per_type.empty() ? 0.0 : macro / static_cast<double>(report.per_type.size());
  return report;
}

std::string report_to_json(const EvalReport& report) {
  auto stats = [](const TypeStats& s) {
    nlohmann::ordered_json j;
    j["correct"] = s.correct;
    j["incorrect"] = s.incorrect;
    j["ties"] = s.ties;
    j["skipped"] = s.skipped;
    j["total"] = s.total;
    j["accuracy"] = s.accuracy;
    return j;
  };
  nlohmann::ordered_json j;
  j["per_type"] = nlohmann::ordered_json::object();
  for (const auto& [name, s] : report.per_type) j["per_type"][name] = stats(s);
  j["overall"] = stats(report.pooled);
  j["overall"]["macro_accuracy"] = report.macro_accuracy;
  return j.dump(2);
}

}  // namespace svlc::eval
