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

#include "svlc/corpus.h"

#include <array>
#include <cctype>
#include <utility>

#include "json.hpp"
#include "svlc/common.h"

namespace svlc {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::array<std::pair<SvlcType, std::string_view>, 7> kSvlcNames{{
    {SvlcType::kColor, "color"},
    {SvlcType::kMaterial, "material"},
    {SvlcType::kSize, "size"},
    {SvlcType::kState, "state"},
    {SvlcType::kAction, "action"},
    {SvlcType::kSpatialRelation, "spatial-relation"},
    {SvlcType::kActionRelation, "action-relation"},
}};

constexpr std::array<std::pair<Method, std::string_view>, 3> kMethodNames{{
    {Method::kRuleBased, "rb"},
    {Method::kLlmUnmask, "llm-unmask"},
    {Method::kLlmPrompt, "llm-prompt"},
}};

bool is_negative_method(Method m) { return m == Method::kRuleBased || m == Method::kLlmUnmask; }

ordered_json to_json(const GeneratedText& g) {
  ordered_json j;
  j["text"] = g.text;
  j["method"] = std::string(to_string(g.method));
  if (is_negative_method(g.method)) {
    j["svlc_type"] = g.svlc_type ? ordered_json(std::string(to_string(*g.svlc_type))) : ordered_json();
    j["replaced_word"] = g.replaced_word.value_or("");
    j["replacement_word"] = g.replacement_word.value_or("");
    j["token_index"] = g.token_index.value_or(0);
  }
  return j;
}

GeneratedText generated_from_json(const nlohmann::json& j) {
  GeneratedText g;
  g.text = j.at("text").get<std::string>();
  auto method = parse_method(j.at("method").get<std::string>());
  if (!method) throw FormatError("unknown method: " + j.at("method").dump());
  g.method = *method;
  if (auto it = j.find("svlc_type"); it != j.end() && !it->is_null()) {
    g.svlc_type = parse_svlc_type(it->get<std::string>());
    if (!g.svlc_type) throw FormatError("unknown svlc_type: " + it->dump());
  }
  if (auto it = j.find("replaced_word"); it != j.end()) g.replaced_word = it->get<std::string>();
  if (auto it = j.find("replacement_word"); it != j.end()) g.replacement_word = it->get<std::string>();
  if (auto it = j.find("token_index"); it != j.end()) g.token_index = it->get<std::size_t>();
  return g;
}

}  // namespace

std::string_view to_string(SvlcType type) {
  for (const auto& [t, name] : kSvlcNames) {
    if (t == type) return name;
  }
  return "unknown";
}

std::optional<SvlcType> parse_svlc_type(std::string_view name) {
  for (const auto& [t, n] : kSvlcNames) {
    if (n == name) return t;
  }
  return std::nullopt;
}

std::string_view to_string(Method method) {
  for (const auto& [m, name] : kMethodNames) {
    if (m == method) return name;
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (const auto& [m, n] : kMethodNames) {
    if (n == name) return m;
  }
  return std::nullopt;
}

void validate(const AugmentedRecord& record) {
  for (const auto& neg : record.negatives) {
    if (!is_negative_method(neg.method)) {
      throw DomainError("negative with non-negative method in record " + record.source.id);
    }
    if (neg.text == record.source.caption) {
      throw DomainError("negative equals source caption in record " + record.source.id);
    }
    if (!neg.replaced_word || !neg.replacement_word || !neg.token_index) {
      throw DomainError("negative missing provenance in record " + record.source.id);
    }
    if (*neg.replaced_word == *neg.replacement_word) {
      throw DomainError("negative replaces a word with itself in record " + record.source.id);
    }
  }
  for (const auto& pos : record.positives) {
    if (pos.method != Method::kLlmPrompt) {
      throw DomainError("positive with non-prompt method in record " + record.source.id);
    }
    if (pos.replaced_word || pos.replacement_word || pos.token_index) {
      throw DomainError("positive carries substitution provenance in record " + record.source.id);
    }
  }
}

std::string normalize_caption(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : trim(raw)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = true;
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::optional<PairFormat> parse_pair_format(std::string_view name) {
  if (name == "tsv") return PairFormat::kTsv;
  if (name == "jsonl") return PairFormat::kJsonl;
  return std::nullopt;
}

PairReader::PairReader(std::istream& in, PairFormat format) : in_(in), format_(format) {
  if (!in_) throw IoError("pair source is not readable");
}

std::optional<CaptionRecord> PairReader::parse_line(const std::string& raw) {
  std::string_view line = raw;
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (trim(line).empty()) return std::nullopt;

  CaptionRecord rec;
  if (format_ == PairFormat::kTsv) {
    auto tab = line.find('\t');
    if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos) {
      return std::nullopt;
    }
    rec.caption = normalize_caption(line.substr(0, tab));
    rec.image_ref = std::string(trim(line.substr(tab + 1)));
  } else {
    auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (!j.is_object()) return std::nullopt;
    auto cap = j.find("caption");
    auto img = j.find("image_ref");
    if (cap == j.end() || img == j.end() || !cap->is_string() || !img->is_string()) {
      return std::nullopt;
    }
    rec.caption = normalize_caption(cap->get<std::string>());
    rec.image_ref = std::string(trim(img->get<std::string>()));
    if (auto id = j.find("id"); id != j.end() && !id->is_null()) {
      if (id->is_string()) {
        rec.id = id->get<std::string>();
      } else if (id->is_number_integer()) {
        rec.id = id->dump();
      } else {
        return std::nullopt;
      }
    }
  }
  if (rec.caption.empty() || rec.image_ref.empty()) return std::nullopt;
  if (rec.id.empty()) rec.id = std::to_string(line_no_ - 1);
  if (!seen_ids_.insert(rec.id).second) return std::nullopt;
  return rec;
}

std::optional<CaptionRecord> PairReader::next() {
  if (finished_) return std::nullopt;
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (auto rec = parse_line(line)) return rec;
    ++malformed_;
  }
  if (in_.bad()) throw IoError("read failure after line " + std::to_string(line_no_));
  finished_ = true;
  if (line_no_ > 0 && 2 * malformed_ > line_no_) {
    throw FormatError(std::to_string(malformed_) + " of " + std::to_string(line_no_) +
                          " rows are malformed",
                      malformed_);
  }
  return std::nullopt;
}

std::vector<CaptionRecord> read_pairs(std::istream& in, PairFormat format, std::size_t* malformed) {
  PairReader reader(in, format);
  std::vector<CaptionRecord> out;
  while (auto rec = reader.next()) out.push_back(std::move(*rec));
  if (malformed) *malformed = reader.malformed();
  return out;
}

std::string to_jsonl_line(const AugmentedRecord& record) {
  ordered_json j;
  j["id"] = record.source.id;
  j["caption"] = record.source.caption;
  j["image_ref"] = record.source.image_ref;
  j["negatives"] = ordered_json::array();
  for (const auto& g : record.negatives) j["negatives"].push_back(to_json(g));
  j["positives"] = ordered_json::array();
  for (const auto& g : record.positives) j["positives"].push_back(to_json(g));
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

AugmentedRecord parse_jsonl_line(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid augmented record: ") + e.what());
  }
  AugmentedRecord rec;
  try {
    rec.source.id = j.at("id").get<std::string>();
    rec.source.caption = j.at("caption").get<std::string>();
    rec.source.image_ref = j.at("image_ref").get<std::string>();
    for (const auto& g : j.at("negatives")) rec.negatives.push_back(generated_from_json(g));
    for (const auto& g : j.at("positives")) rec.positives.push_back(generated_from_json(g));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid augmented record: ") + e.what());
  }
  return rec;
}

void AugmentedWriter::write(const AugmentedRecord& record) {
  validate(record);
  out_ << to_jsonl_line(record) << '\n';
  if (!out_) throw IoError("failed writing record " + record.source.id);
  ++count_;
}

std::size_t write_augmented(const std::vector<AugmentedRecord>& records, std::ostream& out) {
  AugmentedWriter writer(out);
  for (const auto& r : records) writer.write(r);
  out.flush();
  if (!out) throw IoError("failed flushing augmented output");
  return writer.count();
}

}  // namespace svlc
