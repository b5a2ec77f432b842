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

#ifndef SVLC_LORA_H_
#define SVLC_LORA_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "svlc/common.h"
#include "svlc/matrix.h"

namespace svlc::lora {

enum class LayerKind : std::uint8_t { kLinear = 0, kEmbedding = 1 };

std::string_view to_string(LayerKind kind);
std::optional<LayerKind> parse_layer_kind(std::string_view name);

// Frozen weight of one parametric layer. Linear: W is (out m) x (in l).
// Embedding: W is (dim m) x (vocab l), one column per id. The optional bias
// is carried along for linear layers but is never adapted.
struct BaseWeight {
  std::string name;
  LayerKind kind = LayerKind::kLinear;
  Matrix weight;
  std::vector<double> bias;

  std::size_t out_dim() const { return weight.rows(); }
  std::size_t in_dim() const { return weight.cols(); }
};

// Rank-r residual: the adapted weight is W + A * B with A (m x r), B (r x l).
struct LoraAdapter {
  std::string name;
  Matrix a;
  Matrix b;

  std::size_t rank() const { return a.cols(); }
  std::size_t parameter_count() const { return a.rows() * a.cols() + b.rows() * b.cols(); }
};

inline constexpr std::size_t kDefaultRank = 4;
inline constexpr double kInitStddev = 0.02;

// Throws DomainError unless the adapter's shapes fit the base weight and
// 1 <= r <= min(m, l).
void check_conforms(const BaseWeight& base, const LoraAdapter& adapter);

// W x (+ bias) (+ A (B x)). The m x l product A B is never formed.
std::vector<double> apply_linear(const BaseWeight& base, const LoraAdapter* adapter,
                                 std::span<const double> x);

// Column lookup per id, plus A * column_id(B) when adapted.
std::vector<std::vector<double>> apply_embedding(const BaseWeight& base, const LoraAdapter* adapter,
                                                 std::span<const std::int64_t> ids);

// W* = W + A B; the result applies without an adapter.
BaseWeight fold(const BaseWeight& base, const LoraAdapter& adapter);

// A ~ N(0, 0.02^2), B = 0, so the fresh adapter leaves outputs unchanged.
LoraAdapter init_adapter(const BaseWeight& base, std::size_t rank, Rng& rng);

// Multiply-add counter for the apply routines on the calling thread.
// Used to check that residual application costs O(r (m + l)) extra work.
struct OpCounter {
  static std::uint64_t value();
  static void reset();
};

// Layer registry for a whole model. With full coverage enabled, check()
// rejects any registered parametric layer that has no adapter.
class AdapterRegistry {
 public:
  explicit AdapterRegistry(bool full_coverage = true) : full_coverage_(full_coverage) {}

  void add_base(BaseWeight base);
  void attach(LoraAdapter adapter);

  const BaseWeight& base(const std::string& name) const;
  const LoraAdapter* adapter(const std::string& name) const;

  // Throws DomainError listing unadapted layers (full coverage only).
  void check() const;

  std::size_t base_parameter_count() const;
  std::size_t adapter_parameter_count() const;

  // Every base with its adapter folded in; adapters are dropped.
  AdapterRegistry folded() const;

 private:
  bool full_coverage_;
  std::map<std::string, BaseWeight> bases_;
  std::map<std::string, LoraAdapter> adapters_;
};

// Binary containers, little-endian:
//   magic[8] | u32 version | u32 name_len | name | u8 kind | u64 m | u64 l | u64 r
// followed by row-major float64 payloads. Base files ("SVLCBASE") carry W and
// then u64 bias_len + bias; adapter files ("SVLCLORA") carry A then B.
void save_base(const BaseWeight& base, const std::filesystem::path& path);
BaseWeight load_base(const std::filesystem::path& path);
void save_adapter(const LoraAdapter& adapter, LayerKind kind, const std::filesystem::path& path);
LoraAdapter load_adapter(const std::filesystem::path& path, LayerKind* kind = nullptr);

}  // namespace svlc::lora

#endif  // SVLC_LORA_H_
