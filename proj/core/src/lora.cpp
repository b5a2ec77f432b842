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

#include "svlc/lora.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <utility>

namespace svlc::lora {

namespace {

thread_local std::uint64_t g_mac_count = 0;

constexpr std::array<char, 8> kBaseMagic{'S', 'V', 'L', 'C', 'B', 'A', 'S', 'E'};
constexpr std::array<char, 8> kAdapterMagic{'S', 'V', 'L', 'C', 'L', 'O', 'R', 'A'};
constexpr std::uint32_t kFormatVersion = 1;
// Guards against absurd sizes in corrupt headers before allocating.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;

// y += M x over a row-major matrix.
void gemv_accumulate(const Matrix& m, std::span<const double> x, std::span<double> y) {
  for (std::size_t r = 0; r < m.rows(); ++r) y[r] += dot(m.row(r), x);
  g_mac_count += m.rows() * m.cols();
}

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw IoError("cannot open " + path.string() + " for writing");
  }

  void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }

  void u64(std::uint64_t v) {
    std::array<unsigned char, 8> b{};
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b.data(), b.size());
  }

  void u32(std::uint32_t v) {
    std::array<unsigned char, 4> b{};
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b.data(), b.size());
  }

  void f64s(std::span<const double> xs) {
    for (double x : xs) u64(std::bit_cast<std::uint64_t>(x));
  }

  void finish() {
    out_.flush();
    if (!out_) throw IoError("failed writing " + path_.string());
  }

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw IoError("cannot open " + path.string());
  }

  void bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in_) throw FormatError("truncated file " + path_.string());
  }

  std::uint64_t u64() {
    std::array<unsigned char, 8> b{};
    bytes(b.data(), b.size());
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }

  std::uint32_t u32() {
    std::array<unsigned char, 4> b{};
    bytes(b.data(), b.size());
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }

  void f64s(std::span<double> xs) {
    for (double& x : xs) x = std::bit_cast<double>(u64());
  }

  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) {
      throw FormatError("trailing bytes in " + path_.string());
    }
  }

  const std::filesystem::path& path() const { return path_; }

 private:
  std::ifstream in_;
  std::filesystem::path path_;
};

struct Header {
  std::string name;
  LayerKind kind = LayerKind::kLinear;
  std::uint64_t m = 0, l = 0, r = 0;
};

void write_header(Writer& w, const std::array<char, 8>& magic, const Header& h) {
  w.bytes(magic.data(), magic.size());
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(h.name.size()));
  w.bytes(h.name.data(), h.name.size());
  auto kind = static_cast<std::uint8_t>(h.kind);
  w.bytes(&kind, 1);
  w.u64(h.m);
  w.u64(h.l);
  w.u64(h.r);
}

Header read_header(Reader& rd, const std::array<char, 8>& magic) {
  std::array<char, 8> got{};
  rd.bytes(got.data(), got.size());
  if (got != magic) throw FormatError("bad magic in " + rd.path().string());
  if (auto v = rd.u32(); v != kFormatVersion) {
    throw FormatError("unsupported format version " + std::to_string(v));
  }
  Header h;
  std::uint32_t name_len = rd.u32();
  if (name_len > 4096) throw FormatError("layer name too long in " + rd.path().string());
  h.name.resize(name_len);
  rd.bytes(h.name.data(), name_len);
  std::uint8_t kind = 0;
  rd.bytes(&kind, 1);
  if (kind > 1) throw FormatError("unknown layer kind in " + rd.path().string());
  h.kind = static_cast<LayerKind>(kind);
  h.m = rd.u64();
  h.l = rd.u64();
  h.r = rd.u64();
  if (h.m == 0 || h.l == 0 || h.m * h.l > kMaxElements || h.r > std::min(h.m, h.l)) {
    throw FormatError("implausible dimensions in " + rd.path().string());
  }
  return h;
}

}  // namespace

std::string_view to_string(LayerKind kind) {
  return kind == LayerKind::kLinear ? "linear" : "embedding";
}

std::optional<LayerKind> parse_layer_kind(std::string_view name) {
  if (name == "linear") return LayerKind::kLinear;
  if (name == "embedding") return LayerKind::kEmbedding;
  return std::nullopt;
}

void check_conforms(const BaseWeight& base, const LoraAdapter& adapter) {
  const std::size_t m = base.out_dim(), l = base.in_dim(), r = adapter.rank();
  if (m == 0 || l == 0) throw DomainError("base weight '" + base.name + "' is empty");
  if (r < 1 || r > std::min(m, l)) {
    throw DomainError("adapter rank " + std::to_string(r) + " out of range for '" + base.name + "'");
  }
  if (adapter.a.rows() != m || adapter.b.rows() != r || adapter.b.cols() != l) {
    throw DomainError("adapter shapes do not conform to base weight '" + base.name + "'");
  }
}

std::vector<double> apply_linear(const BaseWeight& base, const LoraAdapter* adapter,
                                 std::span<const double> x) {
  if (base.kind != LayerKind::kLinear) throw DomainError("apply_linear on embedding weight");
  if (x.size() != base.in_dim()) throw DomainError("input length does not match weight columns");
  if (!base.bias.empty() && base.bias.size() != base.out_dim()) {
    throw DomainError("bias length does not match weight rows");
  }
  std::vector<double> y(base.out_dim(), 0.0);
  gemv_accumulate(base.weight, x, y);
  if (adapter) {
    check_conforms(base, *adapter);
    std::vector<double> low(adapter->rank(), 0.0);
    gemv_accumulate(adapter->b, x, low);
    gemv_accumulate(adapter->a, low, y);
  }
  for (std::size_t i = 0; i < base.bias.size(); ++i) y[i] += base.bias[i];
  return y;
}

std::vector<std::vector<double>> apply_embedding(const BaseWeight& base, const LoraAdapter* adapter,
                                                 std::span<const std::int64_t> ids) {
  if (base.kind != LayerKind::kEmbedding) throw DomainError("apply_embedding on linear weight");
  if (adapter) check_conforms(base, *adapter);
  const std::size_t m = base.out_dim();
  const auto vocab = static_cast<std::int64_t>(base.in_dim());
  std::vector<std::vector<double>> out;
  out.reserve(ids.size());
  for (std::int64_t id : ids) {
    if (id < 0 || id >= vocab) {
      throw DomainError("embedding id " + std::to_string(id) + " outside [0, " +
                        std::to_string(vocab) + ")");
    }
    const auto col = static_cast<std::size_t>(id);
    std::vector<double> v(m);
    for (std::size_t i = 0; i < m; ++i) v[i] = base.weight(i, col);
    if (adapter) {
      const std::size_t r = adapter->rank();
      std::vector<double> low(r);
      for (std::size_t k = 0; k < r; ++k) low[k] = adapter->b(k, col);
      gemv_accumulate(adapter->a, low, v);
    }
    out.push_back(std::move(v));
  }
  return out;
}

BaseWeight fold(const BaseWeight& base, const LoraAdapter& adapter) {
  check_conforms(base, adapter);
  BaseWeight out = base;
  const std::size_t m = base.out_dim(), l = base.in_dim(), r = adapter.rank();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < r; ++k) {
      const double a = adapter.a(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < l; ++j) out.weight(i, j) += a * adapter.b(k, j);
    }
  }
  return out;
}

LoraAdapter init_adapter(const BaseWeight& base, std::size_t rank, Rng& rng) {
  const std::size_t m = base.out_dim(), l = base.in_dim();
  if (rank < 1 || rank > std::min(m, l)) {
    throw DomainError("rank " + std::to_string(rank) + " must lie in [1, " +
                      std::to_string(std::min(m, l)) + "]");
  }
  LoraAdapter adapter{base.name, Matrix(m, rank), Matrix(rank, l, 0.0)};
  for (double& v : adapter.a.data()) v = rng.normal(0.0, kInitStddev);
  return adapter;
}

std::uint64_t OpCounter::value() { return g_mac_count; }
void OpCounter::reset() { g_mac_count = 0; }

void AdapterRegistry::add_base(BaseWeight base) {
  if (base.weight.empty()) throw DomainError("base weight '" + base.name + "' is empty");
  std::string name = base.name;
  if (!bases_.emplace(name, std::move(base)).second) {
    throw DomainError("duplicate base weight '" + name + "'");
  }
}

void AdapterRegistry::attach(LoraAdapter adapter) {
  auto it = bases_.find(adapter.name);
  if (it == bases_.end()) throw DomainError("no base weight named '" + adapter.name + "'");
  check_conforms(it->second, adapter);
  adapters_.insert_or_assign(adapter.name, std::move(adapter));
}

const BaseWeight& AdapterRegistry::base(const std::string& name) const {
  auto it = bases_.find(name);
  if (it == bases_.end()) throw DomainError("no base weight named '" + name + "'");
  return it->second;
}

const LoraAdapter* AdapterRegistry::adapter(const std::string& name) const {
  auto it = adapters_.find(name);
  return it == adapters_.end() ? nullptr : &it->second;
}

void AdapterRegistry::check() const {
  if (!full_coverage_) return;
  std::string missing;
  for (const auto& [name, _] : bases_) {
    if (!adapters_.count(name)) missing += (missing.empty() ? "" : ", ") + name;
  }
  if (!missing.empty()) throw DomainError("layers without adapters: " + missing);
}

std::size_t AdapterRegistry::base_parameter_count() const {
  std::size_t total = 0;
  for (const auto& [_, b] : bases_) total += b.weight.rows() * b.weight.cols();
  return total;
}

std::size_t AdapterRegistry::adapter_parameter_count() const {
  std::size_t total = 0;
  for (const auto& [_, a] : adapters_) total += a.parameter_count();
  return total;
}

AdapterRegistry AdapterRegistry::folded() const {
  AdapterRegistry out(/*full_coverage=*/false);
  for (const auto& [name, b] : bases_) {
    const LoraAdapter* a = adapter(name);
    out.add_base(a ? fold(b, *a) : b);
  }
  return out;
}

void save_base(const BaseWeight& base, const std::filesystem::path& path) {
  Writer w(path);
  write_header(w, kBaseMagic, {base.name, base.kind, base.out_dim(), base.in_dim(), 0});
  w.f64s(base.weight.data());
  w.u64(base.bias.size());
  w.f64s(base.bias);
  w.finish();
}

BaseWeight load_base(const std::filesystem::path& path) {
  Reader rd(path);
  Header h = read_header(rd, kBaseMagic);
  BaseWeight base{h.name, h.kind, Matrix(h.m, h.l), {}};
  rd.f64s(base.weight.data());
  std::uint64_t bias_len = rd.u64();
  if (bias_len != 0 && bias_len != h.m) throw FormatError("bias length mismatch in " + path.string());
  base.bias.resize(bias_len);
  rd.f64s(base.bias);
  rd.expect_end();
  return base;
}

void save_adapter(const LoraAdapter& adapter, LayerKind kind, const std::filesystem::path& path) {
  Writer w(path);
  write_header(w, kAdapterMagic, {adapter.name, kind, adapter.a.rows(), adapter.b.cols(), adapter.rank()});
  w.f64s(adapter.a.data());
  w.f64s(adapter.b.data());
  w.finish();
}

LoraAdapter load_adapter(const std::filesystem::path& path, LayerKind* kind) {
  Reader rd(path);
  Header h = read_header(rd, kAdapterMagic);
  if (h.r == 0) throw FormatError("adapter rank 0 in " + path.string());
  LoraAdapter adapter{h.name, Matrix(h.m, h.r), Matrix(h.r, h.l)};
  rd.f64s(adapter.a.data());
  rd.f64s(adapter.b.data());
  rd.expect_end();
  if (kind) *kind = h.kind;
  return adapter;
}

}  // namespace svlc::lora
