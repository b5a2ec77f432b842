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

#ifndef SVLC_COMMON_H_
#define SVLC_COMMON_H_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace svlc {

// Invalid numeric or structural input (zero-norm rows, shape mismatches,
// out-of-range ids, empty batches).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unreadable source or failed sink write. Always fatal.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input file is structurally unusable, e.g. too many malformed rows.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t malformed = 0)
      : std::runtime_error(what), malformed_(malformed) {}
  std::size_t malformed() const { return malformed_; }

 private:
  std::size_t malformed_;
};

// A remote service could not be reached (after retries) or answered with
// something unusable. Recoverable: callers skip the affected record.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Seeded random source. Thin wrapper so every consumer draws through the
// same engine type and the same index sampling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  double normal(double mean, double stddev);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Independent substream seed for one record, so that output does not depend
// on which worker handles the record or in which order.
std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view record_id);

std::string ascii_lower(std::string_view s);
std::string ascii_upper(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
std::string_view trim(std::string_view s);

}  // namespace svlc

#endif  // SVLC_COMMON_H_
