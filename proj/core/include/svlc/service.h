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

#ifndef SVLC_SERVICE_H_
#define SVLC_SERVICE_H_

#include <chrono>
#include <cstddef>
#include <string>

namespace svlc {

// Connection settings shared by every HTTP-backed client.
struct ServiceOptions {
  std::string endpoint;  // base URL, e.g. "http://127.0.0.1:8080"
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{100};  // doubled after each failure
  std::chrono::seconds timeout{30};
  std::size_t max_in_flight = 8;
};

}  // namespace svlc

#endif  // SVLC_SERVICE_H_
