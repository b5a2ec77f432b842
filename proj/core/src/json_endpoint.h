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

#ifndef SVLC_SRC_JSON_ENDPOINT_H_
#define SVLC_SRC_JSON_ENDPOINT_H_

#include <memory>
#include <semaphore>
#include <string>

#include "json.hpp"
#include "svlc/service.h"

namespace svlc::detail {

// POSTs JSON bodies to one service, with retry/backoff and a cap on
// concurrent in-flight requests. Safe to share across threads.
class JsonEndpoint {
 public:
  explicit JsonEndpoint(ServiceOptions options);

  // Throws TransportError once every attempt has failed.
  nlohmann::json post(const std::string& path, const nlohmann::json& body) const;
  nlohmann::json get(const std::string& path) const;

  const ServiceOptions& options() const { return options_; }

 private:
  nlohmann::json request(const std::string& method, const std::string& path,
                         const nlohmann::json* body) const;

  ServiceOptions options_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  mutable std::unique_ptr<std::counting_semaphore<>> slots_;
};

}  // namespace svlc::detail

#endif  // SVLC_SRC_JSON_ENDPOINT_H_
