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

#include "json_endpoint.h"

#include <thread>

#include "httplib.h"
#include "svlc/common.h"

namespace svlc::detail {

namespace {

class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<>& sem) : sem_(sem) { sem_.acquire(); }
  ~SlotGuard() { sem_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<>& sem_;
};

}  // namespace

JsonEndpoint::JsonEndpoint(ServiceOptions options) : options_(std::move(options)) {
  const std::string& url = options_.endpoint;
  if (url.rfind("http://", 0) != 0) {
    throw DomainError("endpoint must be an http:// URL: '" + url + "'");
  }
  auto slash = url.find('/', 7);
  scheme_host_port_ = url.substr(0, slash);
  if (slash != std::string::npos) {
    path_prefix_ = url.substr(slash);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  }
  if (options_.attempts < 1) options_.attempts = 1;
  if (options_.max_in_flight < 1) options_.max_in_flight = 1;
  slots_ = std::make_unique<std::counting_semaphore<>>(static_cast<std::ptrdiff_t>(options_.max_in_flight));
}

nlohmann::json JsonEndpoint::post(const std::string& path, const nlohmann::json& body) const {
  return request("POST", path, &body);
}

nlohmann::json JsonEndpoint::get(const std::string& path) const { return request("GET", path, nullptr); }

nlohmann::json JsonEndpoint::request(const std::string& method, const std::string& path,
                                     const nlohmann::json* body) const {
  SlotGuard slot(*slots_);
  const std::string payload = body ? body->dump() : std::string();
  const std::string full_path = path_prefix_ + path;
  std::string last_error;
  auto backoff = options_.initial_backoff;

  for (int attempt = 0; attempt < options_.attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);
    auto res = body ? client.Post(full_path, payload, "application/json") : client.Get(full_path);
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    auto parsed = nlohmann::json::parse(res->body, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded()) {
      last_error = "response is not JSON";
      continue;
    }
    return parsed;
  }
  throw TransportError(method + " " + scheme_host_port_ + full_path + " failed after " +
                       std::to_string(options_.attempts) + " attempts: " + last_error);
}

}  // namespace svlc::detail
