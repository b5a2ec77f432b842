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

#ifndef SVLC_TOOLS_SETTINGS_H_
#define SVLC_TOOLS_SETTINGS_H_

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace svlc::cli {

// Line-oriented key = value file with optional [section] headers. Keys
// before the first header are global. Values may be double-quoted; `#`
// starts a comment outside quotes. Keys compare with '_' and '-' folded.
class ConfigFile {
 public:
  static ConfigFile parse(std::string_view text);
  static ConfigFile load(const std::filesystem::path& path);

  // Section value first, then the global value.
  std::optional<std::string> get(std::string_view section, std::string_view key) const;

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

// "top-k" -> "SVLC_TOP_K"
std::string env_name(std::string_view key);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

EnvLookup process_env();

// Value for `key` from the environment, else from the config file.
class SettingSources {
 public:
  SettingSources(EnvLookup env, const ConfigFile* file, std::string section)
      : env_(std::move(env)), file_(file), section_(std::move(section)) {}

  std::optional<std::string> lookup(std::string_view key) const;

 private:
  EnvLookup env_;
  const ConfigFile* file_;
  std::string section_;
};

}  // namespace svlc::cli

#endif  // SVLC_TOOLS_SETTINGS_H_
