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

#include "settings.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "svlc/common.h"

namespace svlc::cli {

namespace {

std::string fold_key(std::string_view key) {
  std::string out = ascii_lower(trim(key));
  for (char& c : out) {
    if (c == '_') c = '-';
  }
  return out;
}

// Drops a trailing comment that is not inside double quotes.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

}  // namespace

ConfigFile ConfigFile::parse(std::string_view text) {
  ConfigFile out;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw FormatError("config line " + std::to_string(line_no) + ": bad section header");
      section = fold_key(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos || trim(line.substr(0, eq)).empty()) {
      throw FormatError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    auto value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    out.sections_[section][fold_key(line.substr(0, eq))] = std::string(value);
  }
  return out;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str());
}

std::optional<std::string> ConfigFile::get(std::string_view section, std::string_view key) const {
  const std::string k = fold_key(key);
  for (const std::string& s : {fold_key(section), std::string()}) {
    auto sec = sections_.find(s);
    if (sec == sections_.end()) continue;
    if (auto it = sec->second.find(k); it != sec->second.end()) return it->second;
  }
  return std::nullopt;
}

std::string env_name(std::string_view key) {
  std::string out = "SVLC_" + ascii_upper(key);
  for (char& c : out) {
    if (c == '-') c = '_';
  }
  return out;
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  };
}

std::optional<std::string> SettingSources::lookup(std::string_view key) const {
  if (env_) {
    if (auto v = env_(env_name(key))) return v;
  }
  if (file_) return file_->get(section_, key);
  return std::nullopt;
}

}  // namespace svlc::cli
