// Copyright 2026 The lagc-sim Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#pragma once

// Internal helpers for the key-value configuration files. Not installed.

#include <filesystem>
#include <iosfwd>
#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace lagc::detail {

struct IniSection {
  std::string name;  // empty for keys outside any section
  std::vector<std::pair<std::string, std::string>> entries;

  std::map<std::string, std::string> as_map() const;
};

// Reads an INI-style file. Sections keep file order; duplicate keys or
// sections raise ConfigError.
std::vector<IniSection> read_ini(const std::filesystem::path& file);
std::vector<IniSection> read_ini(std::istream& in, const std::string& source);

std::string trim(std::string s);
std::vector<std::string> split_list(const std::string& s, char sep = ',');

int parse_int(const std::string& key, const std::string& value);
double parse_double(const std::string& key, const std::string& value);
std::uint64_t parse_u64(const std::string& key, const std::string& value);

}  // namespace lagc::detail
