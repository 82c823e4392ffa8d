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

#include "config_io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <set>
#include <cstdint>

#include "lagc/error.hpp"

namespace lagc::detail {

std::map<std::string, std::string> IniSection::as_map() const {
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : entries) out.emplace(k, v);
  return out;
}

std::vector<IniSection> read_ini(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open " + file.string());
  return read_ini(in, file.string());
}

std::vector<IniSection> read_ini(std::istream& in, const std::string& source) {
  std::vector<IniSection> sections;
  std::set<std::string> seen;
  bool in_section = false;
  IniSection top;
  std::string raw;
  int line_no = 0;
  auto fail = [&](const std::string& what) {
    throw ConfigError("cannot parse " + source + ": " + what + " (line " +
                      std::to_string(line_no) + ")");
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      IniSection sec;
      sec.name = trim(line.substr(1, line.size() - 2));
      if (sec.name.empty()) fail("empty section name");
      if (!seen.insert(sec.name).second) fail("duplicate section [" + sec.name + "]");
      sections.push_back(std::move(sec));
      in_section = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail("missing key");
    IniSection& target = in_section ? sections.back() : top;
    for (const auto& [k, v] : target.entries)
      if (k == key) fail("duplicate key '" + key + "'");
    target.entries.emplace_back(key, trim(line.substr(eq + 1)));
  }
  if (in.bad()) throw ConfigError("cannot read " + source);
  if (!top.entries.empty()) sections.insert(sections.begin(), std::move(top));
  return sections;
}

std::string trim(std::string s) {
  // Inline comments are allowed after ';' or '#'.
  if (auto pos = s.find_first_of(";#"); pos != std::string::npos) s.erase(pos);
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("invalid value for '" + key + "': '" + value + "'");
  }
  return out;
}

}  // namespace

int parse_int(const std::string& key, const std::string& value) {
  return parse_number<int>(key, value);
}

double parse_double(const std::string& key, const std::string& value) {
  return parse_number<double>(key, value);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  return parse_number<std::uint64_t>(key, value);
}

}  // namespace lagc::detail
