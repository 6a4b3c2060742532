/*
   Copyright 2026 The francache Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "fran/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>

#include "fran/common.hpp"

namespace fran {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

KeyValueFile KeyValueFile::parse(std::istream& in, const std::string& origin) {
  KeyValueFile kv;
  kv.origin_ = origin;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidParams(origin + ":" + std::to_string(lineno) + ": expected `key = value`");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw InvalidParams(origin + ":" + std::to_string(lineno) + ": empty key");
    }
    if (!kv.entries_.emplace(key, value).second) {
      throw InvalidParams(origin + ":" + std::to_string(lineno) + ": duplicate key `" + key + "`");
    }
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse(in, path.string());
}

bool KeyValueFile::contains(const std::string& key) const {
  touched_[key] = true;
  return entries_.count(key) != 0;
}

const std::string& KeyValueFile::get(const std::string& key) const {
  touched_[key] = true;
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw InvalidParams(origin_ + ": missing key `" + key + "`");
  return it->second;
}

namespace {

double to_double(const std::string& origin, const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InvalidParams(origin + ": key `" + key + "` is not a number: " + text);
  }
}

long long to_int(const std::string& origin, const std::string& key, const std::string& text) {
  long long v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw InvalidParams(origin + ": key `" + key + "` is not an integer: " + text);
  }
  return v;
}

}  // namespace

double KeyValueFile::get_double(const std::string& key) const {
  return to_double(origin_, key, get(key));
}

double KeyValueFile::get_double(const std::string& key, double fallback) const {
  return contains(key) ? get_double(key) : fallback;
}

long long KeyValueFile::get_int(const std::string& key) const {
  return to_int(origin_, key, get(key));
}

long long KeyValueFile::get_int(const std::string& key, long long fallback) const {
  return contains(key) ? get_int(key) : fallback;
}

unsigned long long KeyValueFile::get_uint64(const std::string& key,
                                            unsigned long long fallback) const {
  if (!contains(key)) return fallback;
  const std::string& text = get(key);
  unsigned long long v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw InvalidParams(origin_ + ": key `" + key + "` is not an unsigned integer: " + text);
  }
  return v;
}

std::string KeyValueFile::get_string(const std::string& key, const std::string& fallback) const {
  return contains(key) ? get(key) : fallback;
}

std::vector<std::string> KeyValueFile::get_list(const std::string& key) const {
  auto items = split(get(key), ',');
  std::erase_if(items, [](const std::string& s) { return s.empty(); });
  return items;
}

std::vector<std::string> KeyValueFile::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [key, value] : entries_) {
    if (!touched_.count(key)) out.push_back(key);
  }
  return out;
}

}  // namespace fran
