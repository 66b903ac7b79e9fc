// Copyright 2026 The Hotspot Authors
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

#pragma once

// Small JSON helpers shared by the file readers. Internal header.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "hotspot/error.hpp"

namespace hotspot::detail {

template <typename T>
T require(const nlohmann::json& j, const char* field) {
  if (!j.is_object()) throw ValidationError("expected a JSON object");
  auto it = j.find(field);
  if (it == j.end() || it->is_null()) {
    throw ValidationError(std::string("missing field '") + field + "'");
  }
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string("field '") + field + "' has the wrong type");
  }
}

inline const nlohmann::json& require_array(const nlohmann::json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_array()) {
    throw ValidationError(std::string("field '") + field + "' must be an array");
  }
  return *it;
}

inline std::string read_text_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// 1-based line of a byte offset, for parse error messages.
inline std::size_t line_of(const std::string& text, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

inline nlohmann::json read_json_file(const std::filesystem::path& file) {
  const std::string text = read_text_file(file);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(file.string() + ":" + std::to_string(line_of(text, e.byte)) +
                          ": JSON parse error: " + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& file, const std::string& body) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + file.string());
  out << body;
  if (!out) throw Error("write failed for " + file.string());
}

}  // namespace hotspot::detail
