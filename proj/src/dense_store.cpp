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

#include "hotspot/dense_store.hpp"

#include <cmath>
#include <fstream>

#include "hotspot/error.hpp"
#include "json_util.hpp"

namespace hotspot {

using nlohmann::json;

void DenseVectorStore::insert(const std::string& key, std::vector<double> vec) {
  if (vec.size() != dim_) {
    throw ValidationError("vector '" + key + "' has length " + std::to_string(vec.size()) +
                          ", expected dim " + std::to_string(dim_));
  }
  for (double v : vec) {
    if (!std::isfinite(v)) throw ValidationError("vector '" + key + "' has a non-finite value");
  }
  if (!vectors_.emplace(key, std::move(vec)).second) {
    throw ValidationError("duplicate key '" + key + "'");
  }
}

const std::vector<double>* DenseVectorStore::find(const std::string& key) const {
  auto it = vectors_.find(key);
  return it == vectors_.end() ? nullptr : &it->second;
}

DenseVectorStore load_dense_store(const std::filesystem::path& file,
                                  const std::optional<std::string>& expected_kind) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot open vector store " + file.string());
  std::string line;
  std::size_t line_no = 0;
  const auto fail = [&](const std::string& msg) -> ValidationError {
    return ValidationError(file.string() + ":" + std::to_string(line_no) + ": " + msg);
  };
  DenseVectorStore store;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw fail(std::string("JSON parse error: ") + e.what());
    }
    try {
      if (!have_header) {
        const auto dim = detail::require<std::size_t>(j, "dim");
        auto kind = detail::require<std::string>(j, "kind");
        if (expected_kind && kind != *expected_kind) {
          throw ValidationError("store kind '" + kind + "', expected '" + *expected_kind + "'");
        }
        store = DenseVectorStore(dim, std::move(kind));
        have_header = true;
        continue;
      }
      const auto key = detail::require<std::string>(j, "key");
      const auto& jv = detail::require_array(j, "vec");
      std::vector<double> vec;
      vec.reserve(jv.size());
      for (const auto& x : jv) {
        if (!x.is_number()) throw ValidationError("vector '" + key + "' has a non-finite value");
        vec.push_back(x.get<double>());
      }
      store.insert(key, std::move(vec));
    } catch (const ValidationError& e) {
      throw fail(e.what());
    }
  }
  if (!have_header) throw ValidationError(file.string() + ": missing header line");
  return store;
}

void write_dense_store(const DenseVectorStore& store, const std::filesystem::path& file) {
  std::string body = json{{"dim", store.dim()}, {"kind", store.kind()}}.dump() + "\n";
  for (const auto& [key, vec] : store.entries()) {
    body += json{{"key", key}, {"vec", vec}}.dump() + "\n";
  }
  detail::write_text_file(file, body);
}

}  // namespace hotspot
