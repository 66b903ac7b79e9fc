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

// Externally produced dense vectors, one JSON object per line after a header:
//   {"dim": D, "kind": "<kind>"}
//   {"key": "...", "vec": [...]}

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hotspot {

inline constexpr const char* kUtteranceEmbeddingKind = "utterance_embedding";
inline constexpr const char* kProsodySubwindowKind = "prosody_subwindow";

class DenseVectorStore {
 public:
  DenseVectorStore() = default;
  DenseVectorStore(std::size_t dim, std::string kind) : dim_(dim), kind_(std::move(kind)) {}

  std::size_t dim() const { return dim_; }
  const std::string& kind() const { return kind_; }
  std::size_t size() const { return vectors_.size(); }
  bool empty() const { return vectors_.empty(); }

  /// Throws ValidationError on a duplicate key, wrong length or a
  /// non-finite value.
  void insert(const std::string& key, std::vector<double> vec);
  const std::vector<double>* find(const std::string& key) const;
  const std::map<std::string, std::vector<double>>& entries() const { return vectors_; }

  bool operator==(const DenseVectorStore&) const = default;

 private:
  std::size_t dim_ = 0;
  std::string kind_;
  std::map<std::string, std::vector<double>> vectors_;
};

/// Loads a store; when expected_kind is set the header kind must match.
DenseVectorStore load_dense_store(const std::filesystem::path& file,
                                  const std::optional<std::string>& expected_kind = std::nullopt);
/// Entries are written in key order, so equal stores give identical bytes.
void write_dense_store(const DenseVectorStore& store, const std::filesystem::path& file);

}  // namespace hotspot
