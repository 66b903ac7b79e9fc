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

// Word-based window features: TF-IDF over training n-grams, and pooling of
// externally produced per-utterance vectors.

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hotspot/corpus.hpp"
#include "hotspot/dense_store.hpp"
#include "hotspot/windowing.hpp"

namespace hotspot {

using NGram = std::vector<std::string>;

struct VocabEntry {
  NGram ngram;
  double idf = 0.0;
  std::size_t count = 0;  ///< training occurrences
  std::size_t df = 0;     ///< training utterances containing the n-gram

  bool operator==(const VocabEntry&) const = default;
};

class Vocab {
 public:
  Vocab() = default;
  explicit Vocab(std::vector<VocabEntry> entries);

  std::size_t size() const { return entries_.size(); }
  const std::vector<VocabEntry>& entries() const { return entries_; }
  /// Index of an n-gram, or -1.
  long find(const NGram& ngram) const;

  bool operator==(const Vocab& o) const { return entries_ == o.entries_; }

 private:
  std::vector<VocabEntry> entries_;
  std::map<NGram, std::size_t> index_;
};

struct VocabParams {
  std::size_t max_size = 10000;
  std::size_t max_order = 3;
};

/// Tokens are lowercased word texts.
std::string normalize_token(const std::string& text);

/// n-grams (n = 1..max_order) of consecutive tokens of one utterance, ranked
/// by occurrence count (descending, ties lexicographic); the top max_size are
/// kept with idf = ln((1 + N_utt) / (1 + df)) + 1.
Vocab fit_vocab(std::span<const Meeting* const> training, const VocabParams& params = {});

struct SparseVector {
  std::size_t dim = 0;
  std::vector<std::size_t> indices;  ///< strictly increasing
  std::vector<double> values;

  std::vector<double> to_dense() const;
  double norm() const;
};

/// TF counts over words whose onset lies in the window (n-grams stay within
/// one utterance), scaled by idf and L2-normalized when non-zero.
SparseVector tfidf_window(const Vocab& vocab, const Meeting& meeting, const Window& window,
                          std::size_t max_order = 3);

enum class PoolMethod { kL2, kRms, kMean, kMax, kMin };
PoolMethod parse_pool_method(const std::string& name);
const char* pool_method_name(PoolMethod m);

struct PooledVector {
  std::vector<double> values;
  std::size_t count = 0;  ///< number of vectors pooled
  bool empty() const { return count == 0; }
};

/// Elementwise pooling of a set of equal-length vectors. Empty input gives a
/// zero vector of length dim.
PooledVector pool(std::span<const std::vector<double>* const> vectors, std::size_t dim,
                  PoolMethod method);

/// Pools the vectors of every utterance overlapping the window (positive
/// measure). Looks up "<utt>#<window_index>" first, then "<utt>".
PooledVector pool_vectors(const DenseVectorStore& store, const Meeting& meeting,
                          const Window& window, PoolMethod method);

void write_vocab(const Vocab& vocab, const std::filesystem::path& file);
Vocab read_vocab(const std::filesystem::path& file);

}  // namespace hotspot
