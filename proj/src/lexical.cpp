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

#include "hotspot/lexical.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <unordered_map>

#include "hotspot/error.hpp"
#include "hotspot/kernels.hpp"
#include "json_util.hpp"

namespace hotspot {

using nlohmann::json;

Vocab::Vocab(std::vector<VocabEntry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!index_.emplace(entries_[i].ngram, i).second) {
      throw ValidationError("duplicate vocabulary entry");
    }
  }
}

long Vocab::find(const NGram& ngram) const {
  auto it = index_.find(ngram);
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

std::string normalize_token(const std::string& text) {
  std::string out = text;
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

namespace {

template <typename F>
void for_each_ngram(const std::vector<std::string>& tokens, std::size_t max_order, F&& f) {
  NGram g;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    g.clear();
    for (std::size_t n = 1; n <= max_order && i + n <= tokens.size(); ++n) {
      g.push_back(tokens[i + n - 1]);
      f(g);
    }
  }
}

std::vector<std::string> tokens_of(const Utterance& u) {
  std::vector<std::string> t;
  t.reserve(u.words.size());
  for (const auto& w : u.words) t.push_back(normalize_token(w.text));
  return t;
}

}  // namespace

Vocab fit_vocab(std::span<const Meeting* const> training, const VocabParams& params) {
  std::map<NGram, std::pair<std::size_t, std::size_t>> stats;  // count, df
  std::size_t n_utt = 0;
  for (const Meeting* m : training) {
    for (const auto& u : m->utterances) {
      if (u.words.empty()) continue;
      ++n_utt;
      std::set<NGram> seen;
      for_each_ngram(tokens_of(u), params.max_order, [&](const NGram& g) {
        auto& s = stats[g];
        ++s.first;
        if (seen.insert(g).second) ++s.second;
      });
    }
  }
  if (n_utt == 0) throw ValidationError("cannot fit vocabulary: training split has no words");

  std::vector<VocabEntry> entries;
  entries.reserve(stats.size());
  for (auto& [g, s] : stats) entries.push_back(VocabEntry{g, 0.0, s.first, s.second});
  // stats is ordered lexicographically, so a stable sort on count keeps
  // the lexicographic tie-break.
  std::stable_sort(entries.begin(), entries.end(),
                   [](const VocabEntry& a, const VocabEntry& b) { return a.count > b.count; });
  if (entries.size() > params.max_size) entries.resize(params.max_size);
  for (auto& e : entries) {
    e.idf = std::log((1.0 + n_utt) / (1.0 + e.df)) + 1.0;
  }
  return Vocab(std::move(entries));
}

std::vector<double> SparseVector::to_dense() const {
  std::vector<double> d(dim, 0.0);
  for (std::size_t i = 0; i < indices.size(); ++i) d[indices[i]] = values[i];
  return d;
}

double SparseVector::norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

SparseVector tfidf_window(const Vocab& vocab, const Meeting& meeting, const Window& window,
                          std::size_t max_order) {
  std::map<std::size_t, double> tf;
  for (const auto& u : meeting.utterances) {
    std::vector<std::string> tokens;
    for (const auto& w : u.words) {
      if (w.start_s >= window.start_s && w.start_s < window.end_s) {
        tokens.push_back(normalize_token(w.text));
      }
    }
    for_each_ngram(tokens, max_order, [&](const NGram& g) {
      const long idx = vocab.find(g);
      if (idx >= 0) tf[static_cast<std::size_t>(idx)] += 1.0;
    });
  }
  SparseVector v;
  v.dim = vocab.size();
  for (const auto& [idx, count] : tf) {
    v.indices.push_back(idx);
    v.values.push_back(count * vocab.entries()[idx].idf);
  }
  const double n = v.norm();
  if (n > 0.0) {
    for (auto& x : v.values) x /= n;
  }
  return v;
}

PoolMethod parse_pool_method(const std::string& name) {
  if (name == "l2") return PoolMethod::kL2;
  if (name == "rms") return PoolMethod::kRms;
  if (name == "mean") return PoolMethod::kMean;
  if (name == "max") return PoolMethod::kMax;
  if (name == "min") return PoolMethod::kMin;
  throw ValidationError("unknown pooling method '" + name + "'");
}

const char* pool_method_name(PoolMethod m) {
  switch (m) {
    case PoolMethod::kL2: return "l2";
    case PoolMethod::kRms: return "rms";
    case PoolMethod::kMean: return "mean";
    case PoolMethod::kMax: return "max";
    case PoolMethod::kMin: return "min";
  }
  return "?";
}

PooledVector pool(std::span<const std::vector<double>* const> vectors, std::size_t dim,
                  PoolMethod method) {
  PooledVector out;
  out.values.assign(dim, 0.0);
  out.count = vectors.size();
  if (vectors.empty()) return out;
  for (const auto* v : vectors) {
    if (v->size() != dim) {
      throw ValidationError("pooling: vector length " + std::to_string(v->size()) +
                            " != dim " + std::to_string(dim));
    }
  }
  auto& acc = out.values;
  switch (method) {
    case PoolMethod::kL2:
    case PoolMethod::kRms:
      for (const auto* v : vectors) kernels::sumsq_into(*v, acc);
      if (method == PoolMethod::kRms) kernels::scale(1.0 / vectors.size(), acc);
      for (auto& x : acc) x = std::sqrt(x);
      break;
    case PoolMethod::kMean:
      for (const auto* v : vectors) kernels::axpy(1.0, *v, acc);
      kernels::scale(1.0 / vectors.size(), acc);
      break;
    case PoolMethod::kMax:
      acc = *vectors[0];
      for (const auto* v : vectors.subspan(1)) kernels::max_into(*v, acc);
      break;
    case PoolMethod::kMin:
      acc = *vectors[0];
      for (const auto* v : vectors.subspan(1)) kernels::min_into(*v, acc);
      break;
  }
  return out;
}

PooledVector pool_vectors(const DenseVectorStore& store, const Meeting& meeting,
                          const Window& window, PoolMethod method) {
  std::vector<const std::vector<double>*> found;
  for (const auto& u : meeting.utterances) {
    if (!overlaps(u.start_s, u.end_s, window.start_s, window.end_s)) continue;
    const std::string truncated = u.id + "#" + std::to_string(window.index);
    const auto* v = store.find(truncated);
    if (v == nullptr) v = store.find(u.id);
    if (v == nullptr) {
      throw ValidationError("no vector for utterance overlapping window " + meeting.id + "#" +
                            std::to_string(window.index) + " (tried '" + truncated + "' and '" +
                            u.id + "')");
    }
    found.push_back(v);
  }
  return pool(found, store.dim(), method);
}

void write_vocab(const Vocab& vocab, const std::filesystem::path& file) {
  json j = json::array();
  for (const auto& e : vocab.entries()) {
    j.push_back(json::array({e.ngram, e.idf, e.count, e.df}));
  }
  detail::write_text_file(file, j.dump() + "\n");
}

Vocab read_vocab(const std::filesystem::path& file) {
  const json j = detail::read_json_file(file);
  std::vector<VocabEntry> entries;
  try {
    for (const auto& row : j) {
      VocabEntry e;
      e.ngram = row.at(0).get<NGram>();
      e.idf = row.at(1).get<double>();
      if (row.size() > 3) {
        e.count = row.at(2).get<std::size_t>();
        e.df = row.at(3).get<std::size_t>();
      }
      entries.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw ValidationError(file.string() + ": " + e.what());
  }
  return Vocab(std::move(entries));
}

}  // namespace hotspot
