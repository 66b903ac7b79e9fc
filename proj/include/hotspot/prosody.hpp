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

// Per-subwindow acoustic-prosodic vectors arranged on a (channel x time)
// grid, normalized with training-set statistics.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "hotspot/corpus.hpp"
#include "hotspot/dense_store.hpp"
#include "hotspot/windowing.hpp"

namespace hotspot {

struct CellKey {
  std::string meeting_id;
  int channel = 0;
  std::int64_t start_ms = 0;

  auto operator<=>(const CellKey&) const = default;
};

std::string format_cell_key(const CellKey& key);
CellKey parse_cell_key(const std::string& key);

struct NormStats;

class ProsodyStore {
 public:
  ProsodyStore() = default;
  ProsodyStore(const ProsodyStore& o);
  ProsodyStore& operator=(const ProsodyStore& o);
  ProsodyStore(ProsodyStore&&) noexcept = default;
  ProsodyStore& operator=(ProsodyStore&&) noexcept = default;
  /// Validates and indexes the keys of a "prosody_subwindow" store.
  explicit ProsodyStore(DenseVectorStore store, Seconds subwindow_s = 5.0);

  std::size_t dim() const { return store_.dim(); }
  std::size_t size() const { return cells_.size(); }
  Seconds subwindow_s() const { return subwindow_s_; }
  bool normalized() const { return normalized_; }
  const DenseVectorStore& raw() const { return store_; }

  const std::vector<double>* find(const CellKey& key) const;
  const std::map<CellKey, const std::vector<double>*>& cells() const { return cells_; }
  /// Highest channel index + 1 stored for a meeting (0 when none).
  int channel_count(const std::string& meeting_id) const;

  /// A copy with every cell normalized; throws if already normalized.
  ProsodyStore normalized_copy(const NormStats& stats) const;

 private:
  void reindex();

  DenseVectorStore store_;
  Seconds subwindow_s_ = 5.0;
  bool normalized_ = false;
  std::map<CellKey, const std::vector<double>*> cells_;
};

ProsodyStore load_prosody_store(const std::filesystem::path& file, Seconds subwindow_s = 5.0);

struct NormStats {
  std::vector<double> mean;
  std::vector<double> std;
  /// std == 0: the dimension is passed through as zero after centering.
  std::vector<bool> constant;
  std::string fitted_on;

  std::size_t dim() const { return mean.size(); }
  /// (x - mean) / std, or 0 for constant dimensions.
  void apply(std::span<const double> x, std::span<double> out) const;

  bool operator==(const NormStats&) const = default;
};

/// Cells of a meeting that fall inside a window: channel any, start in
/// {w.start, w.start + sub, ..., w.end - sub}.
std::vector<CellKey> window_cells(const ProsodyStore& store, const Window& window);

/// Per-dimension mean and population standard deviation over the distinct
/// cells covered by the given windows.
NormStats fit_norm_stats(const ProsodyStore& store, std::span<const Window> training_windows,
                         const std::string& fitted_on = "training");

struct ProsodyGrid {
  std::string meeting_id;
  int window_index = 0;
  std::size_t channels = 0;
  std::size_t steps = 0;
  std::size_t dim = 0;
  std::vector<double> data;  ///< channels x steps x dim; absent cells zero
  std::vector<std::uint8_t> present;

  std::span<const double> cell(std::size_t c, std::size_t t) const {
    return {data.data() + (c * steps + t) * dim, dim};
  }
  bool has(std::size_t c, std::size_t t) const { return present[c * steps + t] != 0; }
  std::size_t present_count() const;
};

/// Grid of normalized cells for one window; missing cells are masked.
ProsodyGrid build_grid(const ProsodyStore& store, const NormStats& stats, const Window& window,
                       std::size_t channels);

/// Channel count used for a meeting's grids: max over utterance channels and
/// stored channels, at least 1.
std::size_t grid_channels(const Meeting& meeting, const ProsodyStore& store);

/// The fingerprint, when given, is stored alongside the statistics.
void write_norm_stats(const NormStats& stats, const std::filesystem::path& file,
                      const std::string& fingerprint = {});
NormStats read_norm_stats(const std::filesystem::path& file);

}  // namespace hotspot
