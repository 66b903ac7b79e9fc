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

#include "hotspot/prosody.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hotspot/error.hpp"
#include "json_util.hpp"

namespace hotspot {

using nlohmann::json;

namespace {

std::int64_t to_ms(Seconds s) { return std::llround(s * 1000.0); }

}  // namespace

std::string format_cell_key(const CellKey& key) {
  std::string start;
  if (key.start_ms % 1000 == 0) {
    start = std::to_string(key.start_ms / 1000);
  } else {
    start = json(key.start_ms / 1000.0).dump();
  }
  return key.meeting_id + "#" + std::to_string(key.channel) + "#" + start;
}

CellKey parse_cell_key(const std::string& key) {
  const auto last = key.rfind('#');
  if (last == std::string::npos || last == 0) {
    throw ValidationError("bad prosody key '" + key + "'");
  }
  const auto mid = key.rfind('#', last - 1);
  if (mid == std::string::npos || mid == 0) throw ValidationError("bad prosody key '" + key + "'");
  CellKey k;
  k.meeting_id = key.substr(0, mid);
  try {
    std::size_t used = 0;
    const std::string ch = key.substr(mid + 1, last - mid - 1);
    k.channel = std::stoi(ch, &used);
    if (used != ch.size() || k.channel < 0) throw std::invalid_argument("channel");
    const std::string st = key.substr(last + 1);
    const double start = std::stod(st, &used);
    if (used != st.size() || !std::isfinite(start) || start < 0) {
      throw std::invalid_argument("start");
    }
    k.start_ms = to_ms(start);
  } catch (const std::exception&) {
    throw ValidationError("bad prosody key '" + key + "'");
  }
  return k;
}

ProsodyStore::ProsodyStore(DenseVectorStore store, Seconds subwindow_s)
    : store_(std::move(store)), subwindow_s_(subwindow_s) {
  if (store_.kind() != kProsodySubwindowKind) {
    throw ValidationError("prosody store has kind '" + store_.kind() + "'");
  }
  reindex();
}

ProsodyStore::ProsodyStore(const ProsodyStore& o)
    : store_(o.store_), subwindow_s_(o.subwindow_s_), normalized_(o.normalized_) {
  reindex();
}

ProsodyStore& ProsodyStore::operator=(const ProsodyStore& o) {
  if (this != &o) {
    store_ = o.store_;
    subwindow_s_ = o.subwindow_s_;
    normalized_ = o.normalized_;
    reindex();
  }
  return *this;
}

void ProsodyStore::reindex() {
  cells_.clear();
  const std::int64_t grid_ms = to_ms(subwindow_s_);
  for (const auto& [key, vec] : store_.entries()) {
    CellKey k = parse_cell_key(key);
    if (k.start_ms % grid_ms != 0) {
      throw ValidationError("prosody key '" + key + "' is not on the subwindow grid");
    }
    if (!cells_.emplace(k, &vec).second) {
      throw ValidationError("duplicate prosody cell '" + key + "'");
    }
  }
}

const std::vector<double>* ProsodyStore::find(const CellKey& key) const {
  auto it = cells_.find(key);
  return it == cells_.end() ? nullptr : it->second;
}

int ProsodyStore::channel_count(const std::string& meeting_id) const {
  int n = 0;
  auto it = cells_.lower_bound(CellKey{meeting_id, 0, 0});
  for (; it != cells_.end() && it->first.meeting_id == meeting_id; ++it) {
    n = std::max(n, it->first.channel + 1);
  }
  return n;
}

ProsodyStore ProsodyStore::normalized_copy(const NormStats& stats) const {
  if (normalized_) throw ValidationError("prosody store is already normalized");
  if (stats.dim() != dim()) throw ValidationError("normalization stats dimension mismatch");
  DenseVectorStore out(store_.dim(), store_.kind());
  std::vector<double> buf(dim());
  for (const auto& [key, vec] : store_.entries()) {
    stats.apply(vec, buf);
    out.insert(key, buf);
  }
  ProsodyStore result;
  result.store_ = std::move(out);
  result.subwindow_s_ = subwindow_s_;
  result.normalized_ = true;
  result.reindex();
  return result;
}

ProsodyStore load_prosody_store(const std::filesystem::path& file, Seconds subwindow_s) {
  try {
    return ProsodyStore(load_dense_store(file, std::string(kProsodySubwindowKind)), subwindow_s);
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    if (msg.rfind(file.string(), 0) == 0) throw;
    throw ValidationError(file.string() + ": " + msg);
  }
}

void NormStats::apply(std::span<const double> x, std::span<double> out) const {
  for (std::size_t d = 0; d < mean.size(); ++d) {
    out[d] = constant[d] ? 0.0 : (x[d] - mean[d]) / std[d];
  }
}

std::vector<CellKey> window_cells(const ProsodyStore& store, const Window& window) {
  std::vector<CellKey> out;
  const std::int64_t sub = to_ms(store.subwindow_s());
  const std::int64_t lo = to_ms(window.start_s);
  const std::int64_t hi = to_ms(window.end_s);
  auto it = store.cells().lower_bound(CellKey{window.meeting_id, 0, 0});
  for (; it != store.cells().end() && it->first.meeting_id == window.meeting_id; ++it) {
    const auto s = it->first.start_ms;
    if (s >= lo && s + sub <= hi) out.push_back(it->first);
  }
  return out;
}

NormStats fit_norm_stats(const ProsodyStore& store, std::span<const Window> training_windows,
                         const std::string& fitted_on) {
  std::set<CellKey> cells;
  for (const auto& w : training_windows) {
    for (auto& k : window_cells(store, w)) cells.insert(std::move(k));
  }
  if (cells.empty()) throw ValidationError("no prosody cells in the training windows");
  const std::size_t dim = store.dim();
  NormStats stats;
  stats.fitted_on = fitted_on;
  stats.mean.assign(dim, 0.0);
  stats.std.assign(dim, 0.0);
  stats.constant.assign(dim, false);
  std::vector<double> lo(dim, HUGE_VAL), hi(dim, -HUGE_VAL);
  for (const auto& k : cells) {
    const auto& v = *store.find(k);
    for (std::size_t d = 0; d < dim; ++d) {
      stats.mean[d] += v[d];
      lo[d] = std::min(lo[d], v[d]);
      hi[d] = std::max(hi[d], v[d]);
    }
  }
  const double n = static_cast<double>(cells.size());
  for (auto& m : stats.mean) m /= n;
  for (const auto& k : cells) {
    const auto& v = *store.find(k);
    for (std::size_t d = 0; d < dim; ++d) {
      const double c = v[d] - stats.mean[d];
      stats.std[d] += c * c;
    }
  }
  for (std::size_t d = 0; d < dim; ++d) {
    if (lo[d] == hi[d]) {
      stats.constant[d] = true;
      stats.mean[d] = lo[d];
      stats.std[d] = 0.0;
    } else {
      stats.std[d] = std::sqrt(stats.std[d] / n);
    }
  }
  return stats;
}

std::size_t ProsodyGrid::present_count() const {
  return static_cast<std::size_t>(std::count(present.begin(), present.end(), 1));
}

ProsodyGrid build_grid(const ProsodyStore& store, const NormStats& stats, const Window& window,
                       std::size_t channels) {
  if (store.normalized()) {
    throw ValidationError("build_grid expects raw cells; the store is already normalized");
  }
  if (stats.dim() != store.dim()) throw ValidationError("normalization stats dimension mismatch");
  ProsodyGrid g;
  g.meeting_id = window.meeting_id;
  g.window_index = window.index;
  g.channels = channels;
  g.steps = static_cast<std::size_t>(
      std::llround((window.end_s - window.start_s) / store.subwindow_s()));
  g.dim = store.dim();
  g.data.assign(g.channels * g.steps * g.dim, 0.0);
  g.present.assign(g.channels * g.steps, 0);
  const std::int64_t sub = to_ms(store.subwindow_s());
  const std::int64_t lo = to_ms(window.start_s);
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t t = 0; t < g.steps; ++t) {
      const auto* v = store.find(
          CellKey{window.meeting_id, static_cast<int>(c), lo + static_cast<std::int64_t>(t) * sub});
      if (v == nullptr) continue;
      g.present[c * g.steps + t] = 1;
      stats.apply(*v, std::span<double>(g.data.data() + (c * g.steps + t) * g.dim, g.dim));
    }
  }
  return g;
}

std::size_t grid_channels(const Meeting& meeting, const ProsodyStore& store) {
  int n = store.channel_count(meeting.id);
  for (const auto& u : meeting.utterances) n = std::max(n, u.channel + 1);
  return static_cast<std::size_t>(std::max(n, 1));
}

void write_norm_stats(const NormStats& stats, const std::filesystem::path& file,
                      const std::string& fingerprint) {
  std::vector<int> constant(stats.constant.begin(), stats.constant.end());
  json j = {{"mean", stats.mean},
                  {"std", stats.std},
                  {"constant", constant},
                  {"fitted_on", stats.fitted_on}};
  if (!fingerprint.empty()) j["fingerprint"] = fingerprint;
  detail::write_text_file(file, j.dump() + "\n");
}

NormStats read_norm_stats(const std::filesystem::path& file) {
  const json j = detail::read_json_file(file);
  NormStats s;
  try {
    s.mean = j.at("mean").get<std::vector<double>>();
    s.std = j.at("std").get<std::vector<double>>();
    for (int c : j.at("constant").get<std::vector<int>>()) s.constant.push_back(c != 0);
    s.fitted_on = j.at("fitted_on").get<std::string>();
  } catch (const json::exception& e) {
    throw ValidationError(file.string() + ": " + e.what());
  }
  if (s.std.size() != s.mean.size() || s.constant.size() != s.mean.size()) {
    throw ValidationError(file.string() + ": inconsistent dimensions");
  }
  return s;
}

}  // namespace hotspot
