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

#include <algorithm>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hotspot/corpus.hpp"

namespace hotspot {

enum class WindowLabel { kNotHot = 0, kHot = 1 };

struct Window {
  std::string meeting_id;
  int index = 0;
  Seconds start_s = 0.0;
  Seconds end_s = 0.0;
  WindowLabel label = WindowLabel::kNotHot;

  bool hot() const { return label == WindowLabel::kHot; }
  bool operator==(const Window&) const = default;
};

struct WindowParams {
  Seconds window_len_s = 60.0;
  Seconds step_s = 15.0;
};

struct WindowBuild {
  std::vector<Window> windows;
  /// Set when the meeting is shorter than one window.
  std::optional<std::string> warning;
};

/// Positive-measure overlap of [a0, a1] and [b0, b1].
inline bool overlaps(Seconds a0, Seconds a1, Seconds b0, Seconds b1) {
  return std::min(a1, b1) - std::max(a0, b0) > 0.0;
}

/// Full-length windows at start = k * step while start + len <= duration.
/// A window is hot iff it overlaps an involved utterance with positive
/// measure; touching at a single instant does not count.
WindowBuild build_windows(const Meeting& meeting, const WindowParams& params = {});

struct WindowSet {
  Split split = Split::kTraining;
  std::vector<Window> windows;

  std::size_t hot_count() const;
  double hot_share() const;
};

/// Windows for every meeting of a split, meetings in split order.
WindowSet build_split_windows(const Corpus& corpus, Split split,
                              const WindowParams& params = {},
                              std::vector<std::string>* warnings = nullptr);

/// Adds window counts and hot shares to a corpus_stats table, plus an
/// "overall" row aggregating all splits.
StatsTable window_stats(const Corpus& corpus, const std::vector<WindowSet>& sets);

void write_windows(const std::vector<WindowSet>& sets, const std::filesystem::path& file,
                   const std::string& fingerprint);
std::vector<Window> read_windows(const std::filesystem::path& file);

}  // namespace hotspot
