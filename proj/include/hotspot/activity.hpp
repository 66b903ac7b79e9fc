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

// Speech-activity interaction features and laughter counts per window.

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hotspot/corpus.hpp"
#include "hotspot/windowing.hpp"

namespace hotspot {

struct Talkspurt {
  std::string speaker_id;
  Seconds start_s = 0.0;
  Seconds end_s = 0.0;

  bool operator==(const Talkspurt&) const = default;
};

/// Which intervals count as "speaking" when building talkspurts.
enum class ActivitySource { kWords, kUtterances };

struct ActivityParams {
  Seconds max_gap_s = 0.3;
  ActivitySource source = ActivitySource::kWords;
  /// Emit standalone and within-speech laughter as two counts.
  bool split_laughter_kinds = false;
};

inline constexpr std::size_t kOverlapDims = 6;
/// overlap(6) + unique speakers + turn switches
inline constexpr std::size_t kActivityDims = kOverlapDims + 2;

struct ActivityFeatures {
  std::array<double, kOverlapDims> overlap{};
  int unique_speakers = 0;
  int turn_switches = 0;
  int laughter_count = 0;
  int laughter_standalone = 0;
  int laughter_within_speech = 0;

  /// The 8-dim activity block: overlap, unique speakers, turn switches.
  std::vector<double> activity_vector() const;
  /// One joint count, or (standalone, within_speech) when split.
  std::vector<double> laughter_vector(bool split_kinds) const;
};

/// Per-speaker intervals merged when the gap between them is <= max_gap_s,
/// sorted by start (then speaker id). Spurts of one speaker are disjoint.
std::vector<Talkspurt> build_talkspurts(const Meeting& meeting, const ActivityParams& params = {});

/// Component i-1 is the fraction of the window during which at least i
/// distinct speakers are active; six or more speakers saturate the last one.
std::array<double, kOverlapDims> overlap_features(std::span<const Talkspurt> spurts,
                                                  const Window& window);
int unique_speaker_count(std::span<const Talkspurt> spurts, const Window& window);
/// Spurts with onset in [window.start, window.end).
int turn_switch_count(std::span<const Talkspurt> spurts, const Window& window);

struct LaughterTally {
  int standalone = 0;
  int within_speech = 0;
  int total() const { return standalone + within_speech; }
};
/// Laughter events with onset in [window.start, window.end).
LaughterTally laughter_count(const Meeting& meeting, const Window& window);

ActivityFeatures activity_features(const Meeting& meeting, std::span<const Talkspurt> spurts,
                                   const Window& window);

}  // namespace hotspot
