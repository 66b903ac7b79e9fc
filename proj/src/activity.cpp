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

#include "hotspot/activity.hpp"

#include <algorithm>
#include <set>
#include <utility>

namespace hotspot {

std::vector<double> ActivityFeatures::activity_vector() const {
  std::vector<double> v(overlap.begin(), overlap.end());
  v.push_back(unique_speakers);
  v.push_back(turn_switches);
  return v;
}

std::vector<double> ActivityFeatures::laughter_vector(bool split_kinds) const {
  if (split_kinds) {
    return {static_cast<double>(laughter_standalone), static_cast<double>(laughter_within_speech)};
  }
  return {static_cast<double>(laughter_count)};
}

std::vector<Talkspurt> build_talkspurts(const Meeting& meeting, const ActivityParams& params) {
  std::map<std::string, std::vector<std::pair<Seconds, Seconds>>> by_speaker;
  for (const auto& u : meeting.utterances) {
    auto& spans = by_speaker[u.speaker_id];
    if (params.source == ActivitySource::kUtterances) {
      if (u.start_s < u.end_s) spans.emplace_back(u.start_s, u.end_s);
    } else {
      for (const auto& w : u.words) spans.emplace_back(w.start_s, w.end_s);
    }
  }
  std::vector<Talkspurt> out;
  for (auto& [speaker, spans] : by_speaker) {
    std::sort(spans.begin(), spans.end());
    std::size_t i = 0;
    while (i < spans.size()) {
      Seconds start = spans[i].first;
      Seconds end = spans[i].second;
      ++i;
      while (i < spans.size() && spans[i].first - end <= params.max_gap_s) {
        end = std::max(end, spans[i].second);
        ++i;
      }
      out.push_back(Talkspurt{speaker, start, end});
    }
  }
  std::sort(out.begin(), out.end(), [](const Talkspurt& a, const Talkspurt& b) {
    return a.start_s != b.start_s ? a.start_s < b.start_s : a.speaker_id < b.speaker_id;
  });
  return out;
}

std::array<double, kOverlapDims> overlap_features(std::span<const Talkspurt> spurts,
                                                  const Window& window) {
  // Sweep over clipped spurt boundaries. Spurts of one speaker are disjoint,
  // so the number of open spurts equals the number of distinct speakers.
  std::vector<std::pair<Seconds, int>> events;
  for (const auto& s : spurts) {
    const Seconds a = std::max(s.start_s, window.start_s);
    const Seconds b = std::min(s.end_s, window.end_s);
    if (b > a) {
      events.emplace_back(a, +1);
      events.emplace_back(b, -1);
    }
  }
  std::sort(events.begin(), events.end());
  std::array<double, kOverlapDims> measure{};
  int active = 0;
  Seconds prev = window.start_s;
  for (const auto& [t, delta] : events) {
    if (t > prev && active > 0) {
      const int levels = std::min<int>(active, kOverlapDims);
      for (int i = 0; i < levels; ++i) measure[i] += t - prev;
    }
    prev = t;
    active += delta;
  }
  const double len = window.end_s - window.start_s;
  for (auto& m : measure) m = std::clamp(m / len, 0.0, 1.0);
  return measure;
}

int unique_speaker_count(std::span<const Talkspurt> spurts, const Window& window) {
  std::set<std::string_view> speakers;
  for (const auto& s : spurts) {
    if (overlaps(s.start_s, s.end_s, window.start_s, window.end_s)) speakers.insert(s.speaker_id);
  }
  return static_cast<int>(speakers.size());
}

int turn_switch_count(std::span<const Talkspurt> spurts, const Window& window) {
  return static_cast<int>(std::count_if(spurts.begin(), spurts.end(), [&](const Talkspurt& s) {
    return s.start_s >= window.start_s && s.start_s < window.end_s;
  }));
}

LaughterTally laughter_count(const Meeting& meeting, const Window& window) {
  LaughterTally tally;
  for (const auto& u : meeting.utterances) {
    for (const auto& l : u.laughter) {
      if (l.start_s < window.start_s || l.start_s >= window.end_s) continue;
      if (l.kind == LaughterKind::kStandalone) {
        ++tally.standalone;
      } else {
        ++tally.within_speech;
      }
    }
  }
  return tally;
}

ActivityFeatures activity_features(const Meeting& meeting, std::span<const Talkspurt> spurts,
                                   const Window& window) {
  ActivityFeatures f;
  f.overlap = overlap_features(spurts, window);
  f.unique_speakers = unique_speaker_count(spurts, window);
  f.turn_switches = turn_switch_count(spurts, window);
  const auto laughs = laughter_count(meeting, window);
  f.laughter_standalone = laughs.standalone;
  f.laughter_within_speech = laughs.within_speech;
  f.laughter_count = laughs.total();
  return f;
}

}  // namespace hotspot
