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

#include "hotspot/windowing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "hotspot/error.hpp"
#include "json_util.hpp"

namespace hotspot {

using nlohmann::json;

WindowBuild build_windows(const Meeting& meeting, const WindowParams& params) {
  if (!(params.window_len_s > 0.0) || !(params.step_s > 0.0)) {
    throw ValidationError("window length and step must be positive");
  }
  WindowBuild out;
  if (meeting.duration_s < params.window_len_s) {
    out.warning = "meeting '" + meeting.id + "' is shorter than one window (" +
                  std::to_string(meeting.duration_s) + " s); no windows emitted";
    return out;
  }
  std::vector<std::pair<Seconds, Seconds>> hot_spans;
  for (const auto& u : meeting.utterances) {
    if (involved(u)) hot_spans.emplace_back(u.start_s, u.end_s);
  }
  for (int k = 0;; ++k) {
    const Seconds start = k * params.step_s;
    const Seconds end = start + params.window_len_s;
    if (end > meeting.duration_s) break;
    Window w{meeting.id, k, start, end, WindowLabel::kNotHot};
    for (const auto& [s, e] : hot_spans) {
      if (overlaps(s, e, start, end)) {
        w.label = WindowLabel::kHot;
        break;
      }
    }
    out.windows.push_back(std::move(w));
  }
  return out;
}

std::size_t WindowSet::hot_count() const {
  return static_cast<std::size_t>(
      std::count_if(windows.begin(), windows.end(), [](const Window& w) { return w.hot(); }));
}

double WindowSet::hot_share() const {
  return windows.empty() ? 0.0 : static_cast<double>(hot_count()) / windows.size();
}

WindowSet build_split_windows(const Corpus& corpus, Split split, const WindowParams& params,
                              std::vector<std::string>* warnings) {
  WindowSet set;
  set.split = split;
  for (const Meeting* m : corpus.split(split)) {
    auto built = build_windows(*m, params);
    if (built.warning && warnings) warnings->push_back(*built.warning);
    for (auto& w : built.windows) set.windows.push_back(std::move(w));
  }
  return set;
}

StatsTable window_stats(const Corpus& corpus, const std::vector<WindowSet>& sets) {
  StatsTable table = corpus_stats(corpus);
  SplitStats overall;
  overall.split = "overall";
  for (auto& row : table) {
    for (const auto& set : sets) {
      if (row.split != split_name(set.split)) continue;
      row.windows += set.windows.size();
      row.hot_windows += set.hot_count();
    }
    overall.meetings += row.meetings;
    overall.words += row.words;
    overall.utterances += row.utterances;
    overall.windows += row.windows;
    overall.hot_windows += row.hot_windows;
  }
  table.push_back(overall);
  return table;
}

void write_windows(const std::vector<WindowSet>& sets, const std::filesystem::path& file,
                   const std::string& fingerprint) {
  std::string body = json{{"kind", "windows"}, {"fingerprint", fingerprint}}.dump() + "\n";
  for (const auto& set : sets) {
    for (const auto& w : set.windows) {
      body += json{{"meeting_id", w.meeting_id}, {"index", w.index}, {"start_s", w.start_s},
                   {"end_s", w.end_s}, {"label", w.hot() ? "hot" : "not_hot"}}
                  .dump() +
              "\n";
    }
  }
  detail::write_text_file(file, body);
}

std::vector<Window> read_windows(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DependencyError("missing windows cache " + file.string());
  std::vector<Window> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      if (j.contains("kind")) continue;  // header
      Window w;
      w.meeting_id = detail::require<std::string>(j, "meeting_id");
      w.index = detail::require<int>(j, "index");
      w.start_s = detail::require<double>(j, "start_s");
      w.end_s = detail::require<double>(j, "end_s");
      const auto label = detail::require<std::string>(j, "label");
      if (label != "hot" && label != "not_hot") throw ValidationError("bad label '" + label + "'");
      w.label = label == "hot" ? WindowLabel::kHot : WindowLabel::kNotHot;
      out.push_back(std::move(w));
    } catch (const std::exception& e) {
      throw ValidationError(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace hotspot
