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

// Transcript data model and the line-delimited corpus file format.
//
// A corpus directory holds:
//   meetings.json       [{"id", "duration_s", "speakers": [...]}, ...]
//   <meeting_id>.jsonl  one utterance record per line
//   splits.json         {"training": [...], "development": [...],
//                        "evaluation": [...]}   (optional; may live elsewhere)

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace hotspot {

using Seconds = double;

struct Word {
  std::string text;
  Seconds start_s = 0.0;
  Seconds end_s = 0.0;

  bool operator==(const Word&) const = default;
};

enum class LaughterKind { kStandalone, kWithinSpeech };

struct LaughterEvent {
  Seconds start_s = 0.0;
  Seconds end_s = 0.0;
  LaughterKind kind = LaughterKind::kStandalone;

  bool operator==(const LaughterEvent&) const = default;
};

struct Utterance {
  std::string id;
  std::string meeting_id;
  std::string speaker_id;
  int channel = 0;
  Seconds start_s = 0.0;
  Seconds end_s = 0.0;
  std::vector<Word> words;
  /// Raw annotation level, stored verbatim.
  std::string hot_label;
  std::vector<LaughterEvent> laughter;

  bool operator==(const Utterance&) const = default;
};

/// Involvement is marked by the "b" and "b+" annotation levels.
bool involved(const Utterance& u);

struct Meeting {
  std::string id;
  Seconds duration_s = 0.0;
  std::vector<std::string> speakers;
  std::vector<Utterance> utterances;

  bool operator==(const Meeting&) const = default;
};

enum class Split { kTraining, kDevelopment, kEvaluation };
inline constexpr Split kAllSplits[] = {Split::kTraining, Split::kDevelopment,
                                       Split::kEvaluation};

const char* split_name(Split s);
/// Accepts "training"/"train", "development"/"dev", "evaluation"/"eval".
Split parse_split(const std::string& name);

struct SplitConfig {
  std::vector<std::string> training;
  std::vector<std::string> development;
  std::vector<std::string> evaluation;

  const std::vector<std::string>& ids(Split s) const;
  bool operator==(const SplitConfig&) const = default;
};

/// Immutable after load; meetings are stored sorted by id.
class Corpus {
 public:
  Corpus() = default;
  Corpus(std::vector<Meeting> meetings, SplitConfig splits);

  const std::vector<Meeting>& meetings() const { return meetings_; }
  const SplitConfig& splits() const { return splits_; }
  const Meeting& meeting(const std::string& id) const;
  bool contains(const std::string& id) const;
  /// Meetings of one split, in split-file order.
  std::vector<const Meeting*> split(Split s) const;

  bool operator==(const Corpus& o) const {
    return meetings_ == o.meetings_ && splits_ == o.splits_;
  }

 private:
  std::vector<Meeting> meetings_;
  std::map<std::string, std::size_t> index_;
  SplitConfig splits_;
};

/// Throws ValidationError naming the offending record.
void validate_meeting(const Meeting& m);
void validate_splits(const SplitConfig& splits, const std::vector<Meeting>& meetings);

/// Loads and validates a corpus directory. Split membership is validated
/// against the meetings index.
Corpus load_corpus(const std::filesystem::path& dir, const SplitConfig& split);
SplitConfig load_splits(const std::filesystem::path& file);

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);
void write_splits(const SplitConfig& splits, const std::filesystem::path& file);

struct SplitStats {
  std::string split;
  std::size_t meetings = 0;
  std::size_t words = 0;
  std::size_t utterances = 0;
  std::size_t windows = 0;
  std::size_t hot_windows = 0;

  double hot_share() const {
    return windows == 0 ? 0.0 : static_cast<double>(hot_windows) / windows;
  }
};

using StatsTable = std::vector<SplitStats>;

/// Meeting, word and utterance counts per split (training, development,
/// evaluation order). Window columns are filled in by window_stats.
StatsTable corpus_stats(const Corpus& corpus);

}  // namespace hotspot
