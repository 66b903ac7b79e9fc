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

// Seeded synthetic meetings with planted involvement signal.
//
// Hot regions are sampled per meeting. Inside them the generator raises the
// turn rate, the overlap probability and the laughter rate, injects
// hot-marker n-grams, and shifts the utterance and prosody vectors. Every
// utterance starting inside a hot region is labeled "b" (or "b+").
//
// Multipliers at or below 1 leave the baseline unchanged, so an all-zero
// signal configuration gives hot and not-hot regions identical statistics.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "hotspot/corpus.hpp"
#include "hotspot/dense_store.hpp"
#include "hotspot/windowing.hpp"

namespace hotspot {

struct SynthSignal {
  double turn_rate_multiplier = 0.0;
  double overlap_multiplier = 0.0;
  double hot_vocab_probability = 0.0;
  double embedding_shift = 0.0;
  double prosody_shift = 0.0;
  double laughter_rate_multiplier = 0.0;
};

struct SynthConfig {
  std::uint64_t seed = 20191;
  std::size_t train_meetings = 12;
  std::size_t dev_meetings = 3;
  std::size_t eval_meetings = 5;
  double duration_s = 1200.0;
  std::size_t speakers = 4;
  /// Expected hot regions per second of meeting.
  double hot_region_rate = 2.5 / 1200.0;
  double hot_len_min_s = 30.0;
  double hot_len_max_s = 60.0;
  /// Per hot region and signal family (interaction, lexical, prosodic), the
  /// planted effect is scaled by 1 + spread * U(-1, 1), drawn independently.
  double modality_spread = 0.0;
  double base_overlap_probability = 0.15;
  double base_laughter_per_min = 0.5;
  std::size_t embedding_dim = 32;
  std::size_t prosody_dim = 24;
  std::size_t signal_dims = 4;
  SynthSignal signal;
  WindowParams window;

  /// 12/3/5 meetings of 1200 s, 4 speakers, embedding dim 32, prosody dim 24.
  static SynthConfig desk_bench();
  /// Desk-bench with every signal strength at zero.
  static SynthConfig null_signal();

  void validate() const;
  nlohmann::json to_json() const;
  static SynthConfig from_json(const nlohmann::json& j);
};

struct SynthLedgerSplit {
  std::size_t meetings = 0;
  std::size_t utterances = 0;
  std::size_t words = 0;
  std::size_t windows = 0;
  std::size_t hot_windows = 0;
  std::size_t hot_regions = 0;
  std::size_t laughter_events = 0;
};

struct SynthLedger {
  SynthLedgerSplit training, development, evaluation;
  /// Planted hot window indices per meeting.
  std::map<std::string, std::vector<int>> hot_windows;

  const SynthLedgerSplit& split(Split s) const;
  nlohmann::json to_json() const;
};

struct SynthOutput {
  Corpus corpus;
  DenseVectorStore embeddings;
  DenseVectorStore prosody;
  SynthLedger ledger;
};

SynthOutput generate(const SynthConfig& config);

struct SynthPaths {
  std::filesystem::path corpus_dir;
  std::filesystem::path splits;
  std::filesystem::path embeddings;
  std::filesystem::path prosody;
  std::filesystem::path ledger;
  std::filesystem::path config;  ///< pipeline config pointing at the above
};

SynthPaths synth_paths(const std::filesystem::path& out_dir);

/// Writes corpus, splits, vector stores, ledger and a pipeline config.
SynthPaths write_synth(const SynthOutput& out, const SynthConfig& config,
                       const std::filesystem::path& out_dir);

}  // namespace hotspot
