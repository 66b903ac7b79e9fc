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
// Stage orchestration over an on-disk cache directory.
//
// Every cache file starts with (or embeds) a fingerprint: the SHA-256 of the
// stage name, the config subsection the stage reads, and the fingerprints of
// its inputs. A stage whose output already carries the expected fingerprint
// does no work.
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "hotspot/activity.hpp"
#include "hotspot/corpus.hpp"
#include "hotspot/fusion.hpp"
#include "hotspot/lexical.hpp"
#include "hotspot/models.hpp"
#include "hotspot/synth.hpp"
#include "hotspot/windowing.hpp"

namespace hotspot {

struct PipelinePaths {
  std::filesystem::path corpus;
  std::filesystem::path splits;
  std::filesystem::path embeddings;
  std::filesystem::path prosody;
  std::filesystem::path cache_dir;
};

struct ProsodyParams {
  double subwindow_s = 5.0;
  /// Cell layers between the input and the pooling step.
  std::vector<std::size_t> hidden{512, 128, 16};
  double dropout = 0.4;
  PosteriorMode posterior_mode = PosteriorMode::kKFold;
  std::size_t folds = 5;
  MLPConfig mlp;
};

/// Networks over flat window vectors (any block but prosody).
struct FlatMLPParams {
  std::vector<std::size_t> hidden{64, 32, 12};
  double dropout = 0.4;
  MLPConfig mlp;
};

struct PipelineConfig {
  PipelinePaths paths;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  WindowParams window;
  ActivityParams activity;
  VocabParams vocab;
  PoolMethod pool = PoolMethod::kL2;
  ProsodyParams prosody;
  FlatMLPParams mlp;
  LRConfig lr;
  FusionSpec fusion = FusionSpec::parse("activity,embed,prosody");
  std::vector<Block> ablation_blocks{Block::kActivity, Block::kEmbed, Block::kProsody};
  bool ablation_laughter = true;
  std::size_t cv_folds = 0;  ///< 0: max(2, round(meetings / 10))

  /// Relative paths resolve against base_dir. Errors name the field (and
  /// the line for syntax errors).
  static PipelineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static PipelineConfig load(const std::filesystem::path& file);
  /// Paths are written relative to base_dir when they lie beneath it.
  nlohmann::json to_json(const std::filesystem::path& base_dir = {}) const;
  /// Hash of the whole config (paths excluded).
  std::string fingerprint() const;
};

/// A config for the files synth writes into out_dir, with settings sized for
/// a single CPU core.
PipelineConfig desk_bench_config(const std::filesystem::path& out_dir, std::uint64_t seed);

/// Exclusive hold on a cache directory. A lock left by a dead process is
/// taken over.
class CacheLock {
 public:
  explicit CacheLock(const std::filesystem::path& cache_dir);
  ~CacheLock();
  CacheLock(const CacheLock&) = delete;
  CacheLock& operator=(const CacheLock&) = delete;

 private:
  std::filesystem::path file_;
};

struct StageReport {
  std::string stage;
  bool recomputed = false;
  std::vector<std::filesystem::path> artifacts;
  std::string summary;
};

enum class ModelKind { kLR, kMLP };
ModelKind parse_model_kind(const std::string& name);

class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config);
  ~Pipeline();

  const PipelineConfig& config() const { return cfg_; }

  StageReport validate();
  StageReport windows();
  /// activity (which also yields laughter), embed, tfidf, or prosody
  /// (normalization statistics).
  StageReport featurize(Block block);
  StageReport train(ModelKind kind, Block block);
  StageReport fuse();
  /// target: "fusion", "lr_<block>" or "mlp_<block>".
  StageReport eval(Split split, const std::string& target = "fusion");
  StageReport cv();
  StageReport ablate();
  StageReport stats();

  /// Path of a named cache artifact.
  std::filesystem::path artifact(const std::string& name) const;

 private:
  struct State;
  PipelineConfig cfg_;
  std::unique_ptr<State> st_;
};

/// Generates a synthetic corpus into out_dir and writes hotspot.json next to
/// it, pointing at the generated files.
StageReport run_synth(const SynthConfig& config, const std::filesystem::path& out_dir);

/// Header line of a cache file, or nullopt when the file is missing.
std::optional<nlohmann::json> read_cache_header(const std::filesystem::path& file);

}  // namespace hotspot
