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

// Late fusion: activity and word features go straight into a final logistic
// regression; prosody enters through the log-posteriors of its network.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "hotspot/corpus.hpp"
#include "hotspot/models.hpp"
#include "hotspot/prosody.hpp"
#include "hotspot/windowing.hpp"

namespace hotspot {

enum class Block { kActivity, kEmbed, kTfidf, kProsody, kLaughter };

/// Concatenation order of the fused feature vector.
inline constexpr Block kBlockOrder[] = {Block::kActivity, Block::kEmbed, Block::kTfidf,
                                        Block::kProsody, Block::kLaughter};

const char* block_name(Block b);
/// Accepts the block names plus "prosody_posterior" and "words" (= embed).
Block parse_block(const std::string& name);

using WindowKey = std::pair<std::string, int>;
inline WindowKey key_of(const Window& w) { return {w.meeting_id, w.index}; }

/// One named feature block for a set of windows.
struct BlockFeatures {
  Block block = Block::kActivity;
  std::size_t dim = 0;
  std::map<WindowKey, std::vector<double>> rows;

  const std::vector<double>& at(const Window& w) const;
  /// Content hash over keys and values.
  std::string hash() const;
};

class FeatureBank {
 public:
  void put(BlockFeatures f);
  bool has(Block b) const { return blocks_.count(b) > 0; }
  const BlockFeatures& get(Block b) const;
  const std::map<Block, BlockFeatures>& blocks() const { return blocks_; }

 private:
  std::map<Block, BlockFeatures> blocks_;
};

enum class PosteriorMode { kInSample, kKFold };

struct FusionSpec {
  std::vector<Block> blocks;  ///< kept in kBlockOrder order
  PosteriorMode mode = PosteriorMode::kKFold;
  std::size_t folds = 5;

  bool includes(Block b) const;
  /// "activity,embed,prosody"
  static FusionSpec parse(const std::string& list);
  std::string to_string() const;
  void validate() const;
};

FeatureSchema fusion_schema(const FusionSpec& spec, const FeatureBank& bank);

/// Concatenates the included blocks for one window; throws DependencyError
/// when a block cache is missing.
std::vector<double> assemble_features(const FusionSpec& spec, const FeatureBank& bank,
                                      const Window& window);
Matrix assemble_matrix(const FusionSpec& spec, const FeatureBank& bank,
                       std::span<const Window> windows);

std::vector<int> labels_of(std::span<const Window> windows);

/// Everything the prosody branch needs.
struct ProsodyBranchInputs {
  const Corpus* corpus = nullptr;
  const ProsodyStore* store = nullptr;  ///< raw (unnormalized) cells
  const NormStats* stats = nullptr;
  const std::vector<Window>* train = nullptr;
  const std::vector<Window>* dev = nullptr;
  /// Windows that receive posteriors from the full-training-split model.
  std::vector<const std::vector<Window>*> heldout;
  std::vector<std::size_t> hidden;  ///< cell layers before Pool
  double dropout = 0.4;
  MLPConfig mlp;
  PosteriorMode mode = PosteriorMode::kKFold;
  std::size_t folds = 5;
};

struct ProsodyBranch {
  MLPModel model;
  /// (log p_hot, log p_not) per window.
  BlockFeatures posteriors;
};

/// Trains the prosody network on the training windows. Training-window
/// posteriors come from meeting-level k-fold refits (or the full model in
/// in-sample mode); held-out windows use the full model.
ProsodyBranch train_prosody_branch(const ProsodyBranchInputs& in);

struct FusedModel {
  FusionSpec spec;
  FeatureSchema schema;
  /// Empty when fusion is prosody alone: the network decides directly.
  std::optional<LRModel> lr;

  Posterior predict(const FeatureBank& bank, const Window& window) const;
  std::vector<int> decide(const FeatureBank& bank, std::span<const Window> windows) const;
};

FusedModel train_fusion(const FusionSpec& spec, const FeatureBank& bank,
                        std::span<const Window> train, const LRConfig& lr_config);

nlohmann::json fused_to_json(const FusedModel& m);
FusedModel fused_from_json(const nlohmann::json& j);

struct AblationRow {
  std::string group;  ///< "single", "all", "leave_one_out", "laughter"
  std::string label;
  FusionSpec spec;
  double uar = 0.0;
  double dev_uar = 0.0;
};

struct AblationReport {
  std::vector<AblationRow> rows;
  std::map<std::string, std::string> block_hashes;
  std::string fingerprint;

  const AblationRow* find(const std::string& group, const std::string& label) const;
  std::string to_text() const;
  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// Single-block, all-block and leave-one-out rows over base_blocks, plus
/// laughter rows when requested. Every row reads the same bank.
AblationReport ablation_report(const FeatureBank& bank, const std::vector<Block>& base_blocks,
                               std::span<const Window> train, std::span<const Window> dev,
                               std::span<const Window> eval, const LRConfig& lr_config,
                               bool laughter_rows);

}  // namespace hotspot
