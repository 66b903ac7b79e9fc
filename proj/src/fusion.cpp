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

#include "hotspot/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "hotspot/error.hpp"
#include "hotspot/eval.hpp"
#include "hotspot/hashing.hpp"

namespace hotspot {

using nlohmann::json;

const char* block_name(Block b) {
  switch (b) {
    case Block::kActivity: return "activity";
    case Block::kEmbed: return "embed";
    case Block::kTfidf: return "tfidf";
    case Block::kProsody: return "prosody";
    case Block::kLaughter: return "laughter";
  }
  return "?";
}

Block parse_block(const std::string& name) {
  if (name == "activity" || name == "speech_activity") return Block::kActivity;
  if (name == "embed" || name == "words") return Block::kEmbed;
  if (name == "tfidf") return Block::kTfidf;
  if (name == "prosody" || name == "prosody_posterior") return Block::kProsody;
  if (name == "laughter") return Block::kLaughter;
  throw ValidationError("unknown feature block '" + name + "'");
}

const std::vector<double>& BlockFeatures::at(const Window& w) const {
  auto it = rows.find(key_of(w));
  if (it == rows.end()) {
    throw DependencyError(std::string("feature block '") + block_name(block) +
                          "' has no row for window " + w.meeting_id + "#" +
                          std::to_string(w.index));
  }
  return it->second;
}

std::string BlockFeatures::hash() const {
  Hasher h;
  h.update(block_name(block)).update(static_cast<std::int64_t>(dim));
  for (const auto& [key, vec] : rows) {
    h.update(key.first).update(std::int64_t{key.second}).update(std::span<const double>(vec));
  }
  return h.hex();
}

void FeatureBank::put(BlockFeatures f) {
  const Block b = f.block;
  blocks_[b] = std::move(f);
}

const BlockFeatures& FeatureBank::get(Block b) const {
  auto it = blocks_.find(b);
  if (it == blocks_.end()) {
    throw DependencyError(std::string("feature block '") + block_name(b) +
                          "' has not been computed");
  }
  return it->second;
}

bool FusionSpec::includes(Block b) const {
  return std::find(blocks.begin(), blocks.end(), b) != blocks.end();
}

FusionSpec FusionSpec::parse(const std::string& list) {
  std::set<Block> chosen;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(0, tok.find_first_not_of(" \t"));
    tok.erase(tok.find_last_not_of(" \t") + 1);
    if (!tok.empty()) chosen.insert(parse_block(tok));
  }
  FusionSpec spec;
  for (Block b : kBlockOrder) {
    if (chosen.count(b)) spec.blocks.push_back(b);
  }
  spec.validate();
  return spec;
}

std::string FusionSpec::to_string() const {
  std::string s;
  for (Block b : blocks) {
    if (!s.empty()) s += ",";
    s += block_name(b);
  }
  return s;
}

void FusionSpec::validate() const {
  if (blocks.empty()) throw ValidationError("fusion needs at least one block");
  if (mode == PosteriorMode::kKFold && folds < 2) {
    throw ValidationError("k-fold posterior mode needs at least 2 folds");
  }
}

FeatureSchema fusion_schema(const FusionSpec& spec, const FeatureBank& bank) {
  FeatureSchema s;
  for (Block b : kBlockOrder) {
    if (spec.includes(b)) s.push_back(SchemaEntry{block_name(b), bank.get(b).dim});
  }
  return s;
}

std::vector<double> assemble_features(const FusionSpec& spec, const FeatureBank& bank,
                                      const Window& window) {
  std::vector<double> v;
  for (Block b : kBlockOrder) {
    if (!spec.includes(b)) continue;
    const auto& row = bank.get(b).at(window);
    v.insert(v.end(), row.begin(), row.end());
  }
  return v;
}

Matrix assemble_matrix(const FusionSpec& spec, const FeatureBank& bank,
                       std::span<const Window> windows) {
  const std::size_t cols = schema_dim(fusion_schema(spec, bank));
  Matrix m(windows.size(), cols);
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto v = assemble_features(spec, bank, windows[i]);
    std::copy(v.begin(), v.end(), m.row(i).begin());
  }
  return m;
}

std::vector<int> labels_of(std::span<const Window> windows) {
  std::vector<int> y(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) y[i] = windows[i].hot() ? 1 : 0;
  return y;
}

// ---------------------------------------------------------------------------
// Prosody branch

namespace {

struct GridSet {
  const std::vector<Window>* windows;
  const ProsodyStore* store;
  const NormStats* stats;
  const std::map<std::string, std::size_t>* channels;

  ProsodyGrid operator()(std::size_t i) const {
    const Window& w = (*windows)[i];
    return build_grid(*store, *stats, w, channels->at(w.meeting_id));
  }
};

MLPModel fit_prosody(const ProsodyBranchInputs& in, const std::vector<Window>& train,
                     const std::map<std::string, std::size_t>& channels, std::uint64_t seed) {
  const auto y = labels_of(train);
  const auto s = sample_weights(y, class_weights(y));
  const auto data = MLPData::from_grids(GridSet{&train, in.store, in.stats, &channels},
                                        train.size(), y, s);
  std::vector<int> dev_y;
  std::vector<double> dev_s;
  std::optional<MLPData> dev;
  if (in.dev != nullptr && !in.dev->empty()) {
    dev_y = labels_of(*in.dev);
    dev_s.assign(dev_y.size(), 1.0);
    dev = MLPData::from_grids(GridSet{in.dev, in.store, in.stats, &channels}, in.dev->size(),
                              dev_y, dev_s);
  }
  MLPArch arch;
  arch.sizes.push_back(in.store->dim());
  arch.sizes.insert(arch.sizes.end(), in.hidden.begin(), in.hidden.end());
  arch.sizes.push_back(2);
  arch.pooled = true;
  arch.dropout = in.dropout;
  MLPConfig cfg = in.mlp;
  cfg.seed = seed;
  const FeatureSchema schema{{"prosody_cell", in.store->dim()}};
  return train_mlp(data, dev ? &*dev : nullptr, arch, schema, cfg);
}

void add_posteriors(const MLPModel& model, const std::vector<Window>& windows,
                    const ProsodyBranchInputs& in,
                    const std::map<std::string, std::size_t>& channels, BlockFeatures& out) {
  const GridSet grids{&windows, in.store, in.stats, &channels};
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const Posterior p = model.predict(grids(i));
    out.rows[key_of(windows[i])] = {p.log_hot, p.log_not};
  }
}

}  // namespace

ProsodyBranch train_prosody_branch(const ProsodyBranchInputs& in) {
  if (in.corpus == nullptr || in.store == nullptr || in.stats == nullptr || in.train == nullptr) {
    throw ValidationError("prosody branch: missing inputs");
  }
  std::map<std::string, std::size_t> channels;
  for (const auto& m : in.corpus->meetings()) channels[m.id] = grid_channels(m, *in.store);

  ProsodyBranch out;
  out.posteriors.block = Block::kProsody;
  out.posteriors.dim = 2;
  out.model = fit_prosody(in, *in.train, channels, in.mlp.seed);

  std::vector<std::string> meetings;
  for (const auto& w : *in.train) {
    if (meetings.empty() || meetings.back() != w.meeting_id) meetings.push_back(w.meeting_id);
  }
  std::sort(meetings.begin(), meetings.end());
  meetings.erase(std::unique(meetings.begin(), meetings.end()), meetings.end());
  const std::size_t folds = std::min(in.folds, meetings.size());
  if (in.mode == PosteriorMode::kInSample || folds < 2) {
    add_posteriors(out.model, *in.train, in, channels, out.posteriors);
  } else {
    const auto assignment = assign_folds(meetings, folds, derive_seed(in.mlp.seed, "prosody-folds"));
    for (std::size_t f = 0; f < assignment.size(); ++f) {
      const std::set<std::string> held(assignment[f].begin(), assignment[f].end());
      std::vector<Window> fit, predict;
      for (const auto& w : *in.train) (held.count(w.meeting_id) ? predict : fit).push_back(w);
      const auto model = fit_prosody(in, fit, channels,
                                     derive_seed(in.mlp.seed, "fold-" + std::to_string(f)));
      add_posteriors(model, predict, in, channels, out.posteriors);
    }
  }
  if (in.dev != nullptr) add_posteriors(out.model, *in.dev, in, channels, out.posteriors);
  for (const auto* ws : in.heldout) add_posteriors(out.model, *ws, in, channels, out.posteriors);
  return out;
}

// ---------------------------------------------------------------------------
// Fused model

Posterior FusedModel::predict(const FeatureBank& bank, const Window& window) const {
  if (lr) return lr->predict(assemble_features(spec, bank, window));
  const auto& row = bank.get(Block::kProsody).at(window);
  Posterior p;
  p.log_hot = row[0];
  p.log_not = row[1];
  p.p_hot = std::exp(row[0]);
  p.p_not = std::exp(row[1]);
  return p;
}

std::vector<int> FusedModel::decide(const FeatureBank& bank, std::span<const Window> windows) const {
  std::vector<int> out(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) out[i] = predict(bank, windows[i]).label();
  return out;
}

FusedModel train_fusion(const FusionSpec& spec, const FeatureBank& bank,
                        std::span<const Window> train, const LRConfig& lr_config) {
  spec.validate();
  FusedModel m;
  m.spec = spec;
  m.schema = fusion_schema(spec, bank);
  if (spec.blocks.size() == 1 && spec.blocks[0] == Block::kProsody) return m;
  const Matrix x = assemble_matrix(spec, bank, train);
  const auto y = labels_of(train);
  const auto s = sample_weights(y, class_weights(y));
  m.lr = train_lr(x, y, s, m.schema, lr_config);
  return m;
}

json fused_to_json(const FusedModel& m) {
  json j = {{"format", "hotspot-fusion"},
            {"version", 1},
            {"blocks", m.spec.to_string()},
            {"posterior_mode", m.spec.mode == PosteriorMode::kKFold ? "k_fold" : "in_sample"},
            {"folds", m.spec.folds}};
  json schema = json::array();
  for (const auto& e : m.schema) schema.push_back(json::array({e.block, e.dim}));
  j["schema"] = schema;
  j["lr"] = m.lr ? lr_to_json(*m.lr) : json(nullptr);
  return j;
}

FusedModel fused_from_json(const json& j) {
  if (j.value("format", "") != "hotspot-fusion" || j.value("version", 0) != 1) {
    throw ValidationError("not a hotspot fusion model");
  }
  FusedModel m;
  try {
    m.spec = FusionSpec::parse(j.at("blocks").get<std::string>());
    m.spec.mode = j.at("posterior_mode").get<std::string>() == "k_fold" ? PosteriorMode::kKFold
                                                                        : PosteriorMode::kInSample;
    m.spec.folds = j.at("folds").get<std::size_t>();
    for (const auto& e : j.at("schema")) {
      m.schema.push_back(SchemaEntry{e.at(0).get<std::string>(), e.at(1).get<std::size_t>()});
    }
    if (!j.at("lr").is_null()) m.lr = lr_from_json(j.at("lr"));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("fusion model file: ") + e.what());
  }
  return m;
}

// ---------------------------------------------------------------------------
// Ablation

const AblationRow* AblationReport::find(const std::string& group, const std::string& label) const {
  for (const auto& r : rows) {
    if (r.group == group && r.label == label) return &r;
  }
  return nullptr;
}

namespace {

std::string pct(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(1) << 100.0 * v << "%";
  return ss.str();
}

}  // namespace

std::string AblationReport::to_text() const {
  std::ostringstream ss;
  ss << std::left << std::setw(22) << "Feature Set" << std::right << std::setw(18)
     << "UAR w/ Features" << std::setw(19) << "UAR w/o Features" << "\n";
  ss << std::string(59, '-') << "\n";
  for (const auto& r : rows) {
    if (r.group != "single") continue;
    const auto* loo = find("leave_one_out", r.label);
    ss << std::left << std::setw(22) << r.label << std::right << std::setw(18) << pct(r.uar)
       << std::setw(19) << (loo ? pct(loo->uar) : "N/A") << "\n";
  }
  ss << std::string(59, '-') << "\n";
  if (const auto* all = find("all", "all")) {
    ss << std::left << std::setw(22) << "all" << std::right << std::setw(18) << pct(all->uar)
       << std::setw(19) << "N/A" << "\n";
  }
  for (const auto& r : rows) {
    if (r.group != "laughter") continue;
    ss << std::left << std::setw(22) << r.label << std::right << std::setw(18) << pct(r.uar)
       << std::setw(19) << "" << "\n";
  }
  return ss.str();
}

json AblationReport::to_json() const {
  json jr = json::array();
  for (const auto& r : rows) {
    jr.push_back({{"group", r.group},
                  {"label", r.label},
                  {"blocks", r.spec.to_string()},
                  {"uar", r.uar},
                  {"dev_uar", r.dev_uar}});
  }
  return {{"fingerprint", fingerprint}, {"block_hashes", block_hashes}, {"rows", jr}};
}

std::string AblationReport::to_csv() const {
  std::ostringstream ss;
  ss << "group,label,blocks,uar,dev_uar\n";
  ss << std::setprecision(17);
  for (const auto& r : rows) {
    ss << r.group << "," << r.label << ",\"" << r.spec.to_string() << "\"," << r.uar << ","
       << r.dev_uar << "\n";
  }
  return ss.str();
}

AblationReport ablation_report(const FeatureBank& bank, const std::vector<Block>& base_blocks,
                               std::span<const Window> train, std::span<const Window> dev,
                               std::span<const Window> eval, const LRConfig& lr_config,
                               bool laughter_rows) {
  AblationReport report;
  const auto eval_y = labels_of(eval);
  const auto dev_y = labels_of(dev);
  auto run = [&](const std::string& group, const std::string& label, std::vector<Block> blocks) {
    std::string list;
    for (Block b : blocks) list += std::string(list.empty() ? "" : ",") + block_name(b);
    AblationRow row{group, label, FusionSpec::parse(list), 0.0, 0.0};
    const auto model = train_fusion(row.spec, bank, train, lr_config);
    row.uar = uar(confusion(eval_y, model.decide(bank, eval)));
    if (!dev.empty()) {
      const auto c = confusion(dev_y, model.decide(bank, dev));
      row.dev_uar = c.both_classes() ? uar(c) : 0.0;
    }
    report.rows.push_back(std::move(row));
  };
  std::set<Block> used(base_blocks.begin(), base_blocks.end());
  if (laughter_rows) used.insert(Block::kLaughter);
  for (Block b : used) report.block_hashes[block_name(b)] = bank.get(b).hash();

  for (Block b : base_blocks) run("single", block_name(b), {b});
  run("all", "all", base_blocks);
  if (base_blocks.size() > 1) {
    for (Block b : base_blocks) {
      std::vector<Block> rest;
      for (Block o : base_blocks) {
        if (o != b) rest.push_back(o);
      }
      run("leave_one_out", block_name(b), rest);
    }
  }
  if (laughter_rows) {
    run("laughter", "laughter", {Block::kLaughter});
    auto with = base_blocks;
    with.push_back(Block::kLaughter);
    run("laughter", "all+laughter", with);
  }
  return report;
}

}  // namespace hotspot
