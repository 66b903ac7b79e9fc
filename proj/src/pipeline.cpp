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

#include "hotspot/pipeline.hpp"

#include <fcntl.h>
#include <signal.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <type_traits>

#include "hotspot/error.hpp"
#include "hotspot/eval.hpp"
#include "hotspot/hashing.hpp"
#include "hotspot/prosody.hpp"
#include "hotspot/rng.hpp"
#include "json_util.hpp"

namespace hotspot {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Config reading

template <typename T>
constexpr const char* type_label() {
  if constexpr (std::is_same_v<T, bool>) return "a boolean";
  else if constexpr (std::is_unsigned_v<T>) return "a non-negative integer";
  else if constexpr (std::is_floating_point_v<T>) return "a number";
  else if constexpr (std::is_same_v<T, std::string>) return "a string";
  else return "an array of non-negative integers";
}

template <typename T>
bool type_matches(const json& v) {
  if constexpr (std::is_same_v<T, bool>) return v.is_boolean();
  else if constexpr (std::is_unsigned_v<T>) return v.is_number_unsigned();
  else if constexpr (std::is_floating_point_v<T>) return v.is_number();
  else if constexpr (std::is_same_v<T, std::string>) return v.is_string();
  else {
    if (!v.is_array()) return false;
    for (const auto& e : v) {
      if (!e.is_number_unsigned()) return false;
    }
    return true;
  }
}

/// Reads one config object, remembering which keys were consumed so that
/// unknown keys can be reported.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) {
      throw ValidationError("config: " + (path_.empty() ? std::string("top level") : "'" + path_ + "'") +
                            " must be an object");
    }
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    if (!type_matches<T>(*it)) {
      throw ValidationError("config field '" + name(key) + "': expected " + type_label<T>());
    }
    out = it->get<T>();
  }

  Fields sub(const std::string& key) {
    static const json kEmpty = json::object();
    seen_.insert(key);
    auto it = j_.find(key);
    return Fields(it == j_.end() ? kEmpty : *it, name(key));
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) {
        throw ValidationError("config: unknown field '" + name(item.key()) + "'");
      }
    }
  }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

[[noreturn]] void bad_value(const std::string& field, const std::string& what) {
  throw ValidationError("config field '" + field + "': " + what);
}

std::string blocks_to_string(const std::vector<Block>& blocks) {
  std::string s;
  for (Block b : blocks) s += std::string(s.empty() ? "" : ",") + block_name(b);
  return s;
}

std::vector<Block> parse_block_list(const std::string& field, const std::string& text) {
  try {
    return FusionSpec::parse(text).blocks;
  } catch (const ValidationError& e) {
    bad_value(field, e.what());
  }
}

void read_mlp_config(Fields& f, MLPConfig& c) {
  f.get("learning_rate", c.learning_rate);
  f.get("epochs", c.epochs);
  f.get("batch_size", c.batch_size);
  f.get("patience", c.patience);
  if (!(c.learning_rate > 0)) bad_value(f.name("learning_rate"), "must be positive");
  if (c.epochs == 0) bad_value(f.name("epochs"), "must be positive");
  if (c.batch_size == 0) bad_value(f.name("batch_size"), "must be positive");
}

json mlp_config_json(const MLPConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"patience", c.patience}};
}

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  const fs::path path(p);
  return (path.is_absolute() ? path : base / path).lexically_normal();
}

std::string relative_to(const fs::path& p, const fs::path& base) {
  if (p.empty() || base.empty()) return p.string();
  const fs::path rel = p.lexically_relative(base);
  if (rel.empty() || *rel.begin() == "..") return p.string();
  return rel.string();
}

// ---------------------------------------------------------------------------
// Files

void write_atomic(const fs::path& file, const std::string& body) {
  const fs::path tmp = file.string() + ".tmp";
  detail::write_text_file(tmp, body);
  fs::rename(tmp, file);
}

std::optional<json> first_line_json(const fs::path& file) {
  std::ifstream in(file);
  if (!in) return std::nullopt;
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  try {
    return json::parse(line);
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

/// Fingerprint stored in a cache artifact, or "" when absent or unreadable.
std::string stored_fingerprint(const fs::path& file) {
  if (!fs::exists(file)) return {};
  std::optional<json> j;
  if (file.extension() == ".jsonl") {
    j = first_line_json(file);
  } else {
    try {
      j = json::parse(detail::read_text_file(file));
    } catch (const std::exception&) {
      return {};
    }
  }
  if (!j || !j->is_object()) return {};
  const auto it = j->find("fingerprint");
  return it != j->end() && it->is_string() ? it->get<std::string>() : std::string();
}

bool is_current(const fs::path& file, const std::string& fp) {
  return stored_fingerprint(file) == fp;
}

json read_object(const fs::path& file) { return detail::read_json_file(file); }

template <typename F>
void parallel_for(std::size_t n, std::size_t jobs, F&& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < jobs; ++t) {
    threads.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

std::string fmt_uar(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(4) << v;
  return ss.str();
}

std::string block_cache_name(Block b) {
  switch (b) {
    case Block::kActivity:
    case Block::kLaughter: return "features_activity.jsonl";
    case Block::kEmbed: return "features_embed.jsonl";
    case Block::kTfidf: return "features_tfidf.jsonl";
    case Block::kProsody: return "features_prosody_posterior.jsonl";
  }
  return "";
}

std::string producer_hint(Block b) {
  if (b == Block::kProsody) return "hotspot train --model mlp --block prosody";
  if (b == Block::kLaughter) return "hotspot featurize --block activity";
  return std::string("hotspot featurize --block ") + block_name(b);
}

}  // namespace

// ---------------------------------------------------------------------------
// PipelineConfig

PipelineConfig PipelineConfig::from_json(const json& j, const fs::path& base_dir) {
  PipelineConfig c;
  Fields top(j, "");
  {
    Fields f = top.sub("paths");
    std::string corpus, splits, embeddings, prosody, cache_dir = "cache";
    f.get("corpus", corpus);
    f.get("splits", splits);
    f.get("embeddings", embeddings);
    f.get("prosody", prosody);
    f.get("cache_dir", cache_dir);
    f.finish();
    if (corpus.empty()) bad_value("paths.corpus", "required");
    c.paths.corpus = resolve(base_dir, corpus);
    c.paths.splits = splits.empty() ? c.paths.corpus / "splits.json" : resolve(base_dir, splits);
    c.paths.embeddings = resolve(base_dir, embeddings);
    c.paths.prosody = resolve(base_dir, prosody);
    c.paths.cache_dir = resolve(base_dir, cache_dir);
  }
  top.get("seed", c.seed);
  top.get("jobs", c.jobs);
  if (c.jobs == 0) bad_value("jobs", "must be positive");
  {
    Fields f = top.sub("windows");
    f.get("length_s", c.window.window_len_s);
    f.get("step_s", c.window.step_s);
    f.finish();
    if (!(c.window.window_len_s > 0)) bad_value("windows.length_s", "must be positive");
    if (!(c.window.step_s > 0)) bad_value("windows.step_s", "must be positive");
  }
  {
    Fields f = top.sub("activity");
    std::string source = "words";
    f.get("max_gap_s", c.activity.max_gap_s);
    f.get("source", source);
    f.get("split_laughter_kinds", c.activity.split_laughter_kinds);
    f.finish();
    if (c.activity.max_gap_s < 0) bad_value("activity.max_gap_s", "must be non-negative");
    if (source == "words") {
      c.activity.source = ActivitySource::kWords;
    } else if (source == "utterances") {
      c.activity.source = ActivitySource::kUtterances;
    } else {
      bad_value("activity.source", "expected \"words\" or \"utterances\"");
    }
  }
  {
    Fields f = top.sub("lexical");
    std::string pool = pool_method_name(c.pool);
    f.get("vocab_size", c.vocab.max_size);
    f.get("max_order", c.vocab.max_order);
    f.get("pool", pool);
    f.finish();
    if (c.vocab.max_size == 0) bad_value("lexical.vocab_size", "must be positive");
    if (c.vocab.max_order == 0) bad_value("lexical.max_order", "must be positive");
    try {
      c.pool = parse_pool_method(pool);
    } catch (const ValidationError& e) {
      bad_value("lexical.pool", e.what());
    }
  }
  {
    Fields f = top.sub("prosody");
    std::string mode = "k_fold";
    f.get("subwindow_s", c.prosody.subwindow_s);
    f.get("hidden", c.prosody.hidden);
    f.get("dropout", c.prosody.dropout);
    f.get("posterior_mode", mode);
    f.get("folds", c.prosody.folds);
    read_mlp_config(f, c.prosody.mlp);
    f.finish();
    if (!(c.prosody.subwindow_s > 0)) bad_value("prosody.subwindow_s", "must be positive");
    if (c.prosody.hidden.empty()) bad_value("prosody.hidden", "needs at least one layer");
    if (!(c.prosody.dropout >= 0 && c.prosody.dropout < 1)) bad_value("prosody.dropout", "must lie in [0, 1)");
    if (mode == "k_fold") {
      c.prosody.posterior_mode = PosteriorMode::kKFold;
    } else if (mode == "in_sample") {
      c.prosody.posterior_mode = PosteriorMode::kInSample;
    } else {
      bad_value("prosody.posterior_mode", "expected \"k_fold\" or \"in_sample\"");
    }
    if (c.prosody.folds < 2) bad_value("prosody.folds", "must be at least 2");
  }
  {
    Fields f = top.sub("mlp");
    f.get("hidden", c.mlp.hidden);
    f.get("dropout", c.mlp.dropout);
    read_mlp_config(f, c.mlp.mlp);
    f.finish();
    if (!(c.mlp.dropout >= 0 && c.mlp.dropout < 1)) bad_value("mlp.dropout", "must lie in [0, 1)");
  }
  {
    Fields f = top.sub("lr");
    f.get("l2_lambda", c.lr.l2_lambda);
    f.get("grad_tol", c.lr.grad_tol);
    f.get("max_iters", c.lr.max_iters);
    f.finish();
    if (c.lr.l2_lambda < 0) bad_value("lr.l2_lambda", "must be non-negative");
    if (!(c.lr.grad_tol > 0)) bad_value("lr.grad_tol", "must be positive");
    if (c.lr.max_iters == 0) bad_value("lr.max_iters", "must be positive");
  }
  {
    Fields f = top.sub("fusion");
    std::string blocks = c.fusion.to_string();
    f.get("blocks", blocks);
    f.finish();
    c.fusion.blocks = parse_block_list("fusion.blocks", blocks);
  }
  c.fusion.mode = c.prosody.posterior_mode;
  c.fusion.folds = c.prosody.folds;
  {
    Fields f = top.sub("ablation");
    std::string blocks = blocks_to_string(c.ablation_blocks);
    f.get("blocks", blocks);
    f.get("laughter_rows", c.ablation_laughter);
    f.finish();
    c.ablation_blocks = parse_block_list("ablation.blocks", blocks);
    for (Block b : c.ablation_blocks) {
      if (b == Block::kLaughter) bad_value("ablation.blocks", "laughter is added by laughter_rows");
    }
  }
  {
    Fields f = top.sub("cv");
    f.get("folds", c.cv_folds);
    f.finish();
    if (c.cv_folds == 1) bad_value("cv.folds", "must be 0 (automatic) or at least 2");
  }
  top.finish();
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& file) {
  if (!fs::exists(file)) throw DependencyError("config file not found: " + file.string());
  const json j = detail::read_json_file(file);
  try {
    return from_json(j, fs::absolute(file).parent_path());
  } catch (const ValidationError& e) {
    throw ValidationError(file.string() + ": " + e.what());
  }
}

json PipelineConfig::to_json(const fs::path& base_dir) const {
  json j;
  j["paths"] = {{"corpus", relative_to(paths.corpus, base_dir)},
                {"splits", relative_to(paths.splits, base_dir)},
                {"embeddings", relative_to(paths.embeddings, base_dir)},
                {"prosody", relative_to(paths.prosody, base_dir)},
                {"cache_dir", relative_to(paths.cache_dir, base_dir)}};
  j["seed"] = seed;
  j["jobs"] = jobs;
  j["windows"] = {{"length_s", window.window_len_s}, {"step_s", window.step_s}};
  j["activity"] = {
      {"max_gap_s", activity.max_gap_s},
      {"source", activity.source == ActivitySource::kWords ? "words" : "utterances"},
      {"split_laughter_kinds", activity.split_laughter_kinds}};
  j["lexical"] = {{"vocab_size", vocab.max_size},
                  {"max_order", vocab.max_order},
                  {"pool", pool_method_name(pool)}};
  json pj = mlp_config_json(prosody.mlp);
  pj["subwindow_s"] = prosody.subwindow_s;
  pj["hidden"] = prosody.hidden;
  pj["dropout"] = prosody.dropout;
  pj["posterior_mode"] = prosody.posterior_mode == PosteriorMode::kKFold ? "k_fold" : "in_sample";
  pj["folds"] = prosody.folds;
  j["prosody"] = pj;
  json mj = mlp_config_json(mlp.mlp);
  mj["hidden"] = mlp.hidden;
  mj["dropout"] = mlp.dropout;
  j["mlp"] = mj;
  j["lr"] = {{"l2_lambda", lr.l2_lambda}, {"grad_tol", lr.grad_tol}, {"max_iters", lr.max_iters}};
  j["fusion"] = {{"blocks", fusion.to_string()}};
  j["ablation"] = {{"blocks", blocks_to_string(ablation_blocks)},
                   {"laughter_rows", ablation_laughter}};
  j["cv"] = {{"folds", cv_folds}};
  return j;
}

std::string PipelineConfig::fingerprint() const {
  json j = to_json();
  j.erase("paths");
  j.erase("jobs");
  return sha256_hex(j.dump());
}

PipelineConfig desk_bench_config(const fs::path& out_dir, std::uint64_t seed) {
  const auto paths = synth_paths(out_dir);
  PipelineConfig c;
  c.paths.corpus = paths.corpus_dir;
  c.paths.splits = paths.splits;
  c.paths.embeddings = paths.embeddings;
  c.paths.prosody = paths.prosody;
  c.paths.cache_dir = out_dir / "cache";
  c.seed = seed;
  c.vocab.max_size = 2000;
  c.pool = PoolMethod::kMean;
  c.lr.l2_lambda = 1e-2;
  c.prosody.hidden = {32, 16};
  c.prosody.dropout = 0.2;
  c.prosody.mlp.learning_rate = 0.05;
  c.prosody.mlp.epochs = 40;
  c.prosody.mlp.batch_size = 32;
  c.prosody.mlp.patience = 8;
  c.mlp.hidden = {32, 16};
  c.mlp.dropout = 0.2;
  c.mlp.mlp.learning_rate = 0.05;
  c.mlp.mlp.epochs = 60;
  c.mlp.mlp.patience = 10;
  return c;
}

// ---------------------------------------------------------------------------
// CacheLock

CacheLock::CacheLock(const fs::path& cache_dir) : file_(cache_dir / ".lock") {
  fs::create_directories(cache_dir);
  for (int attempt = 0; attempt < 2; ++attempt) {
    const int fd = ::open(file_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd >= 0) {
      const std::string pid = std::to_string(::getpid()) + "\n";
      const auto written = ::write(fd, pid.data(), pid.size());
      ::close(fd);
      if (written != static_cast<ssize_t>(pid.size())) {
        fs::remove(file_);
        throw Error("cannot write lock file " + file_.string());
      }
      return;
    }
    if (errno != EEXIST) {
      throw Error("cannot create lock file " + file_.string() + ": " + std::strerror(errno));
    }
    long holder = 0;
    std::ifstream(file_) >> holder;
    if (holder > 0 && ::kill(static_cast<pid_t>(holder), 0) == 0) {
      throw Error("cache directory " + file_.parent_path().string() + " is in use by process " +
                  std::to_string(holder));
    }
    fs::remove(file_);  // stale
  }
  throw Error("cannot lock cache directory " + file_.parent_path().string());
}

CacheLock::~CacheLock() {
  std::error_code ec;
  fs::remove(file_, ec);
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "lr") return ModelKind::kLR;
  if (name == "mlp") return ModelKind::kMLP;
  throw ValidationError("unknown model kind '" + name + "' (expected lr or mlp)");
}

std::optional<json> read_cache_header(const fs::path& file) { return first_line_json(file); }

// ---------------------------------------------------------------------------
// Pipeline state

struct Pipeline::State {
  const PipelineConfig& cfg;
  json cj;  // config sections, for fingerprints

  std::optional<Corpus> corpus;
  std::string corpus_fp;
  std::vector<WindowSet> sets;
  std::string windows_fp;
  std::vector<std::string> window_warnings;

  std::optional<DenseVectorStore> embeddings;
  std::string embeddings_sha;
  std::optional<ProsodyStore> prosody;
  std::string prosody_sha;

  FeatureBank bank;
  std::map<Block, std::string> loaded_fp;

  explicit State(const PipelineConfig& c) : cfg(c), cj(c.to_json()) {}

  fs::path path(const std::string& name) const { return cfg.paths.cache_dir / name; }

  std::string section(const char* name) const { return cj.at(name).dump(); }

  // ---- inputs

  const Corpus& get_corpus() {
    if (corpus) return *corpus;
    if (!fs::exists(cfg.paths.corpus / "meetings.json")) {
      throw DependencyError("corpus not found: " + (cfg.paths.corpus / "meetings.json").string());
    }
    if (!fs::exists(cfg.paths.splits)) {
      throw DependencyError("split file not found: " + cfg.paths.splits.string());
    }
    corpus = load_corpus(cfg.paths.corpus, load_splits(cfg.paths.splits));
    Hasher h;
    h.update("corpus");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(cfg.paths.corpus)) {
      if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      h.update(f.filename().string());
      h.update(file_sha256(f));
    }
    h.update(file_sha256(cfg.paths.splits));
    corpus_fp = h.hex();
    return *corpus;
  }

  void ensure_windows() {
    if (!sets.empty()) return;
    const Corpus& c = get_corpus();
    for (Split s : kAllSplits) {
      sets.push_back(build_split_windows(c, s, cfg.window, &window_warnings));
    }
    windows_fp = Hasher().update("windows").update(section("windows")).update(corpus_fp).hex();
  }

  const std::vector<Window>& windows_of(Split s) {
    ensure_windows();
    return sets[static_cast<std::size_t>(s)].windows;
  }

  std::vector<Window> all_windows() {
    ensure_windows();
    std::vector<Window> all;
    for (const auto& s : sets) all.insert(all.end(), s.windows.begin(), s.windows.end());
    return all;
  }

  /// (meeting, its windows) in corpus order.
  std::vector<std::pair<const Meeting*, std::vector<Window>>> by_meeting() {
    std::map<std::string, std::vector<Window>> grouped;
    for (const auto& w : all_windows()) grouped[w.meeting_id].push_back(w);
    std::vector<std::pair<const Meeting*, std::vector<Window>>> out;
    for (auto& [id, ws] : grouped) out.emplace_back(&corpus->meeting(id), std::move(ws));
    return out;
  }

  const DenseVectorStore& get_embeddings() {
    if (embeddings) return *embeddings;
    if (cfg.paths.embeddings.empty() || !fs::exists(cfg.paths.embeddings)) {
      throw DependencyError("embedding store not found: " +
                            (cfg.paths.embeddings.empty() ? std::string("(paths.embeddings unset)")
                                                          : cfg.paths.embeddings.string()));
    }
    embeddings = load_dense_store(cfg.paths.embeddings, std::string(kUtteranceEmbeddingKind));
    return *embeddings;
  }

  const std::string& embeddings_hash() {
    if (embeddings_sha.empty()) {
      if (cfg.paths.embeddings.empty() || !fs::exists(cfg.paths.embeddings)) {
        throw DependencyError("embedding store not found: " + cfg.paths.embeddings.string());
      }
      embeddings_sha = file_sha256(cfg.paths.embeddings);
    }
    return embeddings_sha;
  }

  const ProsodyStore& get_prosody() {
    if (prosody) return *prosody;
    if (cfg.paths.prosody.empty() || !fs::exists(cfg.paths.prosody)) {
      throw DependencyError("prosody store not found: " +
                            (cfg.paths.prosody.empty() ? std::string("(paths.prosody unset)")
                                                       : cfg.paths.prosody.string()));
    }
    prosody = load_prosody_store(cfg.paths.prosody, cfg.prosody.subwindow_s);
    return *prosody;
  }

  const std::string& prosody_hash() {
    if (prosody_sha.empty()) {
      if (cfg.paths.prosody.empty() || !fs::exists(cfg.paths.prosody)) {
        throw DependencyError("prosody store not found: " + cfg.paths.prosody.string());
      }
      prosody_sha = file_sha256(cfg.paths.prosody);
    }
    return prosody_sha;
  }

  // ---- fingerprints

  std::string activity_fp() {
    ensure_windows();
    return Hasher().update("activity").update(section("activity")).update(windows_fp).hex();
  }
  std::string embed_fp() {
    ensure_windows();
    return Hasher()
        .update("embed")
        .update(pool_method_name(cfg.pool))
        .update(windows_fp)
        .update(embeddings_hash())
        .hex();
  }
  std::string tfidf_fp() {
    ensure_windows();
    return Hasher().update("tfidf").update(section("lexical")).update(windows_fp).hex();
  }
  std::string norm_fp() {
    ensure_windows();
    return Hasher()
        .update("norm_stats")
        .update(std::to_string(cfg.prosody.subwindow_s))
        .update(windows_fp)
        .update(prosody_hash())
        .hex();
  }
  std::string posterior_fp() {
    return Hasher()
        .update("prosody_posterior")
        .update(section("prosody"))
        .update(static_cast<std::int64_t>(cfg.seed))
        .update(norm_fp())
        .hex();
  }
  std::string block_fp(Block b) {
    switch (b) {
      case Block::kActivity:
      case Block::kLaughter: return activity_fp();
      case Block::kEmbed: return embed_fp();
      case Block::kTfidf: return tfidf_fp();
      case Block::kProsody: return posterior_fp();
    }
    return {};
  }
  std::string blocks_fp(const std::vector<Block>& blocks) {
    Hasher h;
    for (Block b : blocks) h.update(block_name(b)).update(block_fp(b));
    return h.hex();
  }
  std::string lr_model_fp(Block b) {
    return Hasher().update("lr").update(section("lr")).update(block_fp(b)).hex();
  }
  std::string mlp_model_fp(Block b) {
    if (b == Block::kProsody) return posterior_fp();
    return Hasher()
        .update("mlp")
        .update(section("mlp"))
        .update(static_cast<std::int64_t>(cfg.seed))
        .update(block_fp(b))
        .hex();
  }
  std::string fusion_fp() {
    return Hasher()
        .update("fusion")
        .update(cfg.fusion.to_string())
        .update(section("lr"))
        .update(blocks_fp(cfg.fusion.blocks))
        .hex();
  }

  // ---- block caches

  void write_block(const BlockFeatures& f, const std::string& fp,
                   const BlockFeatures* laughter = nullptr) {
    std::ostringstream out;
    json header = {{"kind", "features"},
                   {"block", block_name(f.block)},
                   {"dim", f.dim},
                   {"fingerprint", fp},
                   {"seed", cfg.seed}};
    if (laughter != nullptr) header["laughter_dim"] = laughter->dim;
    out << header.dump() << "\n";
    for (const auto& [key, vec] : f.rows) {
      json row = {{"meeting_id", key.first}, {"index", key.second}};
      if (f.block == Block::kTfidf) {
        std::vector<std::size_t> idx;
        std::vector<double> val;
        for (std::size_t i = 0; i < vec.size(); ++i) {
          if (vec[i] != 0.0) {
            idx.push_back(i);
            val.push_back(vec[i]);
          }
        }
        row["idx"] = idx;
        row["val"] = val;
      } else {
        row["vec"] = vec;
      }
      if (laughter != nullptr) row["laughter"] = laughter->rows.at(key);
      out << row.dump() << "\n";
    }
    write_atomic(path(block_cache_name(f.block)), out.str());
  }

  void read_block(Block want) {
    const fs::path file = path(block_cache_name(want));
    std::ifstream in(file);
    std::string line;
    std::getline(in, line);
    const json header = json::parse(line);
    BlockFeatures f;
    f.block = parse_block(header.at("block").get<std::string>());
    f.dim = header.at("dim").get<std::size_t>();
    BlockFeatures laughter;
    const bool with_laughter = header.contains("laughter_dim");
    if (with_laughter) {
      laughter.block = Block::kLaughter;
      laughter.dim = header.at("laughter_dim").get<std::size_t>();
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      try {
        const json row = json::parse(line);
        const WindowKey key{row.at("meeting_id").get<std::string>(), row.at("index").get<int>()};
        std::vector<double> vec;
        if (row.contains("idx")) {
          vec.assign(f.dim, 0.0);
          const auto idx = row.at("idx").get<std::vector<std::size_t>>();
          const auto val = row.at("val").get<std::vector<double>>();
          for (std::size_t i = 0; i < idx.size() && i < val.size(); ++i) vec.at(idx[i]) = val[i];
        } else {
          vec = row.at("vec").get<std::vector<double>>();
        }
        if (vec.size() != f.dim) throw ValidationError("row length differs from header dim");
        f.rows[key] = std::move(vec);
        if (with_laughter) laughter.rows[key] = row.at("laughter").get<std::vector<double>>();
      } catch (const std::exception& e) {
        throw ValidationError(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
    const std::string fp = header.value("fingerprint", "");
    loaded_fp[f.block] = fp;
    bank.put(std::move(f));
    if (with_laughter) {
      loaded_fp[Block::kLaughter] = fp;
      bank.put(std::move(laughter));
    }
  }

  /// Loads a block from its cache; the cache must exist and be current.
  void require_block(Block b) {
    const std::string fp = block_fp(b);
    auto it = loaded_fp.find(b);
    if (it != loaded_fp.end() && it->second == fp && bank.has(b)) return;
    const fs::path file = path(block_cache_name(b));
    if (!fs::exists(file)) {
      throw DependencyError("missing feature cache " + file.string() + " (run `" +
                            producer_hint(b) + "`)");
    }
    if (!is_current(file, fp)) {
      throw DependencyError("stale feature cache " + file.string() + " (rerun `" +
                            producer_hint(b) + "`)");
    }
    read_block(b);
  }

  // ---- featurization

  bool featurize_activity() {
    const std::string fp = activity_fp();
    if (is_current(path(block_cache_name(Block::kActivity)), fp)) return false;
    auto groups = by_meeting();
    std::vector<std::vector<std::pair<WindowKey, ActivityFeatures>>> parts(groups.size());
    parallel_for(groups.size(), cfg.jobs, [&](std::size_t i) {
      const auto& [m, ws] = groups[i];
      const auto spurts = build_talkspurts(*m, cfg.activity);
      for (const auto& w : ws) parts[i].emplace_back(key_of(w), activity_features(*m, spurts, w));
    });
    BlockFeatures act{Block::kActivity, kActivityDims, {}};
    BlockFeatures laugh{Block::kLaughter, cfg.activity.split_laughter_kinds ? 2u : 1u, {}};
    for (const auto& part : parts) {
      for (const auto& [key, feats] : part) {
        act.rows[key] = feats.activity_vector();
        laugh.rows[key] = feats.laughter_vector(cfg.activity.split_laughter_kinds);
      }
    }
    write_block(act, fp, &laugh);
    loaded_fp[Block::kActivity] = loaded_fp[Block::kLaughter] = fp;
    bank.put(std::move(act));
    bank.put(std::move(laugh));
    return true;
  }

  bool featurize_embed() {
    const std::string fp = embed_fp();
    if (is_current(path(block_cache_name(Block::kEmbed)), fp)) return false;
    const auto& store = get_embeddings();
    auto groups = by_meeting();
    std::vector<std::vector<std::pair<WindowKey, std::vector<double>>>> parts(groups.size());
    parallel_for(groups.size(), cfg.jobs, [&](std::size_t i) {
      const auto& [m, ws] = groups[i];
      for (const auto& w : ws) {
        parts[i].emplace_back(key_of(w), pool_vectors(store, *m, w, cfg.pool).values);
      }
    });
    BlockFeatures f{Block::kEmbed, store.dim(), {}};
    for (auto& part : parts) {
      for (auto& [key, v] : part) f.rows[key] = std::move(v);
    }
    write_block(f, fp);
    loaded_fp[Block::kEmbed] = fp;
    bank.put(std::move(f));
    return true;
  }

  BlockFeatures tfidf_rows(const Vocab& vocab, std::span<const Window> windows) {
    BlockFeatures f{Block::kTfidf, vocab.size(), {}};
    for (const auto& w : windows) {
      f.rows[key_of(w)] =
          tfidf_window(vocab, corpus->meeting(w.meeting_id), w, cfg.vocab.max_order).to_dense();
    }
    return f;
  }

  bool featurize_tfidf() {
    const std::string fp = tfidf_fp();
    if (is_current(path(block_cache_name(Block::kTfidf)), fp) && fs::exists(path("vocab.json"))) {
      return false;
    }
    const Corpus& c = get_corpus();
    const auto training = c.split(Split::kTraining);
    const Vocab vocab = fit_vocab(training, cfg.vocab);
    write_vocab(vocab, path("vocab.json"));
    auto f = tfidf_rows(vocab, all_windows());
    write_block(f, fp);
    loaded_fp[Block::kTfidf] = fp;
    bank.put(std::move(f));
    return true;
  }

  bool featurize_norm() {
    const std::string fp = norm_fp();
    if (is_current(path("norm_stats.json"), fp)) return false;
    const auto stats = fit_norm_stats(get_prosody(), windows_of(Split::kTraining), "training");
    const fs::path file = path("norm_stats.json");
    write_norm_stats(stats, file.string() + ".tmp", fp);
    fs::rename(file.string() + ".tmp", file);
    return true;
  }

  NormStats require_norm_stats() {
    const fs::path file = path("norm_stats.json");
    if (!fs::exists(file)) {
      throw DependencyError("missing " + file.string() + " (run `hotspot featurize --block prosody`)");
    }
    if (!is_current(file, norm_fp())) {
      throw DependencyError("stale " + file.string() + " (rerun `hotspot featurize --block prosody`)");
    }
    return read_norm_stats(file);
  }

  ProsodyBranchInputs branch_inputs(const NormStats& stats, const std::vector<Window>& train,
                                    const std::vector<Window>* dev) {
    ProsodyBranchInputs in;
    in.corpus = &get_corpus();
    in.store = &get_prosody();
    in.stats = &stats;
    in.train = &train;
    in.dev = dev;
    in.hidden = cfg.prosody.hidden;
    in.dropout = cfg.prosody.dropout;
    in.mlp = cfg.prosody.mlp;
    in.mlp.seed = derive_seed(cfg.seed, "prosody-mlp");
    in.mode = cfg.prosody.posterior_mode;
    in.folds = cfg.prosody.folds;
    return in;
  }

  /// Trains the prosody network and its posterior cache unless current.
  bool ensure_posteriors() {
    const std::string fp = posterior_fp();
    const fs::path cache = path(block_cache_name(Block::kProsody));
    const fs::path model = path("models/mlp_prosody.json");
    if (is_current(cache, fp) && is_current(model, fp)) {
      require_block(Block::kProsody);
      return false;
    }
    const NormStats stats = require_norm_stats();
    auto in = branch_inputs(stats, windows_of(Split::kTraining), &windows_of(Split::kDevelopment));
    in.heldout.push_back(&windows_of(Split::kEvaluation));
    auto branch = train_prosody_branch(in);
    json mj = mlp_to_json(branch.model);
    mj["fingerprint"] = fp;
    mj["seed"] = cfg.seed;
    fs::create_directories(model.parent_path());
    write_atomic(model, mj.dump() + "\n");
    write_block(branch.posteriors, fp);
    loaded_fp[Block::kProsody] = fp;
    bank.put(std::move(branch.posteriors));
    return true;
  }

  void require_or_build(Block b) {
    if (b == Block::kProsody) {
      ensure_posteriors();
    } else {
      require_block(b);
    }
  }
};

// ---------------------------------------------------------------------------
// Pipeline

Pipeline::Pipeline(PipelineConfig config)
    : cfg_(std::move(config)), st_(std::make_unique<State>(cfg_)) {}

Pipeline::~Pipeline() = default;

fs::path Pipeline::artifact(const std::string& name) const { return st_->path(name); }

StageReport Pipeline::validate() {
  StageReport r{"validate", false, {}, {}};
  const Corpus& c = st_->get_corpus();
  std::size_t utts = 0, words = 0;
  for (const auto& m : c.meetings()) {
    utts += m.utterances.size();
    for (const auto& u : m.utterances) words += u.words.size();
  }
  std::ostringstream ss;
  ss << "corpus ok: " << c.meetings().size() << " meetings, " << utts << " utterances, " << words
     << " words; splits " << c.splits().training.size() << "/" << c.splits().development.size()
     << "/" << c.splits().evaluation.size();
  if (!cfg_.paths.embeddings.empty() && fs::exists(cfg_.paths.embeddings)) {
    const auto& e = st_->get_embeddings();
    ss << "\nembedding store ok: " << e.size() << " vectors, dim " << e.dim();
  }
  if (!cfg_.paths.prosody.empty() && fs::exists(cfg_.paths.prosody)) {
    const auto& p = st_->get_prosody();
    ss << "\nprosody store ok: " << p.size() << " cells, dim " << p.dim();
  }
  r.summary = ss.str();
  return r;
}

StageReport Pipeline::windows() {
  StageReport r{"windows", false, {artifact("windows.jsonl")}, {}};
  st_->ensure_windows();
  if (!is_current(artifact("windows.jsonl"), st_->windows_fp)) {
    fs::create_directories(cfg_.paths.cache_dir);
    write_windows(st_->sets, artifact("windows.jsonl"), st_->windows_fp);
    r.recomputed = true;
  }
  std::size_t n = 0, hot = 0;
  for (const auto& s : st_->sets) {
    n += s.windows.size();
    hot += s.hot_count();
  }
  std::ostringstream ss;
  ss << n << " windows, " << hot << " hot";
  for (const auto& w : st_->window_warnings) ss << "\nwarning: " << w;
  r.summary = ss.str();
  return r;
}

StageReport Pipeline::featurize(Block block) {
  windows();
  fs::create_directories(cfg_.paths.cache_dir);
  StageReport r{std::string("featurize ") + block_name(block), false, {}, {}};
  switch (block) {
    case Block::kActivity:
    case Block::kLaughter:
      r.recomputed = st_->featurize_activity();
      r.artifacts.push_back(artifact(block_cache_name(Block::kActivity)));
      break;
    case Block::kEmbed:
      r.recomputed = st_->featurize_embed();
      r.artifacts.push_back(artifact(block_cache_name(Block::kEmbed)));
      break;
    case Block::kTfidf:
      r.recomputed = st_->featurize_tfidf();
      r.artifacts = {artifact("vocab.json"), artifact(block_cache_name(Block::kTfidf))};
      break;
    case Block::kProsody:
      r.recomputed = st_->featurize_norm();
      r.artifacts.push_back(artifact("norm_stats.json"));
      break;
  }
  r.summary = r.artifacts.back().filename().string() + (r.recomputed ? " written" : " up to date");
  return r;
}

namespace {

std::string model_file_name(ModelKind kind, Block b) {
  return std::string("models/") + (kind == ModelKind::kLR ? "lr_" : "mlp_") + block_name(b) + ".json";
}

double dev_uar_or_nan(const std::vector<int>& truth, const std::vector<int>& pred) {
  const auto c = confusion(truth, pred);
  return c.both_classes() ? uar(c) : std::nan("");
}

MLPData flat_data(const Matrix& x, const std::vector<int>& y, const std::vector<double>& s) {
  return MLPData::from_matrix(x, y, s);
}

}  // namespace

StageReport Pipeline::train(ModelKind kind, Block block) {
  StageReport r{std::string("train ") + (kind == ModelKind::kLR ? "lr " : "mlp ") + block_name(block),
                false, {artifact(model_file_name(kind, block))}, {}};
  auto& st = *st_;
  const auto& train_w = st.windows_of(Split::kTraining);
  const auto& dev_w = st.windows_of(Split::kDevelopment);
  const fs::path file = artifact(model_file_name(kind, block));
  double dev_uar = std::nan("");

  if (kind == ModelKind::kMLP && block == Block::kProsody) {
    r.recomputed = st.ensure_posteriors();
    r.artifacts.push_back(artifact(block_cache_name(Block::kProsody)));
    FusedModel m = train_fusion(FusionSpec::parse("prosody"), st.bank, train_w, cfg_.lr);
    dev_uar = dev_uar_or_nan(labels_of(dev_w), m.decide(st.bank, dev_w));
  } else if (kind == ModelKind::kLR) {
    if (block == Block::kProsody) {
      throw ValidationError("prosody enters fusion through its network; use --model mlp");
    }
    st.require_block(block);
    const std::string fp = st.lr_model_fp(block);
    FusionSpec spec = FusionSpec::parse(block_name(block));
    if (!is_current(file, fp)) {
      FusedModel m = train_fusion(spec, st.bank, train_w, cfg_.lr);
      json j = lr_to_json(*m.lr);
      j["fingerprint"] = fp;
      j["seed"] = cfg_.seed;
      fs::create_directories(file.parent_path());
      write_atomic(file, j.dump() + "\n");
      r.recomputed = true;
    }
    FusedModel m{spec, fusion_schema(spec, st.bank), lr_from_json(read_object(file))};
    dev_uar = dev_uar_or_nan(labels_of(dev_w), m.decide(st.bank, dev_w));
  } else {
    st.require_block(block);
    const std::string fp = st.mlp_model_fp(block);
    const FusionSpec spec = FusionSpec::parse(block_name(block));
    const FeatureSchema schema = fusion_schema(spec, st.bank);
    const Matrix dx = assemble_matrix(spec, st.bank, dev_w);
    const auto dy = labels_of(dev_w);
    const std::vector<double> ds(dy.size(), 1.0);
    if (!is_current(file, fp)) {
      const Matrix x = assemble_matrix(spec, st.bank, train_w);
      const auto y = labels_of(train_w);
      const auto s = sample_weights(y, class_weights(y));
      MLPArch arch;
      arch.sizes.push_back(schema_dim(schema));
      arch.sizes.insert(arch.sizes.end(), cfg_.mlp.hidden.begin(), cfg_.mlp.hidden.end());
      arch.sizes.push_back(2);
      arch.dropout = cfg_.mlp.dropout;
      MLPConfig mc = cfg_.mlp.mlp;
      mc.seed = derive_seed(cfg_.seed, std::string("mlp-") + block_name(block));
      const MLPData dev = flat_data(dx, dy, ds);
      const MLPModel model = train_mlp(flat_data(x, y, s), dy.empty() ? nullptr : &dev, arch, schema, mc);
      json j = mlp_to_json(model);
      j["fingerprint"] = fp;
      j["seed"] = cfg_.seed;
      fs::create_directories(file.parent_path());
      write_atomic(file, j.dump() + "\n");
      r.recomputed = true;
    }
    const MLPModel model = mlp_from_json(read_object(file));
    std::vector<int> pred;
    for (std::size_t i = 0; i < dx.rows; ++i) pred.push_back(model.predict(dx.row(i)).label());
    dev_uar = dev_uar_or_nan(dy, pred);
  }
  r.summary = file.filename().string() + (r.recomputed ? " trained" : " up to date") +
              "; development UAR " + (std::isnan(dev_uar) ? "undefined" : fmt_uar(dev_uar));
  return r;
}

StageReport Pipeline::fuse() {
  auto& st = *st_;
  const fs::path file = artifact("fusion.json");
  StageReport r{"fuse", false, {file}, {}};
  for (Block b : cfg_.fusion.blocks) st.require_or_build(b);
  const std::string fp = st.fusion_fp();
  const auto& train_w = st.windows_of(Split::kTraining);
  const auto& dev_w = st.windows_of(Split::kDevelopment);
  if (!is_current(file, fp)) {
    const FusedModel m = train_fusion(cfg_.fusion, st.bank, train_w, cfg_.lr);
    json j = fused_to_json(m);
    j["fingerprint"] = fp;
    j["seed"] = cfg_.seed;
    write_atomic(file, j.dump() + "\n");
    r.recomputed = true;
  }
  const FusedModel m = fused_from_json(read_object(file));
  const double d = dev_uar_or_nan(labels_of(dev_w), m.decide(st.bank, dev_w));
  r.summary = "fusion " + cfg_.fusion.to_string() + ", " + std::to_string(schema_dim(m.schema)) +
              " inputs" + (r.recomputed ? " trained" : " up to date") + "; development UAR " +
              (std::isnan(d) ? "undefined" : fmt_uar(d));
  return r;
}

StageReport Pipeline::eval(Split split, const std::string& target) {
  auto& st = *st_;
  std::string model_name, hint, model_fp;
  std::vector<Block> needs;
  ModelKind kind = ModelKind::kLR;
  Block block = Block::kActivity;
  if (target == "fusion") {
    model_name = "fusion.json";
    hint = "hotspot fuse";
    needs = cfg_.fusion.blocks;
  } else {
    const auto us = target.find('_');
    if (us == std::string::npos) throw ValidationError("unknown eval target '" + target + "'");
    kind = parse_model_kind(target.substr(0, us));
    block = parse_block(target.substr(us + 1));
    model_name = model_file_name(kind, block);
    hint = std::string("hotspot train --model ") + target.substr(0, us) + " --block " + block_name(block);
    needs = {block};
  }
  const fs::path model_file = artifact(model_name);
  if (!fs::exists(model_file)) {
    throw DependencyError("missing model artifact " + model_file.string() + " (run `" + hint + "`)");
  }
  if (target == "fusion") {
    model_fp = st.fusion_fp();
  } else {
    model_fp = kind == ModelKind::kLR ? st.lr_model_fp(block) : st.mlp_model_fp(block);
  }
  if (!is_current(model_file, model_fp)) {
    throw DependencyError("stale model artifact " + model_file.string() + " (rerun `" + hint + "`)");
  }

  const fs::path out = artifact(std::string("eval/") + target + "_" + split_name(split) + ".json");
  const std::string fp =
      Hasher().update("eval").update(target).update(model_fp).update(split_name(split)).hex();
  StageReport r{std::string("eval ") + target, false, {out, artifact("eval_results.jsonl")}, {}};
  EvalResult res;
  if (is_current(out, fp)) {
    const json j = read_object(out);
    res.split = j.at("split").get<std::string>();
    res.uar = j.at("uar").get<double>();
    res.recall_hot = j.at("recall_hot").get<double>();
    res.recall_not_hot = j.at("recall_not_hot").get<double>();
    const auto& c = j.at("confusion");
    res.confusion = Confusion{c.at("tp").get<std::size_t>(), c.at("fn").get<std::size_t>(),
                              c.at("fp").get<std::size_t>(), c.at("tn").get<std::size_t>()};
  } else {
    for (Block b : needs) st.require_block(b);
    const auto& windows = st.windows_of(split);
    std::vector<int> pred;
    if (target == "fusion") {
      pred = fused_from_json(read_object(model_file)).decide(st.bank, windows);
    } else if (kind == ModelKind::kLR) {
      const FusionSpec spec = FusionSpec::parse(block_name(block));
      FusedModel m{spec, fusion_schema(spec, st.bank), lr_from_json(read_object(model_file))};
      check_schema(m.lr->schema, m.schema);
      pred = m.decide(st.bank, windows);
    } else if (block == Block::kProsody) {
      pred = FusedModel{FusionSpec::parse("prosody"), {}, std::nullopt}.decide(st.bank, windows);
    } else {
      const MLPModel model = mlp_from_json(read_object(model_file));
      const FusionSpec spec = FusionSpec::parse(block_name(block));
      check_schema(model.schema(), fusion_schema(spec, st.bank));
      for (const auto& w : windows) pred.push_back(model.predict(assemble_features(spec, st.bank, w)).label());
    }
    res = evaluate(labels_of(windows), pred, split_name(split), fp, cfg_.seed);
    const json j = {{"target", target},
                    {"split", res.split},
                    {"uar", res.uar},
                    {"recall_hot", res.recall_hot},
                    {"recall_not_hot", res.recall_not_hot},
                    {"confusion",
                     {{"tp", res.confusion.tp},
                      {"fn", res.confusion.fn},
                      {"fp", res.confusion.fp},
                      {"tn", res.confusion.tn}}},
                    {"fingerprint", fp},
                    {"seed", cfg_.seed}};
    fs::create_directories(out.parent_path());
    write_atomic(out, j.dump(2) + "\n");
    append_eval_result(res, artifact("eval_results.jsonl"), target);
    r.recomputed = true;
  }
  r.summary = target + " " + format_eval_result(res);
  return r;
}

StageReport Pipeline::cv() {
  auto& st = *st_;
  const Corpus& corpus = st.get_corpus();
  const FusionSpec& spec = cfg_.fusion;
  Hasher h;
  h.update("cv").update(cfg_.fingerprint()).update(st.corpus_fp);
  if (spec.includes(Block::kEmbed)) h.update(st.embeddings_hash());
  if (spec.includes(Block::kProsody)) h.update(st.prosody_hash());
  const std::string fp = h.hex();
  const fs::path file = artifact("cv.json");
  StageReport r{"cv", false, {file}, {}};

  if (!is_current(file, fp)) {
    for (Block b : spec.blocks) {
      if (b != Block::kTfidf && b != Block::kProsody) st.require_block(b);
    }
    const auto& meetings = corpus.splits().training;
    const std::size_t folds = cfg_.cv_folds ? cfg_.cv_folds : default_fold_count(meetings.size());
    if (folds > meetings.size()) {
      throw ValidationError("cv: " + std::to_string(folds) + " folds for " +
                            std::to_string(meetings.size()) + " training meetings");
    }
    const auto& train_all = st.windows_of(Split::kTraining);
    const auto& dev_w = st.windows_of(Split::kDevelopment);
    const auto result = jackknife_cv(
        meetings, folds, derive_seed(cfg_.seed, "cv-folds"),
        [&](const std::vector<std::string>& fit_ids, const std::vector<std::string>& held_ids) {
          const std::set<std::string> fit_set(fit_ids.begin(), fit_ids.end());
          const std::set<std::string> held_set(held_ids.begin(), held_ids.end());
          std::vector<Window> fit_w, held_w;
          for (const auto& w : train_all) {
            if (fit_set.count(w.meeting_id)) fit_w.push_back(w);
            if (held_set.count(w.meeting_id)) held_w.push_back(w);
          }
          FeatureBank bank;
          for (Block b : spec.blocks) {
            if (b != Block::kTfidf && b != Block::kProsody) bank.put(st.bank.get(b));
          }
          if (spec.includes(Block::kTfidf)) {
            std::vector<const Meeting*> fit_meetings;
            for (const auto& id : fit_ids) fit_meetings.push_back(&corpus.meeting(id));
            const Vocab vocab = fit_vocab(fit_meetings, cfg_.vocab);
            std::vector<Window> both = fit_w;
            both.insert(both.end(), held_w.begin(), held_w.end());
            bank.put(st.tfidf_rows(vocab, both));
          }
          if (spec.includes(Block::kProsody)) {
            const NormStats stats = fit_norm_stats(st.get_prosody(), fit_w, "cv-fold");
            auto in = st.branch_inputs(stats, fit_w, &dev_w);
            in.heldout.push_back(&held_w);
            bank.put(train_prosody_branch(in).posteriors);
          }
          const FusedModel m = train_fusion(spec, bank, fit_w, cfg_.lr);
          return confusion(labels_of(held_w), m.decide(bank, held_w));
        });
    json fold_uar = json::array();
    for (double u : result.fold_uar) fold_uar.push_back(std::isnan(u) ? json(nullptr) : json(u));
    const json j = {{"blocks", spec.to_string()},
                    {"folds", result.folds},
                    {"fold_uar", fold_uar},
                    {"mean", result.mean},
                    {"stddev", result.stddev},
                    {"defined_folds", result.defined_folds},
                    {"fingerprint", fp},
                    {"seed", cfg_.seed}};
    fs::create_directories(cfg_.paths.cache_dir);
    write_atomic(file, j.dump(2) + "\n");
    r.recomputed = true;
  }
  const json j = read_object(file);
  std::ostringstream ss;
  ss << "jackknife CV over " << j.at("folds").size() << " folds (" << j.at("defined_folds")
     << " defined): mean UAR " << fmt_uar(j.at("mean").get<double>()) << ", std "
     << fmt_uar(j.at("stddev").get<double>());
  r.summary = ss.str();
  return r;
}

StageReport Pipeline::ablate() {
  auto& st = *st_;
  const fs::path jfile = artifact("ablation.json");
  const fs::path tfile = artifact("ablation.txt");
  const fs::path cfile = artifact("ablation.csv");
  StageReport r{"ablate", false, {jfile, tfile, cfile}, {}};
  std::vector<Block> used = cfg_.ablation_blocks;
  if (cfg_.ablation_laughter) used.push_back(Block::kLaughter);
  for (Block b : used) st.require_or_build(b);
  const std::string fp = Hasher()
                             .update("ablation")
                             .update(blocks_to_string(cfg_.ablation_blocks))
                             .update(static_cast<std::int64_t>(cfg_.ablation_laughter))
                             .update(st.section("lr"))
                             .update(st.blocks_fp(used))
                             .hex();
  if (!is_current(jfile, fp) || !fs::exists(tfile) || !fs::exists(cfile)) {
    auto report = ablation_report(st.bank, cfg_.ablation_blocks, st.windows_of(Split::kTraining),
                                  st.windows_of(Split::kDevelopment),
                                  st.windows_of(Split::kEvaluation), cfg_.lr, cfg_.ablation_laughter);
    report.fingerprint = fp;
    json j = report.to_json();
    j["seed"] = cfg_.seed;
    write_atomic(jfile, j.dump(2) + "\n");
    write_atomic(tfile, report.to_text() + "fingerprint: " + fp + "\n");
    write_atomic(cfile, "# fingerprint=" + fp + "\n" + report.to_csv());
    r.recomputed = true;
  }
  r.summary = detail::read_text_file(tfile);
  while (!r.summary.empty() && r.summary.back() == '\n') r.summary.pop_back();
  return r;
}

StageReport Pipeline::stats() {
  auto& st = *st_;
  st.ensure_windows();
  const std::string fp = Hasher().update("stats").update(st.windows_fp).hex();
  const fs::path jfile = artifact("stats.json");
  const fs::path tfile = artifact("stats.txt");
  StageReport r{"stats", false, {jfile, tfile}, {}};
  if (!is_current(jfile, fp) || !fs::exists(tfile)) {
    const StatsTable table = window_stats(st.get_corpus(), st.sets);
    json rows = json::array();
    std::ostringstream ss;
    ss << std::left << std::setw(13) << "Split" << std::right << std::setw(10) << "Meetings"
       << std::setw(10) << "Words" << std::setw(12) << "Utterances" << std::setw(10) << "Windows"
       << std::setw(13) << "Hot windows" << std::setw(11) << "Hot share" << "\n";
    for (const auto& row : table) {
      rows.push_back({{"split", row.split},
                      {"meetings", row.meetings},
                      {"words", row.words},
                      {"utterances", row.utterances},
                      {"windows", row.windows},
                      {"hot_windows", row.hot_windows},
                      {"hot_share", row.hot_share()}});
      std::ostringstream share;
      share << std::fixed << std::setprecision(1) << 100.0 * row.hot_share() << "%";
      ss << std::left << std::setw(13) << row.split << std::right << std::setw(10) << row.meetings
         << std::setw(10) << row.words << std::setw(12) << row.utterances << std::setw(10)
         << row.windows << std::setw(13) << row.hot_windows << std::setw(11) << share.str() << "\n";
    }
    fs::create_directories(cfg_.paths.cache_dir);
    write_atomic(jfile, json{{"rows", rows}, {"fingerprint", fp}, {"seed", cfg_.seed}}.dump(2) + "\n");
    write_atomic(tfile, ss.str());
    r.recomputed = true;
  }
  r.summary = detail::read_text_file(tfile);
  while (!r.summary.empty() && r.summary.back() == '\n') r.summary.pop_back();
  return r;
}

// ---------------------------------------------------------------------------
// synth

StageReport run_synth(const SynthConfig& config, const fs::path& out_dir) {
  const SynthOutput out = generate(config);
  const SynthPaths p = write_synth(out, config, out_dir);
  const PipelineConfig pc = desk_bench_config(out_dir, config.seed);
  detail::write_text_file(p.config, pc.to_json(out_dir).dump(2) + "\n");
  StageReport r{"synth", true, {p.corpus_dir, p.splits, p.embeddings, p.prosody, p.ledger, p.config}, {}};
  std::ostringstream ss;
  ss << "synthetic corpus in " << out_dir.string() << ": ";
  for (Split s : kAllSplits) {
    const auto& l = out.ledger.split(s);
    ss << split_name(s) << " " << l.meetings << " meetings / " << l.windows << " windows ("
       << l.hot_windows << " hot); ";
  }
  ss << "config " << p.config.filename().string();
  r.summary = ss.str();
  return r;
}

}  // namespace hotspot
