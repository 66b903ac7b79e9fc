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

// hotspot: command-line driver for the involvement hot-spot pipeline.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hotspot/error.hpp"
#include "hotspot/kernels.hpp"
#include "hotspot/pipeline.hpp"
#include "json_util.hpp"

namespace fs = std::filesystem;
using namespace hotspot;

namespace {

int code(ExitCode c) { return static_cast<int>(c); }

void print(const StageReport& r, bool verbose) {
  std::cout << r.summary << "\n";
  if (verbose) {
    std::cerr << "[" << r.stage << "] " << (r.recomputed ? "recomputed" : "up to date") << "\n";
    for (const auto& a : r.artifacts) std::cerr << "  " << a.string() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Involvement hot-spot detection over meeting transcripts"};
  app.require_subcommand(1);

  std::string config_file = "hotspot.json";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::string cache_dir;
  bool verbose = false;
  app.add_option("-c,--config", config_file, "Pipeline config file")->capture_default_str();
  app.add_option("--seed", seed, "Override the master seed");
  app.add_option("--jobs", jobs, "Worker threads for featurization")->check(CLI::PositiveNumber);
  app.add_option("--cache-dir", cache_dir, "Override the cache directory");
  app.add_flag("-v,--verbose", verbose, "List artifacts and cache status on stderr");

  auto* validate = app.add_subcommand("validate", "Check the corpus and vector stores");
  auto* windows = app.add_subcommand("windows", "Build the 60 s windows and labels");
  auto* featurize = app.add_subcommand("featurize", "Compute one feature block");
  std::string block;
  featurize->add_option("--block", block, "activity | embed | tfidf | prosody")->required();
  auto* train = app.add_subcommand("train", "Train a single-block model");
  std::string model = "lr";
  train->add_option("--model", model, "lr | mlp")->check(CLI::IsMember({"lr", "mlp"}))->capture_default_str();
  train->add_option("--block", block, "Feature block")->required();
  auto* fuse = app.add_subcommand("fuse", "Train the fused model");
  auto* eval = app.add_subcommand("eval", "Evaluate a model on a split");
  std::string split = "eval";
  std::string target = "fusion";
  eval->add_option("--split", split, "dev | eval")->check(CLI::IsMember({"dev", "eval", "development", "evaluation"}))->capture_default_str();
  eval->add_option("--target", target, "fusion, lr_<block> or mlp_<block>")->capture_default_str();
  auto* cv = app.add_subcommand("cv", "Jackknife cross-validation over the training meetings");
  auto* ablate = app.add_subcommand("ablate", "Single-block, all and leave-one-out table");
  auto* stats = app.add_subcommand("stats", "Corpus and window statistics");
  auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic corpus");
  std::string out_dir = "synth";
  std::string preset = "desk-bench";
  std::string synth_config;
  synth->add_option("-o,--out", out_dir, "Output directory")->capture_default_str();
  synth->add_option("--preset", preset, "desk-bench | null")->check(CLI::IsMember({"desk-bench", "null"}))->capture_default_str();
  synth->add_option("--synth-config", synth_config, "JSON file with synth settings (overrides preset)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : code(ExitCode::kValidation);
  }

  try {
    if (synth->parsed()) {
      SynthConfig sc = preset == "null" ? SynthConfig::null_signal() : SynthConfig::desk_bench();
      if (!synth_config.empty()) {
        sc = SynthConfig::from_json(detail::read_json_file(synth_config));
      }
      if (seed) sc.seed = *seed;
      print(run_synth(sc, out_dir), verbose);
      return 0;
    }

    PipelineConfig cfg = PipelineConfig::load(config_file);
    if (seed) cfg.seed = *seed;
    if (jobs) cfg.jobs = *jobs;
    if (!cache_dir.empty()) cfg.paths.cache_dir = fs::absolute(cache_dir).lexically_normal();
    if (verbose) {
      std::cerr << "kernels: " << kernels::isa_name(kernels::active_isa()) << "\n";
    }
    Pipeline pipeline(cfg);

    if (validate->parsed()) {
      print(pipeline.validate(), verbose);
      return 0;
    }
    CacheLock lock(cfg.paths.cache_dir);
    if (windows->parsed()) print(pipeline.windows(), verbose);
    if (featurize->parsed()) print(pipeline.featurize(parse_block(block)), verbose);
    if (train->parsed()) print(pipeline.train(parse_model_kind(model), parse_block(block)), verbose);
    if (fuse->parsed()) print(pipeline.fuse(), verbose);
    if (eval->parsed()) print(pipeline.eval(parse_split(split), target), verbose);
    if (cv->parsed()) print(pipeline.cv(), verbose);
    if (ablate->parsed()) print(pipeline.ablate(), verbose);
    if (stats->parsed()) print(pipeline.stats(), verbose);
    return 0;
  } catch (const Error& e) {
    std::cerr << "hotspot: error: " << e.what() << "\n";
    return code(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "hotspot: error: " << e.what() << "\n";
    return code(ExitCode::kFailure);
  }
}
