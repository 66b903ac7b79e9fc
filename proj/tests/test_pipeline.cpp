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


#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <functional>
#include <map>

#include "doctest.h"
#include "test_util.hpp"

#include "json.hpp"

#include "hotspot/hashing.hpp"

namespace fs = std::filesystem;
using hotspot::testing::slurp;
using hotspot::testing::spit;

namespace {

struct Run {
  int code = -1;
  std::string output;
};

Run run(const fs::path& dir, const std::string& args) {
  const auto log = dir / "cli.log";
  const std::string cmd = "cd '" + dir.string() + "' && '" HOTSPOT_CLI_PATH "' " + args + " > '" +
                          log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = slurp(log);
  return r;
}

// Small corpus so the whole chain runs in a few seconds.
void make_corpus(const fs::path& dir) {
  const nlohmann::json cfg = {{"train_meetings", 4}, {"dev_meetings", 2}, {"eval_meetings", 2},
                              {"duration_s", 400.0}, {"hot_region_rate", 3.0 / 400.0},
                              {"prosody_dim", 8}};
  spit(dir / "synth.json", cfg.dump());
  const auto r = run(dir, "synth --out . --synth-config synth.json");
  REQUIRE_MESSAGE(r.code == 0, r.output);
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = hotspot::file_sha256(e.path());
  }
  return out;
}

void edit_config(const fs::path& dir, const std::function<void(nlohmann::json&)>& f) {
  auto j = nlohmann::json::parse(slurp(dir / "hotspot.json"));
  f(j);
  spit(dir / "hotspot.json", j.dump(2));
}

}  // namespace

TEST_CASE("synth output validates") {
  hotspot::testing::TempDir dir;
  make_corpus(dir.path());
  const auto r = run(dir.path(), "validate");
  CHECK_MESSAGE(r.code == 0, r.output);
}

TEST_CASE("eval before training names the missing model") {
  hotspot::testing::TempDir dir;
  make_corpus(dir.path());
  REQUIRE(run(dir.path(), "featurize --block activity").code == 0);
  const auto r = run(dir.path(), "eval --split eval");
  CHECK(r.code == 3);
  CHECK(r.output.find("fusion.json") != std::string::npos);
  CHECK(r.output.find("hotspot fuse") != std::string::npos);
}

TEST_CASE("training on a block that was never featurized is a dependency error") {
  hotspot::testing::TempDir dir;
  make_corpus(dir.path());
  const auto r = run(dir.path(), "train --model lr --block embed");
  CHECK(r.code == 3);
  CHECK(r.output.find("featurize --block embed") != std::string::npos);
}

TEST_CASE("config errors exit 2 and name the field") {
  hotspot::testing::TempDir dir;
  make_corpus(dir.path());
  const auto original = slurp(dir / "hotspot.json");

  edit_config(dir.path(), [](auto& j) { j["windows"]["lenght_s"] = 60; });
  auto r = run(dir.path(), "validate");
  CHECK(r.code == 2);
  CHECK(r.output.find("windows.lenght_s") != std::string::npos);

  spit(dir / "hotspot.json", original);
  edit_config(dir.path(), [](auto& j) { j["lexical"]["vocab_size"] = "big"; });
  r = run(dir.path(), "validate");
  CHECK(r.code == 2);
  CHECK(r.output.find("vocab_size") != std::string::npos);

  spit(dir / "hotspot.json", original);
  edit_config(dir.path(), [](auto& j) { j["lexical"]["pool"] = "median"; });
  CHECK(run(dir.path(), "validate").code == 2);

  spit(dir / "hotspot.json", "{ not json");
  CHECK(run(dir.path(), "validate").code == 2);

  CHECK(run(dir.path(), "-c absent.json validate").code == 3);
  CHECK(run(dir.path(), "train --model svm --block activity").code == 2);
}

TEST_CASE("stages are idempotent and eval does not rewrite anything") {
  hotspot::testing::TempDir dir;
  make_corpus(dir.path());
  for (const char* b : {"activity", "embed", "prosody"}) {
    const auto r = run(dir.path(), std::string("featurize --block ") + b);
    REQUIRE_MESSAGE(r.code == 0, r.output);
  }
  auto r = run(dir.path(), "fuse");
  REQUIRE_MESSAGE(r.code == 0, r.output);
  r = run(dir.path(), "eval --split eval");
  REQUIRE_MESSAGE(r.code == 0, r.output);
  CHECK(r.output.find("UAR") != std::string::npos);

  const auto before = snapshot(dir / "cache");
  CHECK(run(dir.path(), "featurize --block activity").code == 0);
  CHECK(run(dir.path(), "fuse").code == 0);
  CHECK(run(dir.path(), "eval --split eval").code == 0);
  CHECK(snapshot(dir / "cache") == before);

  // A changed window step invalidates everything downstream.
  edit_config(dir.path(), [](auto& j) { j["windows"]["step_s"] = 30.0; });
  r = run(dir.path(), "eval --split eval");
  CHECK(r.code == 3);
}

TEST_CASE("a live lock blocks, a stale lock is taken over") {
  hotspot::testing::TempDir dir;
  make_corpus(dir.path());
  const auto cfg = nlohmann::json::parse(slurp(dir / "hotspot.json"));
  fs::path cache = cfg["paths"]["cache_dir"].get<std::string>();
  if (cache.is_relative()) cache = dir.path() / cache;
  fs::create_directories(cache);

  spit(cache / ".lock", std::to_string(::getpid()) + "\n");
  auto r = run(dir.path(), "windows");
  CHECK(r.code == 1);
  CHECK(r.output.find("in use") != std::string::npos);

  const pid_t child = ::fork();
  if (child == 0) ::_exit(0);
  ::waitpid(child, nullptr, 0);
  spit(cache / ".lock", std::to_string(child) + "\n");
  r = run(dir.path(), "windows");
  CHECK_MESSAGE(r.code == 0, r.output);
  CHECK_FALSE(fs::exists(cache / ".lock"));
}

TEST_CASE("global options override the config") {
  hotspot::testing::TempDir dir;
  make_corpus(dir.path());
  const auto r = run(dir.path(), "--cache-dir other windows");
  CHECK_MESSAGE(r.code == 0, r.output);
  CHECK(fs::exists(dir / "other/windows.jsonl"));
  CHECK(run(dir.path(), "--jobs 0 windows").code == 2);
}
