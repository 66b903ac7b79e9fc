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


#include <cmath>

#include "doctest.h"
#include "test_util.hpp"

#include "hotspot/error.hpp"
#include "hotspot/rng.hpp"
#include "hotspot/windowing.hpp"

using namespace hotspot;
using hotspot::testing::meeting;
using hotspot::testing::utt;

namespace {

std::size_t hot_count(const std::vector<Window>& ws) {
  std::size_t n = 0;
  for (const auto& w : ws) n += w.hot();
  return n;
}

}  // namespace

TEST_CASE("one involved utterance inside a long meeting marks four windows") {
  const auto m = meeting("m", 1200.0, {utt("m", "u", "a", 0, 65.0, 70.0, "b")});
  const auto built = build_windows(m);
  CHECK_FALSE(built.warning);
  REQUIRE(hot_count(built.windows) == 4);
  std::vector<double> starts;
  for (const auto& w : built.windows) {
    if (w.hot()) starts.push_back(w.start_s);
  }
  CHECK(starts == std::vector<double>{15.0, 30.0, 45.0, 60.0});
}

TEST_CASE("window grid") {
  SUBCASE("exact fit includes the last window") {
    const auto built = build_windows(meeting("m", 120.0, {}));
    REQUIRE(built.windows.size() == 5);
    CHECK(built.windows.back().start_s == 60.0);
    CHECK(built.windows.back().end_s == 120.0);
    CHECK(built.windows.back().index == 4);
  }
  SUBCASE("partial trailing window is dropped") {
    CHECK(build_windows(meeting("m", 134.9, {})).windows.size() == 5);
  }
  SUBCASE("short meeting warns and emits nothing") {
    const auto built = build_windows(meeting("short", 59.0, {}));
    CHECK(built.windows.empty());
    REQUIRE(built.warning);
    CHECK(built.warning->find("short") != std::string::npos);
  }
  SUBCASE("bad parameters") {
    CHECK_THROWS_AS(build_windows(meeting("m", 100.0, {}), {60.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(build_windows(meeting("m", 100.0, {}), {-1.0, 15.0}), ValidationError);
  }
}

TEST_CASE("touching a window edge is not overlap") {
  const auto m = meeting("m", 300.0, {utt("m", "u", "a", 0, 60.0, 61.0, "b+")});
  const auto built = build_windows(m);
  CHECK_FALSE(built.windows[0].hot());  // [0, 60]
  CHECK(built.windows[1].hot());        // [15, 75]
  CHECK(hot_count(built.windows) == 4);
}

TEST_CASE("uninvolved labels never mark windows") {
  const auto m = meeting("m", 300.0, {utt("m", "u", "a", 0, 10.0, 200.0, "0")});
  CHECK(hot_count(build_windows(m).windows) == 0);
}

TEST_CASE("hot count matches interval enumeration for random utterances") {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const double dur = rng.uniform(60.0, 600.0);
    const double s = rng.uniform(0.0, dur - 0.01);
    const double e = std::min(dur, s + rng.uniform(0.0, 40.0));
    const auto built = build_windows(meeting("m", dur, {utt("m", "u", "a", 0, s, e, "b")}));
    std::size_t expect = 0;
    for (int k = 0; k * 15.0 + 60.0 <= dur; ++k) {
      const double a = k * 15.0, b = a + 60.0;
      if (std::min(b, e) > std::max(a, s)) ++expect;
    }
    CAPTURE(dur);
    CAPTURE(s);
    CAPTURE(e);
    CHECK(hot_count(built.windows) == expect);
    // A positive-length utterance strictly inside [60, dur-60] spans at most
    // 4 + floor(len / 15) windows and at least 4.
    if (e > s && s > 60.0 && e < dur - 60.0) {
      CHECK(expect >= 4);
      CHECK(expect <= 5 + static_cast<std::size_t>((e - s) / 15.0));
    }
  }
}

TEST_CASE("windows file round trip and split stats") {
  hotspot::testing::TempDir dir;
  std::vector<Meeting> ms = {meeting("m1", 120.0, {utt("m1", "u", "a", 0, 65.0, 70.0, "b")}),
                             meeting("m2", 30.0, {})};
  SplitConfig s;
  s.training = {"m1", "m2"};
  Corpus c(ms, s);
  std::vector<std::string> warnings;
  auto set = build_split_windows(c, Split::kTraining, {}, &warnings);
  CHECK(warnings.size() == 1);
  CHECK(set.windows.size() == 5);
  CHECK(set.hot_count() == 4);
  CHECK(set.hot_share() == doctest::Approx(0.8));
  write_windows({set}, dir / "w.jsonl", "fp");
  CHECK(read_windows(dir / "w.jsonl") == set.windows);
}
