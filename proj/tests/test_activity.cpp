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
#include "oracles.hpp"
#include "test_util.hpp"

#include "hotspot/activity.hpp"

using namespace hotspot;
using hotspot::testing::meeting;
using hotspot::testing::utt;

namespace {

Window win(double start) { return Window{"m", 0, start, start + 60.0, WindowLabel::kNotHot}; }

Utterance words_utt(const std::string& spk, std::vector<Word> ws) {
  return utt("m", spk + std::to_string(ws.front().start_s), spk, 0, ws.front().start_s,
             ws.back().end_s, "0", ws);
}

}  // namespace

TEST_CASE("talkspurt merge rule") {
  auto m = meeting("m", 100.0, {words_utt("a", {{"x", 0.0, 1.0}, {"y", 1.2, 2.0}})});
  auto spurts = build_talkspurts(m);
  REQUIRE(spurts.size() == 1);
  CHECK(spurts[0].end_s == 2.0);

  m = meeting("m", 100.0, {words_utt("a", {{"x", 0.0, 1.0}, {"y", 2.0, 3.0}})});
  CHECK(build_talkspurts(m).size() == 2);

  // Merging also crosses utterance boundaries of the same speaker.
  m = meeting("m", 100.0, {words_utt("a", {{"x", 0.0, 1.0}}), words_utt("a", {{"y", 1.1, 2.0}}),
                           words_utt("b", {{"z", 1.05, 1.5}})});
  spurts = build_talkspurts(m);
  CHECK(spurts.size() == 2);
  CHECK(spurts[0].speaker_id == "a");
}

TEST_CASE("overlap vectors for full-window talkers") {
  std::vector<Talkspurt> one = {{"a", 0.0, 60.0}};
  CHECK(overlap_features(one, win(0.0)) == std::array<double, 6>{1, 0, 0, 0, 0, 0});
  std::vector<Talkspurt> two = {{"a", -5.0, 70.0}, {"b", 0.0, 60.0}};
  CHECK(overlap_features(two, win(0.0)) == std::array<double, 6>{1, 1, 0, 0, 0, 0});
  std::vector<Talkspurt> eight;
  for (int i = 0; i < 8; ++i) eight.push_back({"s" + std::to_string(i), 0.0, 30.0});
  const auto v = overlap_features(eight, win(0.0));
  for (double x : v) CHECK(x == doctest::Approx(0.5));
  CHECK(overlap_features(std::vector<Talkspurt>{}, win(0.0))[0] == 0.0);
}

TEST_CASE("counts: onsets, speakers, laughter") {
  std::vector<Talkspurt> spurts = {{"a", -3.0, 5.0}, {"b", 1.0, 2.0}, {"b", 10.0, 11.0},
                                   {"c", 59.0, 65.0}, {"d", 60.0, 61.0}};
  CHECK(turn_switch_count(spurts, win(0.0)) == 3);
  CHECK(unique_speaker_count(spurts, win(0.0)) == 3);
  CHECK(unique_speaker_count(std::vector<Talkspurt>{}, win(0.0)) == 0);

  auto u1 = utt("m", "u1", "a", 0, 5.0, 9.0);
  u1.laughter = {{6.0, 7.0, LaughterKind::kWithinSpeech}, {60.0, 61.0, LaughterKind::kStandalone}};
  auto u2 = utt("m", "u2", "b", 1, 20.0, 22.0);
  u2.laughter = {{20.0, 22.0, LaughterKind::kStandalone}, {21.0, 22.0, LaughterKind::kStandalone}};
  const auto m = meeting("m", 100.0, {u1, u2});
  const auto t = laughter_count(m, win(0.0));
  CHECK(t.standalone == 2);
  CHECK(t.within_speech == 1);
  CHECK(t.total() == 3);

  const auto f = activity_features(m, build_talkspurts(m), win(0.0));
  CHECK(f.laughter_vector(false) == std::vector<double>{3.0});
  CHECK(f.laughter_vector(true) == std::vector<double>{2.0, 1.0});
  CHECK(f.activity_vector().size() == kActivityDims);
}

TEST_CASE("activity features match the raster oracle") {
  Rng rng(2024);
  for (int mi = 0; mi < 20; ++mi) {
    const auto m = oracle::random_activity_meeting(rng, "m", 2 + static_cast<int>(rng.below(7)),
                                                   300.0);
    validate_meeting(m);
    const auto spurts = build_talkspurts(m);
    const oracle::ActivityRaster raster(m);
    for (int k = 0; k < 10; ++k) {
      const auto cell = static_cast<std::int64_t>(rng.below(24001));
      const double start = oracle::at_cell(cell);
      const Window w{"m", 0, start, oracle::at_cell(cell + 6000), WindowLabel::kNotHot};
      const auto f = activity_features(m, spurts, w);
      const auto r = raster.features(w.start_s, w.end_s);
      CAPTURE(start);
      for (int i = 0; i < 6; ++i) {
        CHECK(std::abs(f.overlap[i] - r.overlap[i]) <= 2 * oracle::kGrid / 60.0);
        if (i > 0) CHECK(f.overlap[i] <= f.overlap[i - 1]);
      }
      CHECK(f.unique_speakers == r.unique_speakers);
      CHECK(f.turn_switches == r.turn_switches);
      CHECK(f.laughter_count == r.laughter);
    }
  }
}

TEST_CASE("splitting a word at an interior point changes no count") {
  Rng rng(5);
  auto m = oracle::random_activity_meeting(rng, "m", 4, 200.0);
  auto split = m;
  for (auto& u : split.utterances) {
    std::vector<Word> ws;
    for (const auto& w : u.words) {
      const double mid = 0.5 * (w.start_s + w.end_s);
      ws.push_back({w.text, w.start_s, mid});
      ws.push_back({w.text, mid, w.end_s});
    }
    u.words = ws;
  }
  const auto a = build_talkspurts(m);
  const auto b = build_talkspurts(split);
  for (double s = 0.0; s + 60.0 <= 200.0; s += 15.0) {
    CHECK(turn_switch_count(a, win(s)) == turn_switch_count(b, win(s)));
    CHECK(unique_speaker_count(a, win(s)) == unique_speaker_count(b, win(s)));
  }
}

TEST_CASE("translation leaves features unchanged at matched windows") {
  Rng rng(6);
  const auto m = oracle::random_activity_meeting(rng, "m", 3, 200.0);
  auto shifted = m;
  const double d = 45.0;
  shifted.duration_s += d;
  for (auto& u : shifted.utterances) {
    u.start_s += d;
    u.end_s += d;
    for (auto& w : u.words) w.start_s += d, w.end_s += d;
    for (auto& l : u.laughter) l.start_s += d, l.end_s += d;
  }
  const auto a = build_talkspurts(m);
  const auto b = build_talkspurts(shifted);
  for (double s = 0.0; s + 60.0 <= 200.0; s += 15.0) {
    const auto fa = activity_features(m, a, win(s));
    const auto fb = activity_features(shifted, b, win(s + d));
    for (int i = 0; i < 6; ++i) CHECK(fa.overlap[i] == doctest::Approx(fb.overlap[i]).epsilon(1e-9));
    CHECK(fa.turn_switches == fb.turn_switches);
    CHECK(fa.unique_speakers == fb.unique_speakers);
    CHECK(fa.laughter_count == fb.laughter_count);
  }
}
