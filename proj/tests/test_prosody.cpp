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
#include <set>

#include "doctest.h"
#include "test_util.hpp"

#include "hotspot/error.hpp"
#include "hotspot/prosody.hpp"
#include "hotspot/rng.hpp"

using namespace hotspot;

namespace {

Window win(double start, const std::string& m = "m") {
  return Window{m, 0, start, start + 60.0, WindowLabel::kNotHot};
}

std::string key(const std::string& m, int ch, double s) {
  return format_cell_key(CellKey{m, ch, static_cast<std::int64_t>(std::llround(s * 1000))});
}

}  // namespace

TEST_CASE("cell keys") {
  CHECK(key("mtg#1", 2, 15.0) == "mtg#1#2#15");
  const auto k = parse_cell_key("mtg#1#2#15");
  CHECK(k.meeting_id == "mtg#1");
  CHECK(k.channel == 2);
  CHECK(k.start_ms == 15000);
  CHECK(parse_cell_key(key("m", 0, 2.5)).start_ms == 2500);
  for (const char* bad : {"m#x#5", "m#0", "#0#5", "m#-1#5", "m#0#5s"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_cell_key(bad), ValidationError);
  }
}

TEST_CASE("store validation") {
  DenseVectorStore raw(1, kProsodySubwindowKind);
  raw.insert(key("m", 0, 7.0), {1.0});
  CHECK_THROWS_AS(ProsodyStore{raw}, ValidationError);  // off the 5 s grid

  DenseVectorStore wrong(1, kUtteranceEmbeddingKind);
  CHECK_THROWS_AS(ProsodyStore{wrong}, ValidationError);

  hotspot::testing::TempDir dir;
  hotspot::testing::spit(dir / "empty.jsonl", "{\"dim\":3,\"kind\":\"prosody_subwindow\"}\n");
  const auto empty = load_prosody_store(dir / "empty.jsonl");
  CHECK(empty.size() == 0);
  CHECK(empty.dim() == 3);

  hotspot::testing::spit(dir / "dup.jsonl",
                         "{\"dim\":1,\"kind\":\"prosody_subwindow\"}\n"
                         "{\"key\":\"m#0#5\",\"vec\":[1]}\n{\"key\":\"m#0#5.0\",\"vec\":[2]}\n");
  CHECK_THROWS_AS(load_prosody_store(dir / "dup.jsonl"), ValidationError);
}

TEST_CASE("norm stats on two cells") {
  DenseVectorStore raw(1, kProsodySubwindowKind);
  raw.insert(key("m", 0, 0.0), {0.0});
  raw.insert(key("m", 0, 5.0), {2.0});
  raw.insert(key("m", 0, 100.0), {50.0});  // outside the training window
  const ProsodyStore store(raw);
  const Window w[] = {win(0.0)};
  const auto s = fit_norm_stats(store, w);
  CHECK(s.mean[0] == doctest::Approx(1.0));
  CHECK(s.std[0] == doctest::Approx(1.0));
  CHECK_FALSE(s.constant[0]);

  const Window none[] = {win(200.0)};
  CHECK_THROWS_AS(fit_norm_stats(store, none), ValidationError);
}

TEST_CASE("constant dimensions pass through as zero") {
  DenseVectorStore raw(2, kProsodySubwindowKind);
  raw.insert(key("m", 0, 0.0), {3.0, 1.0});
  raw.insert(key("m", 1, 0.0), {3.0, 5.0});
  const ProsodyStore store(raw);
  const Window w[] = {win(0.0)};
  const auto s = fit_norm_stats(store, w);
  CHECK(s.constant[0]);
  CHECK(s.std[0] == 0.0);
  std::vector<double> out(2);
  s.apply(std::vector<double>{7.0, 3.0}, out);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == doctest::Approx(0.0));
}

TEST_CASE("overlapping training windows count each cell once") {
  DenseVectorStore raw(1, kProsodySubwindowKind);
  raw.insert(key("m", 0, 0.0), {0.0});
  raw.insert(key("m", 0, 20.0), {4.0});
  const ProsodyStore store(raw);
  // Cell 20 lies in both windows; cell 0 only in the first.
  const Window w[] = {win(0.0), win(15.0)};
  const auto s = fit_norm_stats(store, w);
  CHECK(s.mean[0] == doctest::Approx(2.0));
}

TEST_CASE("normalized training cells have zero mean and unit variance") {
  Rng rng(12);
  const std::size_t dim = 9;
  DenseVectorStore raw(dim, kProsodySubwindowKind);
  for (int ch = 0; ch < 3; ++ch) {
    for (int c = 0; c < 60; ++c) {
      if (rng.bernoulli(0.2)) continue;
      std::vector<double> v(dim);
      for (std::size_t d = 0; d < dim; ++d) v[d] = 100.0 * d + (d + 1) * rng.normal();
      v[dim - 1] = 42.0;
      raw.insert(key("m", ch, c * 5.0), v);
    }
  }
  const ProsodyStore store(raw);
  const Window w[] = {win(0.0), win(15.0), win(120.0)};
  const auto stats = fit_norm_stats(store, w);

  // Two-pass reference.
  std::set<CellKey> cells;
  for (const auto& x : w) for (const auto& k : window_cells(store, x)) cells.insert(k);
  for (std::size_t d = 0; d < dim; ++d) {
    double mean = 0.0;
    for (const auto& k : cells) mean += (*store.find(k))[d];
    mean /= cells.size();
    double var = 0.0;
    for (const auto& k : cells) var += std::pow((*store.find(k))[d] - mean, 2);
    var /= cells.size();
    CHECK(stats.mean[d] == doctest::Approx(mean).epsilon(1e-12));
    CHECK(stats.std[d] == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
  }

  const auto norm = store.normalized_copy(stats);
  CHECK(norm.normalized());
  CHECK_THROWS_AS(norm.normalized_copy(stats), ValidationError);
  for (std::size_t d = 0; d + 1 < dim; ++d) {
    double mean = 0.0, sq = 0.0;
    for (const auto& k : cells) mean += (*norm.find(k))[d];
    mean /= cells.size();
    for (const auto& k : cells) sq += std::pow((*norm.find(k))[d] - mean, 2);
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(sq / cells.size() - 1.0) < 1e-9);
  }
}

TEST_CASE("grid layout and masking") {
  DenseVectorStore raw(2, kProsodySubwindowKind);
  for (int ch = 0; ch < 2; ++ch) {
    for (int c = 0; c < 30; ++c) raw.insert(key("m", ch, c * 5.0), {double(c), double(ch)});
  }
  const ProsodyStore store(raw);
  NormStats id{{0.0, 0.0}, {1.0, 1.0}, {false, false}, "test"};

  const auto g = build_grid(store, id, win(15.0), 2);
  CHECK(g.steps == 12);
  CHECK(g.present_count() == 24);
  CHECK(g.cell(1, 0)[0] == 3.0);  // 15 s is cell 3
  CHECK(g.cell(1, 11)[1] == 1.0);

  const ProsodyStore empty(DenseVectorStore(2, kProsodySubwindowKind));
  const auto e = build_grid(empty, id, win(0.0), 3);
  CHECK(e.present_count() == 0);
  CHECK(e.channels == 3);
  for (double v : e.data) CHECK(v == 0.0);

  const auto n = store.normalized_copy(id);
  CHECK_THROWS_AS(build_grid(n, id, win(0.0), 2), ValidationError);
}

TEST_CASE("norm stats file") {
  hotspot::testing::TempDir dir;
  NormStats s{{1.0, 2.0}, {0.5, 0.0}, {false, true}, "training"};
  write_norm_stats(s, dir / "n.json", "abc");
  CHECK(read_norm_stats(dir / "n.json") == s);
  CHECK(hotspot::testing::slurp(dir / "n.json").find("abc") != std::string::npos);
  hotspot::testing::spit(dir / "bad.json", "{\"mean\":[1],\"std\":[1,2],\"constant\":[false]}");
  CHECK_THROWS_AS(read_norm_stats(dir / "bad.json"), ValidationError);
}
