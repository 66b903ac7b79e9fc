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
#include "hotspot/prosody.hpp"
#include "hotspot/synth.hpp"

using namespace hotspot;

namespace {

SynthConfig small(std::uint64_t seed = 5) {
  auto c = SynthConfig::desk_bench();
  c.seed = seed;
  c.train_meetings = 3;
  c.dev_meetings = 1;
  c.eval_meetings = 2;
  c.duration_s = 400.0;
  c.hot_region_rate = 3.0 / 400.0;
  return c;
}

}  // namespace

TEST_CASE("ledger agrees with windows rebuilt from the corpus") {
  const auto cfg = small();
  const auto out = generate(cfg);
  for (Split s : kAllSplits) {
    const auto set = build_split_windows(out.corpus, s, cfg.window);
    const auto& l = out.ledger.split(s);
    CHECK(l.meetings == out.corpus.splits().ids(s).size());
    CHECK(l.windows == set.windows.size());
    CHECK(l.hot_windows == set.hot_count());
    for (const auto& w : set.windows) {
      const auto& hot = out.ledger.hot_windows.at(w.meeting_id);
      const bool listed = std::find(hot.begin(), hot.end(), w.index) != hot.end();
      CHECK(listed == w.hot());
    }
  }
  for (const auto& m : out.corpus.meetings()) CHECK_NOTHROW(validate_meeting(m));
}

TEST_CASE("every utterance has an embedding and prosody keys are on the grid") {
  const auto out = generate(small());
  for (const auto& m : out.corpus.meetings()) {
    for (const auto& u : m.utterances) CHECK(out.embeddings.find(u.id) != nullptr);
  }
  CHECK_NOTHROW(ProsodyStore(out.prosody));
  CHECK(out.prosody.dim() == small().prosody_dim);
}

TEST_CASE("same seed gives byte-identical files; another seed does not") {
  hotspot::testing::TempDir a, b, c;
  const auto pa = write_synth(generate(small(9)), small(9), a.path());
  write_synth(generate(small(9)), small(9), b.path());
  write_synth(generate(small(10)), small(10), c.path());
  for (const auto& rel : {"splits.json", "embeddings.jsonl", "prosody.jsonl", "synth_ledger.json",
                          "corpus/meetings.json"}) {
    CAPTURE(rel);
    CHECK(hotspot::testing::slurp(a / rel) == hotspot::testing::slurp(b / rel));
  }
  CHECK(hotspot::testing::slurp(a / "embeddings.jsonl") !=
        hotspot::testing::slurp(c / "embeddings.jsonl"));
  CHECK(std::filesystem::exists(pa.corpus_dir / "meetings.json"));
}

TEST_CASE("config round trip") {
  const auto c = small(3);
  const auto back = SynthConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
}

TEST_CASE("infeasible configurations are rejected") {
  auto expect_bad = [](SynthConfig c) { CHECK_THROWS_AS(generate(c), ValidationError); };
  auto c = small();
  c.hot_len_min_s = 500.0;
  c.hot_len_max_s = 600.0;
  expect_bad(c);
  c = small();
  c.hot_len_min_s = 70.0;
  c.hot_len_max_s = 40.0;
  expect_bad(c);
  c = small();
  c.signal_dims = c.embedding_dim + 1;
  expect_bad(c);
  c = small();
  c.signal.hot_vocab_probability = 1.5;
  expect_bad(c);
  c = small();
  c.modality_spread = -0.1;
  expect_bad(c);
  c = small();
  c.speakers = 0;
  expect_bad(c);
  c = small();
  c.signal.embedding_shift = -1.0;
  expect_bad(c);
  c = small();
  c.duration_s = 30.0;
  expect_bad(c);
}

TEST_CASE("planted embedding shift separates involved utterances") {
  auto with = small(21);
  auto without = SynthConfig::null_signal();
  without.seed = 21;
  without.train_meetings = 3;
  without.dev_meetings = 1;
  without.eval_meetings = 2;
  without.duration_s = 400.0;
  without.hot_region_rate = 3.0 / 400.0;
  auto gap = [](const SynthOutput& out) {
    double hot = 0, cold = 0;
    std::size_t nh = 0, nc = 0;
    for (const auto& m : out.corpus.meetings()) {
      for (const auto& u : m.utterances) {
        const double x = (*out.embeddings.find(u.id))[0];
        if (involved(u)) hot += x, ++nh; else cold += x, ++nc;
      }
    }
    REQUIRE(nh > 0);
    return hot / nh - cold / nc;
  };
  CHECK(gap(generate(with)) > 0.5);
  CHECK(std::abs(gap(generate(without))) < 0.3);
}
