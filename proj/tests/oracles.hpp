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


// Independent reference implementations shared by the unit tests and the
// acceptance binary.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hotspot/corpus.hpp"
#include "hotspot/models.hpp"
#include "hotspot/prosody.hpp"
#include "hotspot/rng.hpp"
#include "hotspot/windowing.hpp"

namespace hotspot::oracle {

inline constexpr double kGrid = 0.01;

/// Cell index to seconds. Division keeps every time the nearest double to
/// its decimal value, so comparisons agree with the integer grid.
inline double at_cell(std::int64_t c) { return static_cast<double>(c) / 100.0; }

/// Random meeting whose word and laughter times sit on the 10 ms grid.
/// Gaps of exactly 30 cells are avoided so the 0.3 s merge rule has no
/// floating-point tie.
inline Meeting random_activity_meeting(Rng& rng, const std::string& id, int speakers,
                                       double duration_s) {
  Meeting m;
  m.id = id;
  m.duration_s = duration_s;
  const auto cells = static_cast<std::int64_t>(std::llround(duration_s / kGrid));
  int n_utt = 0;
  for (int s = 0; s < speakers; ++s) {
    const std::string spk = "s" + std::to_string(s);
    m.speakers.push_back(spk);
    std::int64_t t = static_cast<std::int64_t>(rng.below(2000));
    // Dense talkers push the overlap count past six.
    const double density = rng.uniform(0.2, 1.0);
    while (t < cells - 20) {
      Utterance u;
      u.id = id + "_" + std::to_string(n_utt++);
      u.meeting_id = id;
      u.speaker_id = spk;
      u.channel = s;
      u.hot_label = "0";
      const int n_words = 1 + static_cast<int>(rng.below(8));
      std::int64_t w = t;
      for (int k = 0; k < n_words && w < cells - 5; ++k) {
        const std::int64_t len = 1 + static_cast<std::int64_t>(rng.below(60));
        const std::int64_t end = std::min(cells, w + len);
        u.words.push_back(Word{"w", at_cell(w), at_cell(end)});
        std::int64_t gap = static_cast<std::int64_t>(rng.below(50));
        if (gap == 30) gap = 31;
        w = end + gap;
      }
      if (u.words.empty()) break;
      u.start_s = u.words.front().start_s;
      u.end_s = u.words.back().end_s;
      if (rng.bernoulli(0.3)) {
        const std::int64_t a = static_cast<std::int64_t>(std::llround(u.start_s / kGrid));
        const std::int64_t b = std::min<std::int64_t>(cells, a + 1 + rng.below(100));
        u.laughter.push_back({at_cell(a), at_cell(b),
                              rng.bernoulli(0.5) ? LaughterKind::kStandalone
                                                 : LaughterKind::kWithinSpeech});
      }
      m.utterances.push_back(std::move(u));
      std::int64_t pause = static_cast<std::int64_t>(rng.below(
          static_cast<std::uint64_t>(1 + 3000 * (1.0 - density))));
      if (pause == 30) pause = 31;
      t = static_cast<std::int64_t>(std::llround(m.utterances.back().end_s / kGrid)) + pause;
    }
  }
  return m;
}

struct RasterFeatures {
  std::array<double, 6> overlap{};
  int unique_speakers = 0;
  int turn_switches = 0;
  int laughter = 0;
};

/// Rasterizes each speaker's words on the 10 ms grid, closes gaps of at
/// most 30 cells, then counts by enumeration over the window's cells.
class ActivityRaster {
 public:
  explicit ActivityRaster(const Meeting& m)
      : cells_(static_cast<std::int64_t>(std::llround(m.duration_s / kGrid))), meeting_(&m) {
    for (const auto& u : m.utterances) {
      auto& row = active_[u.speaker_id];
      row.resize(static_cast<std::size_t>(cells_), 0);
      for (const auto& w : u.words) {
        const auto a = std::llround(w.start_s / kGrid);
        const auto b = std::llround(w.end_s / kGrid);
        for (auto c = a; c < b; ++c) row[static_cast<std::size_t>(c)] = 1;
      }
    }
    for (auto& [spk, row] : active_) {
      std::int64_t last_end = -1;
      for (std::int64_t c = 0; c < cells_; ++c) {
        if (!row[static_cast<std::size_t>(c)]) continue;
        if (last_end >= 0 && c > last_end && c - last_end <= 30) {
          for (auto k = last_end; k < c; ++k) row[static_cast<std::size_t>(k)] = 1;
        }
        last_end = c + 1;
      }
    }
  }

  RasterFeatures features(double start_s, double end_s) const {
    RasterFeatures f;
    const auto a = std::llround(start_s / kGrid);
    const auto b = std::llround(end_s / kGrid);
    const double len = static_cast<double>(b - a);
    std::array<std::int64_t, 6> at_least{};
    for (auto c = a; c < b; ++c) {
      int n = 0;
      for (const auto& [spk, row] : active_) n += row[static_cast<std::size_t>(c)];
      for (int i = 0; i < 6 && i < n; ++i) ++at_least[i];
    }
    for (int i = 0; i < 6; ++i) f.overlap[i] = at_least[i] / len;
    for (const auto& [spk, row] : active_) {
      bool any = false;
      for (auto c = a; c < b && !any; ++c) any = row[static_cast<std::size_t>(c)];
      f.unique_speakers += any;
      for (auto c = a; c < b; ++c) {
        const bool on = row[static_cast<std::size_t>(c)];
        const bool prev = c > 0 && row[static_cast<std::size_t>(c - 1)];
        f.turn_switches += on && !prev;
      }
    }
    for (const auto& u : meeting_->utterances) {
      for (const auto& l : u.laughter) {
        const auto c = std::llround(l.start_s / kGrid);
        f.laughter += c >= a && c < b;
      }
    }
    return f;
  }

 private:
  std::int64_t cells_;
  const Meeting* meeting_;
  std::map<std::string, std::vector<std::uint8_t>> active_;
};

/// ||a - n|| / (||a|| + ||n||) between analytic and central-difference
/// gradients.
inline double relative_error(const std::vector<double>& analytic,
                             const std::vector<double>& numeric) {
  double diff = 0.0, na = 0.0, nn = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    na += analytic[i] * analytic[i];
    nn += numeric[i] * numeric[i];
  }
  const double denom = std::sqrt(na) + std::sqrt(nn);
  return denom == 0.0 ? 0.0 : std::sqrt(diff) / denom;
}

inline double mlp_gradient_error(MLPModel& model, const MLPData& data,
                                 const std::vector<std::size_t>& batch, double h = 1e-5) {
  const auto params = model.flat_parameters();
  std::vector<double> analytic(params.size());
  mlp_loss_and_gradient(model, data, batch, analytic);
  std::vector<double> numeric(params.size());
  auto p = params;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = params[i] + h;
    model.set_flat_parameters(p);
    const double up = mlp_loss_and_gradient(model, data, batch, {});
    p[i] = params[i] - h;
    model.set_flat_parameters(p);
    const double down = mlp_loss_and_gradient(model, data, batch, {});
    p[i] = params[i];
    numeric[i] = (up - down) / (2.0 * h);
  }
  model.set_flat_parameters(params);
  return relative_error(analytic, numeric);
}

inline double lr_gradient_error(const std::vector<double>& params, const Matrix& z,
                                const std::vector<int>& labels,
                                const std::vector<double>& weights, double lambda,
                                double h = 1e-6) {
  std::vector<double> analytic(params.size());
  lr_loss_and_gradient(params, z, labels, weights, lambda, analytic);
  std::vector<double> numeric(params.size());
  auto p = params;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = params[i] + h;
    const double up = lr_loss_and_gradient(p, z, labels, weights, lambda, {});
    p[i] = params[i] - h;
    const double down = lr_loss_and_gradient(p, z, labels, weights, lambda, {});
    p[i] = params[i];
    numeric[i] = (up - down) / (2.0 * h);
  }
  return relative_error(analytic, numeric);
}

/// Grid with random values; roughly a fifth of the cells absent but never
/// a whole grid.
inline ProsodyGrid random_grid(Rng& rng, std::size_t channels, std::size_t steps,
                               std::size_t dim) {
  ProsodyGrid g;
  g.channels = channels;
  g.steps = steps;
  g.dim = dim;
  g.data.assign(channels * steps * dim, 0.0);
  g.present.assign(channels * steps, 0);
  for (std::size_t i = 0; i < channels * steps; ++i) {
    if (i == 0 || rng.bernoulli(0.8)) {
      g.present[i] = 1;
      for (std::size_t d = 0; d < dim; ++d) g.data[i * dim + d] = rng.normal();
    }
  }
  return g;
}

}  // namespace hotspot::oracle
