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

#include "hotspot/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hotspot/error.hpp"
#include "hotspot/rng.hpp"
#include "json_util.hpp"

namespace hotspot {

using nlohmann::json;

namespace {

constexpr const char* kBaseVocab[] = {
    "so",   "we",     "the",   "data",  "model", "think", "i",     "you",   "it",    "is",
    "that", "and",    "right", "yeah",  "um",    "uh",    "okay",  "to",    "of",    "a",
    "this", "results", "mean", "just",  "like",  "well",  "maybe", "then",  "for",   "in",
    "but",  "know",   "do",    "have",  "test",  "train", "set",   "there", "what",  "one"};
constexpr const char* kHotMarkers[][2] = {
    {"oh", "wow"}, {"no", "way"}, {"that's", "crazy"}, {"hold", "on"}, {"come", "on"}};

double round_ms(double t) { return std::round(t * 1000.0) / 1000.0; }

enum Modality { kInteraction = 0, kLexical = 1, kProsodic = 2 };

struct Region {
  double start, end;
  double intensity[3] = {1.0, 1.0, 1.0};
};

struct MeetingPlan {
  Meeting meeting;
  std::vector<Region> regions;
  std::size_t laughter_events = 0;
};

class MeetingBuilder {
 public:
  MeetingBuilder(const SynthConfig& cfg, std::string id, std::uint64_t seed)
      : cfg_(cfg), rng_(seed) {
    plan_.meeting.id = std::move(id);
    plan_.meeting.duration_s = cfg.duration_s;
    for (std::size_t s = 0; s < cfg.speakers; ++s) {
      plan_.meeting.speakers.push_back("spk" + std::to_string(s));
    }
  }

  MeetingPlan build() {
    sample_regions();
    sample_speech();
    sample_laughter();
    finalize();
    return std::move(plan_);
  }

 private:
  bool in_hot(double t) const {
    for (const auto& r : plan_.regions) {
      if (t >= r.start && t < r.end) return true;
    }
    return false;
  }

  /// Signal intensity at time t: 0 outside hot regions.
  double intensity(double t, Modality m) const {
    for (const auto& r : plan_.regions) {
      if (t >= r.start && t < r.end) return r.intensity[m];
    }
    return 0.0;
  }

  /// Effective rate multiplier: baseline outside hot regions, the planted
  /// multiplier scaled by the region's intensity inside.
  static double factor(double multiplier, double intensity) {
    return 1.0 + (std::max(1.0, multiplier) - 1.0) * intensity;
  }

  void sample_regions() {
    const double d = cfg_.duration_s;
    const auto n = rng_.poisson(cfg_.hot_region_rate * d);
    std::vector<Region> raw;
    for (std::uint64_t i = 0; i < n; ++i) {
      const double len = rng_.uniform(cfg_.hot_len_min_s, cfg_.hot_len_max_s);
      const double start = rng_.uniform(0.0, d - len);
      raw.push_back({round_ms(start), round_ms(start + len)});
    }
    std::sort(raw.begin(), raw.end(), [](const Region& a, const Region& b) { return a.start < b.start; });
    for (const auto& r : raw) {
      if (!plan_.regions.empty() && r.start <= plan_.regions.back().end) {
        plan_.regions.back().end = std::max(plan_.regions.back().end, r.end);
      } else {
        plan_.regions.push_back(r);
      }
    }
    for (auto& r : plan_.regions) {
      for (double& x : r.intensity) x = 1.0 + cfg_.modality_spread * rng_.uniform(-1.0, 1.0);
    }
  }

  std::size_t other_speaker(std::size_t not_this) {
    if (cfg_.speakers < 2) return 0;
    std::size_t s = rng_.below(cfg_.speakers - 1);
    return s >= not_this ? s + 1 : s;
  }

  std::string token() { return kBaseVocab[rng_.below(std::size(kBaseVocab))]; }

  /// Adds an utterance with words filling [a, b]; returns false if too short.
  bool add_utterance(std::size_t speaker, double a, double b) {
    Utterance u;
    u.meeting_id = plan_.meeting.id;
    u.speaker_id = plan_.meeting.speakers[speaker];
    u.channel = static_cast<int>(speaker);
    double w = round_ms(a);
    while (true) {
      const double len = rng_.uniform(0.2, 0.5);
      const double end = round_ms(w + len);
      if (end > b) break;
      u.words.push_back(Word{token(), w, end});
      w = round_ms(end + rng_.uniform(0.0, 0.15));
    }
    if (u.words.empty()) return false;
    u.start_s = u.words.front().start_s;
    u.end_s = u.words.back().end_s;
    const bool hot = in_hot(u.start_s);
    const double lexical = intensity(u.start_s, kLexical);
    if (lexical > 0.0 && u.words.size() >= 2 &&
        rng_.bernoulli(std::min(1.0, lexical * cfg_.signal.hot_vocab_probability))) {
      const auto& marker = kHotMarkers[rng_.below(std::size(kHotMarkers))];
      const std::size_t at = rng_.below(u.words.size() - 1);
      u.words[at].text = marker[0];
      u.words[at + 1].text = marker[1];
    }
    if (hot) {
      u.hot_label = rng_.bernoulli(0.2) ? "b+" : "b";
    } else {
      u.hot_label = "0";
    }
    plan_.meeting.utterances.push_back(std::move(u));
    return true;
  }

  void sample_speech() {
    const double d = cfg_.duration_s;
    double t = rng_.uniform(0.0, 2.0);
    std::size_t speaker = rng_.below(cfg_.speakers);
    while (t < d - 1.0) {
      const double level = intensity(t, kInteraction);
      const double turn = factor(cfg_.signal.turn_rate_multiplier, level);
      const double len = rng_.uniform(2.0, 8.0) / turn;
      const double end = std::min(t + len, d);
      add_utterance(speaker, t, end);
      const double p_overlap = std::min(
          1.0, cfg_.base_overlap_probability * factor(cfg_.signal.overlap_multiplier, level));
      if (cfg_.speakers > 1 && rng_.bernoulli(p_overlap)) {
        const double os = t + rng_.uniform(0.2, 0.8) * (end - t);
        const double oe = std::min(os + rng_.uniform(1.0, 3.0), d);
        add_utterance(other_speaker(speaker), os, oe);
      }
      t = end + rng_.uniform(0.3, 2.0) / turn;
      speaker = other_speaker(speaker);
    }
  }

  void sample_laughter() {
    const double d = cfg_.duration_s;
    const double base_rate = cfg_.base_laughter_per_min / 60.0;
    const double max_rate =
        base_rate * factor(cfg_.signal.laughter_rate_multiplier, 1.0 + cfg_.modality_spread);
    if (max_rate <= 0.0) return;
    // Thinned Poisson process.
    double t = 0.0;
    while (true) {
      t += -std::log(1.0 - rng_.uniform()) / max_rate;
      if (t >= d - 0.5) break;
      const double rate =
          base_rate * factor(cfg_.signal.laughter_rate_multiplier, intensity(t, kInteraction));
      if (!rng_.bernoulli(rate / max_rate)) continue;
      const double start = round_ms(t);
      const double end = round_ms(std::min(start + rng_.uniform(0.5, 2.0), d));
      ++plan_.laughter_events;
      Utterance* host = nullptr;
      for (auto& u : plan_.meeting.utterances) {
        if (!u.words.empty() && u.start_s <= start && start < u.end_s) {
          host = &u;
          break;
        }
      }
      if (host != nullptr && rng_.bernoulli(0.5)) {
        host->laughter.push_back(LaughterEvent{start, end, LaughterKind::kWithinSpeech});
        continue;
      }
      Utterance u;
      u.meeting_id = plan_.meeting.id;
      const std::size_t spk = rng_.below(cfg_.speakers);
      u.speaker_id = plan_.meeting.speakers[spk];
      u.channel = static_cast<int>(spk);
      u.start_s = start;
      u.end_s = end;
      u.hot_label = in_hot(start) ? "b" : "0";
      u.laughter.push_back(LaughterEvent{start, end, LaughterKind::kStandalone});
      plan_.meeting.utterances.push_back(std::move(u));
    }
  }

  void finalize() {
    auto& us = plan_.meeting.utterances;
    std::stable_sort(us.begin(), us.end(), [](const Utterance& a, const Utterance& b) {
      return a.start_s < b.start_s;
    });
    for (std::size_t i = 0; i < us.size(); ++i) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "_u%05zu", i);
      us[i].id = plan_.meeting.id + buf;
    }
  }

  const SynthConfig& cfg_;
  Rng rng_;
  MeetingPlan plan_;
};

double region_intensity(const std::vector<Region>& regions, double t, Modality m) {
  for (const auto& r : regions) {
    if (t >= r.start && t < r.end) return r.intensity[m];
  }
  return 0.0;
}

std::vector<int> planted_hot_windows(const Meeting& m, const WindowParams& wp) {
  std::vector<int> out;
  if (m.duration_s < wp.window_len_s) return out;
  const int count = static_cast<int>(std::floor((m.duration_s - wp.window_len_s) / wp.step_s)) + 1;
  for (int k = 0; k < count; ++k) {
    const double ws = k * wp.step_s;
    const double we = ws + wp.window_len_s;
    for (const auto& u : m.utterances) {
      if ((u.hot_label == "b" || u.hot_label == "b+") && ws < u.end_s && u.start_s < we) {
        out.push_back(k);
        break;
      }
    }
  }
  return out;
}

std::size_t window_count(double duration, const WindowParams& wp) {
  if (duration < wp.window_len_s) return 0;
  return static_cast<std::size_t>(std::floor((duration - wp.window_len_s) / wp.step_s)) + 1;
}

}  // namespace

SynthConfig SynthConfig::desk_bench() {
  SynthConfig c;
  c.signal.turn_rate_multiplier = 3.0;
  c.signal.overlap_multiplier = 3.0;
  c.signal.hot_vocab_probability = 0.5;
  c.signal.embedding_shift = 1.5;
  c.signal.prosody_shift = 1.2;
  c.signal.laughter_rate_multiplier = 6.0;
  c.base_laughter_per_min = 1.0;
  c.modality_spread = 0.6;
  return c;
}

SynthConfig SynthConfig::null_signal() {
  SynthConfig c;
  c.signal = SynthSignal{};
  return c;
}

void SynthConfig::validate() const {
  const auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(signal.hot_vocab_probability) || !prob(base_overlap_probability)) {
    throw ValidationError("synth: probabilities must lie in [0, 1]");
  }
  if (!prob(modality_spread)) throw ValidationError("synth: modality_spread must lie in [0, 1]");
  if (signal.turn_rate_multiplier < 0 || signal.overlap_multiplier < 0 ||
      signal.laughter_rate_multiplier < 0 || signal.embedding_shift < 0 ||
      signal.prosody_shift < 0) {
    throw ValidationError("synth: signal strengths must be non-negative");
  }
  if (hot_region_rate < 0 || base_laughter_per_min < 0) {
    throw ValidationError("synth: rates must be non-negative");
  }
  if (speakers == 0) throw ValidationError("synth: need at least one speaker");
  if (!(duration_s > 0)) throw ValidationError("synth: duration must be positive");
  if (!(hot_len_min_s > 0) || hot_len_max_s < hot_len_min_s) {
    throw ValidationError("synth: bad hot region length range");
  }
  if (hot_len_max_s > duration_s) {
    throw ValidationError("synth: hot region longer than the meeting");
  }
  if (embedding_dim == 0 || prosody_dim < 2) throw ValidationError("synth: bad vector dims");
  if (signal_dims > embedding_dim || signal_dims > prosody_dim - 1) {
    throw ValidationError("synth: signal_dims exceeds a vector dimension");
  }
  if (train_meetings + dev_meetings + eval_meetings == 0) {
    throw ValidationError("synth: no meetings requested");
  }
}

json SynthConfig::to_json() const {
  return {{"seed", seed},
          {"train_meetings", train_meetings},
          {"dev_meetings", dev_meetings},
          {"eval_meetings", eval_meetings},
          {"duration_s", duration_s},
          {"speakers", speakers},
          {"hot_region_rate", hot_region_rate},
          {"hot_len_min_s", hot_len_min_s},
          {"hot_len_max_s", hot_len_max_s},
          {"modality_spread", modality_spread},
          {"base_overlap_probability", base_overlap_probability},
          {"base_laughter_per_min", base_laughter_per_min},
          {"embedding_dim", embedding_dim},
          {"prosody_dim", prosody_dim},
          {"signal_dims", signal_dims},
          {"signal",
           {{"turn_rate_multiplier", signal.turn_rate_multiplier},
            {"overlap_multiplier", signal.overlap_multiplier},
            {"hot_vocab_probability", signal.hot_vocab_probability},
            {"embedding_shift", signal.embedding_shift},
            {"prosody_shift", signal.prosody_shift},
            {"laughter_rate_multiplier", signal.laughter_rate_multiplier}}}};
}

SynthConfig SynthConfig::from_json(const json& j) {
  SynthConfig c;
  try {
    c.seed = j.value("seed", c.seed);
    c.train_meetings = j.value("train_meetings", c.train_meetings);
    c.dev_meetings = j.value("dev_meetings", c.dev_meetings);
    c.eval_meetings = j.value("eval_meetings", c.eval_meetings);
    c.duration_s = j.value("duration_s", c.duration_s);
    c.speakers = j.value("speakers", c.speakers);
    c.hot_region_rate = j.value("hot_region_rate", c.hot_region_rate);
    c.hot_len_min_s = j.value("hot_len_min_s", c.hot_len_min_s);
    c.hot_len_max_s = j.value("hot_len_max_s", c.hot_len_max_s);
    c.modality_spread = j.value("modality_spread", c.modality_spread);
    c.base_overlap_probability = j.value("base_overlap_probability", c.base_overlap_probability);
    c.base_laughter_per_min = j.value("base_laughter_per_min", c.base_laughter_per_min);
    c.embedding_dim = j.value("embedding_dim", c.embedding_dim);
    c.prosody_dim = j.value("prosody_dim", c.prosody_dim);
    c.signal_dims = j.value("signal_dims", c.signal_dims);
    if (j.contains("signal")) {
      const auto& s = j.at("signal");
      c.signal.turn_rate_multiplier = s.value("turn_rate_multiplier", 0.0);
      c.signal.overlap_multiplier = s.value("overlap_multiplier", 0.0);
      c.signal.hot_vocab_probability = s.value("hot_vocab_probability", 0.0);
      c.signal.embedding_shift = s.value("embedding_shift", 0.0);
      c.signal.prosody_shift = s.value("prosody_shift", 0.0);
      c.signal.laughter_rate_multiplier = s.value("laughter_rate_multiplier", 0.0);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("synth config: ") + e.what());
  }
  c.validate();
  return c;
}

const SynthLedgerSplit& SynthLedger::split(Split s) const {
  switch (s) {
    case Split::kTraining: return training;
    case Split::kDevelopment: return development;
    case Split::kEvaluation: return evaluation;
  }
  return training;
}

json SynthLedger::to_json() const {
  const auto js = [](const SynthLedgerSplit& s) {
    return json{{"meetings", s.meetings},     {"utterances", s.utterances},
                {"words", s.words},           {"windows", s.windows},
                {"hot_windows", s.hot_windows}, {"hot_regions", s.hot_regions},
                {"laughter_events", s.laughter_events}};
  };
  return {{"training", js(training)},
          {"development", js(development)},
          {"evaluation", js(evaluation)},
          {"hot_windows", hot_windows}};
}

SynthOutput generate(const SynthConfig& config) {
  config.validate();
  SynthOutput out;
  out.embeddings = DenseVectorStore(config.embedding_dim, kUtteranceEmbeddingKind);
  out.prosody = DenseVectorStore(config.prosody_dim, kProsodySubwindowKind);

  // Fixed per-dimension offsets and scales for the raw prosody vectors; the
  // last dimension is constant.
  Rng dim_rng(derive_seed(config.seed, "prosody-dims"));
  std::vector<double> offset(config.prosody_dim), scale(config.prosody_dim);
  for (std::size_t d = 0; d < config.prosody_dim; ++d) {
    offset[d] = dim_rng.uniform(-5.0, 5.0);
    scale[d] = dim_rng.uniform(0.5, 3.0);
  }

  std::vector<Meeting> meetings;
  SplitConfig splits;
  const std::pair<Split, std::size_t> plan[] = {{Split::kTraining, config.train_meetings},
                                                {Split::kDevelopment, config.dev_meetings},
                                                {Split::kEvaluation, config.eval_meetings}};
  for (const auto& [split, count] : plan) {
    auto& ledger = split == Split::kTraining      ? out.ledger.training
                   : split == Split::kDevelopment ? out.ledger.development
                                                  : out.ledger.evaluation;
    auto& ids = split == Split::kTraining      ? splits.training
                : split == Split::kDevelopment ? splits.development
                                               : splits.evaluation;
    const char* tag = split == Split::kTraining ? "tr" : split == Split::kDevelopment ? "dv" : "ev";
    for (std::size_t i = 0; i < count; ++i) {
      char id[32];
      std::snprintf(id, sizeof id, "syn-%s-%03zu", tag, i);
      MeetingBuilder builder(config, id, derive_seed(config.seed, id));
      MeetingPlan mp = builder.build();
      const Meeting& m = mp.meeting;

      ledger.meetings += 1;
      ledger.utterances += m.utterances.size();
      for (const auto& u : m.utterances) ledger.words += u.words.size();
      ledger.windows += window_count(m.duration_s, config.window);
      auto hot = planted_hot_windows(m, config.window);
      ledger.hot_windows += hot.size();
      ledger.hot_regions += mp.regions.size();
      ledger.laughter_events += mp.laughter_events;
      out.ledger.hot_windows[m.id] = std::move(hot);

      Rng vec_rng(derive_seed(config.seed, std::string(id) + "/vectors"));
      for (const auto& u : m.utterances) {
        std::vector<double> v(config.embedding_dim);
        for (auto& x : v) x = vec_rng.normal();
        if (involved(u)) {
          const double shift =
              config.signal.embedding_shift * region_intensity(mp.regions, u.start_s, kLexical);
          for (std::size_t d = 0; d < config.signal_dims; ++d) v[d] += shift;
        }
        out.embeddings.insert(u.id, std::move(v));
      }

      const auto cells = static_cast<std::size_t>(std::ceil(m.duration_s / 5.0));
      for (std::size_t c = 0; c < m.speakers.size(); ++c) {
        std::vector<bool> active(cells, false);
        for (const auto& u : m.utterances) {
          if (u.channel != static_cast<int>(c)) continue;
          for (const auto& w : u.words) {
            const auto first = static_cast<std::size_t>(std::floor(w.start_s / 5.0));
            const auto last = static_cast<std::size_t>(std::ceil(w.end_s / 5.0));
            for (std::size_t k = first; k < last && k < cells; ++k) active[k] = true;
          }
        }
        for (std::size_t k = 0; k < cells; ++k) {
          if (!active[k]) continue;
          const double cs = 5.0 * k;
          double shift = 0.0;
          for (const auto& r : mp.regions) {
            if (overlaps(r.start, r.end, cs, cs + 5.0)) {
              shift = std::max(shift, config.signal.prosody_shift * r.intensity[kProsodic]);
            }
          }
          std::vector<double> v(config.prosody_dim);
          for (std::size_t d = 0; d + 1 < config.prosody_dim; ++d) {
            double z = vec_rng.normal();
            if (d < config.signal_dims) z += shift;
            v[d] = offset[d] + scale[d] * z;
          }
          v.back() = 1.0;
          out.prosody.insert(m.id + "#" + std::to_string(c) + "#" + std::to_string(5 * k),
                             std::move(v));
        }
      }
      ids.push_back(m.id);
      meetings.push_back(std::move(mp.meeting));
    }
  }
  for (const auto& m : meetings) validate_meeting(m);
  out.corpus = Corpus(std::move(meetings), std::move(splits));
  return out;
}

SynthPaths synth_paths(const std::filesystem::path& out_dir) {
  return SynthPaths{out_dir / "corpus",          out_dir / "splits.json",
                    out_dir / "embeddings.jsonl", out_dir / "prosody.jsonl",
                    out_dir / "synth_ledger.json", out_dir / "hotspot.json"};
}

SynthPaths write_synth(const SynthOutput& out, const SynthConfig& config,
                       const std::filesystem::path& out_dir) {
  const auto p = synth_paths(out_dir);
  write_corpus(out.corpus, p.corpus_dir);
  write_splits(out.corpus.splits(), p.splits);
  write_dense_store(out.embeddings, p.embeddings);
  write_dense_store(out.prosody, p.prosody);
  json ledger = out.ledger.to_json();
  ledger["config"] = config.to_json();
  detail::write_text_file(p.ledger, ledger.dump(2) + "\n");
  return p;
}

}  // namespace hotspot
