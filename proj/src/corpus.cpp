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

#include "hotspot/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "hotspot/error.hpp"
#include "json_util.hpp"

namespace hotspot {

using nlohmann::json;

bool involved(const Utterance& u) {
  return u.hot_label == "b" || u.hot_label == "b+";
}

const char* split_name(Split s) {
  switch (s) {
    case Split::kTraining: return "training";
    case Split::kDevelopment: return "development";
    case Split::kEvaluation: return "evaluation";
  }
  return "?";
}

Split parse_split(const std::string& name) {
  if (name == "training" || name == "train") return Split::kTraining;
  if (name == "development" || name == "dev") return Split::kDevelopment;
  if (name == "evaluation" || name == "eval") return Split::kEvaluation;
  throw ValidationError("unknown split '" + name + "'");
}

const std::vector<std::string>& SplitConfig::ids(Split s) const {
  switch (s) {
    case Split::kTraining: return training;
    case Split::kDevelopment: return development;
    case Split::kEvaluation: return evaluation;
  }
  return training;
}

Corpus::Corpus(std::vector<Meeting> meetings, SplitConfig splits)
    : meetings_(std::move(meetings)), splits_(std::move(splits)) {
  std::sort(meetings_.begin(), meetings_.end(),
            [](const Meeting& a, const Meeting& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < meetings_.size(); ++i) {
    if (!index_.emplace(meetings_[i].id, i).second) {
      throw ValidationError("duplicate meeting id '" + meetings_[i].id + "'");
    }
  }
  validate_splits(splits_, meetings_);
}

const Meeting& Corpus::meeting(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw ValidationError("unknown meeting '" + id + "'");
  return meetings_[it->second];
}

bool Corpus::contains(const std::string& id) const { return index_.count(id) > 0; }

std::vector<const Meeting*> Corpus::split(Split s) const {
  std::vector<const Meeting*> out;
  for (const auto& id : splits_.ids(s)) out.push_back(&meeting(id));
  return out;
}

void validate_meeting(const Meeting& m) {
  const std::string where = "meeting '" + m.id + "': ";
  if (m.id.empty()) throw ValidationError("meeting with empty id");
  if (!(m.duration_s > 0.0)) throw ValidationError(where + "duration_s must be positive");
  const std::set<std::string> roster(m.speakers.begin(), m.speakers.end());
  for (const auto& u : m.utterances) {
    const std::string uw = where + "utterance '" + u.id + "': ";
    if (u.id.empty()) throw ValidationError(where + "utterance with empty id");
    if (u.meeting_id != m.id) {
      throw ValidationError(uw + "meeting_id '" + u.meeting_id + "' does not match");
    }
    if (u.channel < 0) throw ValidationError(uw + "negative channel");
    if (!roster.count(u.speaker_id)) {
      throw ValidationError(uw + "speaker '" + u.speaker_id + "' not in meeting roster");
    }
    if (u.end_s < u.start_s) throw ValidationError(uw + "end_s < start_s");
    if (u.start_s < 0.0 || u.end_s > m.duration_s) {
      throw ValidationError(uw + "outside meeting duration");
    }
    for (std::size_t i = 0; i < u.words.size(); ++i) {
      const Word& w = u.words[i];
      if (w.text.empty()) throw ValidationError(uw + "word " + std::to_string(i) + " has empty text");
      if (!(w.start_s < w.end_s) || w.start_s < 0.0) {
        throw ValidationError(uw + "word " + std::to_string(i) + " has invalid times");
      }
      if (w.start_s < u.start_s || w.end_s > u.end_s) {
        throw ValidationError(uw + "word " + std::to_string(i) + " outside utterance bounds");
      }
      if (i > 0 && w.start_s < u.words[i - 1].end_s) {
        throw ValidationError(uw + "word " + std::to_string(i) +
                              " overlaps or precedes the previous word");
      }
    }
    for (const auto& l : u.laughter) {
      if (!(l.start_s < l.end_s)) throw ValidationError(uw + "laughter event with end_s <= start_s");
      if (l.start_s < 0.0 || l.end_s > m.duration_s) {
        throw ValidationError(uw + "laughter event outside meeting duration");
      }
    }
  }
}

void validate_splits(const SplitConfig& splits, const std::vector<Meeting>& meetings) {
  std::set<std::string> known;
  for (const auto& m : meetings) known.insert(m.id);
  std::set<std::string> seen;
  for (Split s : kAllSplits) {
    for (const auto& id : splits.ids(s)) {
      if (!known.count(id)) {
        throw ValidationError(std::string("split '") + split_name(s) +
                              "' references unknown meeting '" + id + "'");
      }
      if (!seen.insert(id).second) {
        throw ValidationError("meeting '" + id + "' appears in more than one split");
      }
    }
  }
}

namespace {

LaughterKind parse_kind(const std::string& s) {
  if (s == "standalone") return LaughterKind::kStandalone;
  if (s == "within_speech") return LaughterKind::kWithinSpeech;
  throw ValidationError("unknown laughter kind '" + s + "'");
}

const char* kind_name(LaughterKind k) {
  return k == LaughterKind::kStandalone ? "standalone" : "within_speech";
}

Utterance parse_utterance(const json& j) {
  using detail::require;
  Utterance u;
  u.id = require<std::string>(j, "id");
  u.meeting_id = require<std::string>(j, "meeting_id");
  u.speaker_id = require<std::string>(j, "speaker_id");
  u.channel = require<int>(j, "channel");
  u.start_s = require<double>(j, "start_s");
  u.end_s = require<double>(j, "end_s");
  u.hot_label = require<std::string>(j, "hot_label");
  for (const auto& jw : detail::require_array(j, "words")) {
    u.words.push_back(Word{require<std::string>(jw, "text"),
                           require<double>(jw, "start_s"),
                           require<double>(jw, "end_s")});
  }
  if (j.contains("laughter")) {
    for (const auto& jl : detail::require_array(j, "laughter")) {
      u.laughter.push_back(LaughterEvent{require<double>(jl, "start_s"),
                                         require<double>(jl, "end_s"),
                                         parse_kind(require<std::string>(jl, "kind"))});
    }
  }
  return u;
}

json utterance_json(const Utterance& u) {
  json words = json::array();
  for (const auto& w : u.words) {
    words.push_back({{"text", w.text}, {"start_s", w.start_s}, {"end_s", w.end_s}});
  }
  json laughter = json::array();
  for (const auto& l : u.laughter) {
    laughter.push_back({{"start_s", l.start_s}, {"end_s", l.end_s}, {"kind", kind_name(l.kind)}});
  }
  return {{"id", u.id},           {"meeting_id", u.meeting_id},
          {"speaker_id", u.speaker_id}, {"channel", u.channel},
          {"start_s", u.start_s}, {"end_s", u.end_s},
          {"hot_label", u.hot_label}, {"words", std::move(words)},
          {"laughter", std::move(laughter)}};
}

std::vector<Utterance> read_transcript(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot open transcript " + file.string());
  std::vector<Utterance> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_utterance(json::parse(line)));
    } catch (const std::exception& e) {
      throw ValidationError(file.string() + ":" + std::to_string(line_no) +
                            ": malformed record: " + e.what());
    }
  }
  return out;
}

}  // namespace

SplitConfig load_splits(const std::filesystem::path& file) {
  const json j = detail::read_json_file(file);
  SplitConfig s;
  try {
    s.training = j.at("training").get<std::vector<std::string>>();
    s.development = j.at("development").get<std::vector<std::string>>();
    s.evaluation = j.at("evaluation").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ValidationError(file.string() + ": " + e.what());
  }
  return s;
}

Corpus load_corpus(const std::filesystem::path& dir, const SplitConfig& split) {
  const auto index_file = dir / "meetings.json";
  const json index = detail::read_json_file(index_file);
  if (!index.is_array()) throw ValidationError(index_file.string() + ": expected an array");
  std::vector<Meeting> meetings;
  std::set<std::string> utterance_ids;
  for (std::size_t i = 0; i < index.size(); ++i) {
    Meeting m;
    try {
      m.id = detail::require<std::string>(index[i], "id");
      m.duration_s = detail::require<double>(index[i], "duration_s");
      m.speakers = index[i].at("speakers").get<std::vector<std::string>>();
    } catch (const std::exception& e) {
      throw ValidationError(index_file.string() + ": entry " + std::to_string(i) + ": " + e.what());
    }
    m.utterances = read_transcript(dir / (m.id + ".jsonl"));
    validate_meeting(m);
    for (const auto& u : m.utterances) {
      if (!utterance_ids.insert(u.id).second) {
        throw ValidationError("duplicate utterance id '" + u.id + "'");
      }
    }
    meetings.push_back(std::move(m));
  }
  return Corpus(std::move(meetings), split);
}

void write_splits(const SplitConfig& splits, const std::filesystem::path& file) {
  const json j = {{"training", splits.training},
                  {"development", splits.development},
                  {"evaluation", splits.evaluation}};
  detail::write_text_file(file, j.dump(2) + "\n");
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json index = json::array();
  for (const auto& m : corpus.meetings()) {
    index.push_back({{"id", m.id}, {"duration_s", m.duration_s}, {"speakers", m.speakers}});
    std::string body;
    for (const auto& u : m.utterances) body += utterance_json(u).dump() + "\n";
    detail::write_text_file(dir / (m.id + ".jsonl"), body);
  }
  detail::write_text_file(dir / "meetings.json", index.dump(2) + "\n");
}

StatsTable corpus_stats(const Corpus& corpus) {
  StatsTable table;
  for (Split s : kAllSplits) {
    SplitStats row;
    row.split = split_name(s);
    for (const Meeting* m : corpus.split(s)) {
      ++row.meetings;
      row.utterances += m->utterances.size();
      for (const auto& u : m->utterances) row.words += u.words.size();
    }
    table.push_back(row);
  }
  return table;
}

}  // namespace hotspot
