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

#pragma once

// Unweighted average recall, confusion counts, and meeting-level
// cross-validation.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hotspot {

/// Hot is the positive class.
struct Confusion {
  std::size_t tp = 0;
  std::size_t fn = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fn + fp + tn; }
  bool both_classes() const { return tp + fn > 0 && fp + tn > 0; }
  Confusion& operator+=(const Confusion& o);
  bool operator==(const Confusion&) const = default;
};

Confusion confusion(std::span<const int> truth, std::span<const int> predicted);

/// 0.5 * (tp / (tp + fn) + tn / (tn + fp)). Throws NumericError when a class
/// has no samples.
double uar(const Confusion& c);
double recall_hot(const Confusion& c);
double recall_not_hot(const Confusion& c);

struct EvalResult {
  std::string split;
  double uar = 0.0;
  double recall_hot = 0.0;
  double recall_not_hot = 0.0;
  Confusion confusion;
  std::string fingerprint;
  std::uint64_t seed = 0;
};

EvalResult evaluate(std::span<const int> truth, std::span<const int> predicted,
                    const std::string& split, const std::string& fingerprint = {},
                    std::uint64_t seed = 0);

/// Appends one JSON line to an append-only run ledger.
void append_eval_result(const EvalResult& r, const std::filesystem::path& ledger,
                        const std::string& target);
std::string format_eval_result(const EvalResult& r);

/// Number of folds giving roughly meetings_per_fold meetings each, at
/// least 2.
std::size_t default_fold_count(std::size_t meetings, std::size_t meetings_per_fold = 10);

/// Seeded shuffle, then round-robin assignment; meetings stay intact.
std::vector<std::vector<std::string>> assign_folds(std::vector<std::string> meetings,
                                                   std::size_t folds, std::uint64_t seed);

struct CvResult {
  std::vector<double> fold_uar;  ///< NaN where a held-out fold lacks a class
  std::vector<std::vector<std::string>> folds;
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t defined_folds = 0;
};

/// Runs train_and_score(train_meetings, heldout_meetings) per fold; the
/// callback refits everything (vocabulary, statistics, models) on the
/// training part and returns the held-out confusion.
CvResult jackknife_cv(const std::vector<std::string>& meetings, std::size_t folds,
                      std::uint64_t seed,
                      const std::function<Confusion(const std::vector<std::string>&,
                                                    const std::vector<std::string>&)>&
                          train_and_score);

}  // namespace hotspot
