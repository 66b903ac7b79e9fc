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

#include "hotspot/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "hotspot/error.hpp"
#include "hotspot/rng.hpp"

namespace hotspot {

Confusion& Confusion::operator+=(const Confusion& o) {
  tp += o.tp;
  fn += o.fn;
  fp += o.fp;
  tn += o.tn;
  return *this;
}

Confusion confusion(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) {
    throw ValidationError("confusion: " + std::to_string(truth.size()) + " labels vs " +
                          std::to_string(predicted.size()) + " predictions");
  }
  Confusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 1) {
      predicted[i] == 1 ? ++c.tp : ++c.fn;
    } else {
      predicted[i] == 1 ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

double recall_hot(const Confusion& c) {
  if (c.tp + c.fn == 0) throw NumericError("UAR undefined: no hot samples");
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

double recall_not_hot(const Confusion& c) {
  if (c.tn + c.fp == 0) throw NumericError("UAR undefined: no not-hot samples");
  return static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
}

double uar(const Confusion& c) { return 0.5 * (recall_hot(c) + recall_not_hot(c)); }

EvalResult evaluate(std::span<const int> truth, std::span<const int> predicted,
                    const std::string& split, const std::string& fingerprint,
                    std::uint64_t seed) {
  EvalResult r;
  r.split = split;
  r.confusion = confusion(truth, predicted);
  r.recall_hot = recall_hot(r.confusion);
  r.recall_not_hot = recall_not_hot(r.confusion);
  r.uar = 0.5 * (r.recall_hot + r.recall_not_hot);
  r.fingerprint = fingerprint;
  r.seed = seed;
  return r;
}

void append_eval_result(const EvalResult& r, const std::filesystem::path& ledger,
                        const std::string& target) {
  const nlohmann::json j = {
      {"target", target},
      {"split", r.split},
      {"uar", r.uar},
      {"recall_hot", r.recall_hot},
      {"recall_not_hot", r.recall_not_hot},
      {"confusion", {{"tp", r.confusion.tp}, {"fn", r.confusion.fn},
                     {"fp", r.confusion.fp}, {"tn", r.confusion.tn}}},
      {"fingerprint", r.fingerprint},
      {"seed", r.seed}};
  if (ledger.has_parent_path()) std::filesystem::create_directories(ledger.parent_path());
  std::ofstream out(ledger, std::ios::app);
  if (!out) throw Error("cannot append to " + ledger.string());
  out << j.dump() << "\n";
}

std::string format_eval_result(const EvalResult& r) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(4);
  ss << r.split << ": UAR " << r.uar << " (recall hot " << r.recall_hot << ", not hot "
     << r.recall_not_hot << ")  tp=" << r.confusion.tp << " fn=" << r.confusion.fn
     << " fp=" << r.confusion.fp << " tn=" << r.confusion.tn;
  return ss.str();
}

std::size_t default_fold_count(std::size_t meetings, std::size_t meetings_per_fold) {
  const auto k = static_cast<std::size_t>(
      std::llround(static_cast<double>(meetings) / static_cast<double>(meetings_per_fold)));
  return std::max<std::size_t>(2, k);
}

std::vector<std::vector<std::string>> assign_folds(std::vector<std::string> meetings,
                                                   std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw ValidationError("cross-validation needs at least 2 folds");
  if (meetings.size() < folds) {
    throw ValidationError("cannot split " + std::to_string(meetings.size()) + " meetings into " +
                          std::to_string(folds) + " folds");
  }
  std::sort(meetings.begin(), meetings.end());
  Rng rng(derive_seed(seed, "folds"));
  rng.shuffle(meetings.begin(), meetings.end());
  std::vector<std::vector<std::string>> out(folds);
  for (std::size_t i = 0; i < meetings.size(); ++i) out[i % folds].push_back(meetings[i]);
  return out;
}

CvResult jackknife_cv(const std::vector<std::string>& meetings, std::size_t folds,
                      std::uint64_t seed,
                      const std::function<Confusion(const std::vector<std::string>&,
                                                    const std::vector<std::string>&)>&
                          train_and_score) {
  CvResult r;
  r.folds = assign_folds(meetings, folds, seed);
  double sum = 0.0;
  for (std::size_t f = 0; f < r.folds.size(); ++f) {
    std::vector<std::string> train;
    for (std::size_t g = 0; g < r.folds.size(); ++g) {
      if (g != f) train.insert(train.end(), r.folds[g].begin(), r.folds[g].end());
    }
    const Confusion c = train_and_score(train, r.folds[f]);
    if (c.both_classes()) {
      const double u = uar(c);
      r.fold_uar.push_back(u);
      sum += u;
      ++r.defined_folds;
    } else {
      r.fold_uar.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  if (r.defined_folds == 0) throw NumericError("cross-validation: no fold has both classes");
  r.mean = sum / r.defined_folds;
  double ss = 0.0;
  for (double u : r.fold_uar) {
    if (!std::isnan(u)) ss += (u - r.mean) * (u - r.mean);
  }
  r.stddev = std::sqrt(ss / r.defined_folds);
  return r;
}

}  // namespace hotspot
