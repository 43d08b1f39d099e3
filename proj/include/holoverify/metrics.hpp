// Copyright 2026 The holoverify Authors
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

// Classification metrics. Attack is the positive class throughout: an alert is a
// positive prediction.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "holoverify/catalog.hpp"

namespace holoverify {

struct Confusion {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;
};

inline Confusion confusion(std::span<const Label> verdicts, std::span<const Label> labels) {
  if (verdicts.size() != labels.size()) throw Error("verdict/label count mismatch");
  Confusion c;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    const bool pred = verdicts[i] == Label::attack;
    const bool truth = labels[i] == Label::attack;
    if (pred && truth) ++c.tp;
    else if (pred) ++c.fp;
    else if (truth) ++c.fn;
    else ++c.tn;
  }
  return c;
}

struct PrfScore {
  double precision = 0.0;
  double recall = 0.0;
  double fscore = 0.0;
  /// Set when a zero denominator forced a value to 0.
  bool undefined = false;
};

inline PrfScore f_score(const Confusion& c) {
  PrfScore s;
  const auto pp = c.tp + c.fp;
  const auto ap = c.tp + c.fn;
  if (pp > 0) s.precision = static_cast<double>(c.tp) / pp;
  else s.undefined = true;
  if (ap > 0) s.recall = static_cast<double>(c.tp) / ap;
  else s.undefined = true;
  // 2PR/(P+R) written as 2TP/(2TP+FP+FN) to stay exact when both are defined.
  const auto denom = 2 * c.tp + c.fp + c.fn;
  if (c.tp > 0) s.fscore = static_cast<double>(2 * c.tp) / static_cast<double>(denom);
  else if (denom == 0) s.undefined = true;
  return s;
}

inline PrfScore f_score(std::span<const Label> verdicts, std::span<const Label> labels) {
  return f_score(confusion(verdicts, labels));
}

/// Fraction of clips flagged as attack, for attack-only test sets.
inline double attack_recall(std::span<const Label> verdicts) {
  if (verdicts.empty()) throw Error("attack_recall on an empty set");
  const auto hits = std::count(verdicts.begin(), verdicts.end(), Label::attack);
  return static_cast<double>(hits) / static_cast<double>(verdicts.size());
}

/// Probability that a random attack scores above a random original, ties counting one half.
/// Scores must be oriented so that larger means more attack-like.
inline double roc_auc(std::span<const double> scores, std::span<const Label> labels) {
  if (scores.size() != labels.size()) throw Error("score/label count mismatch");
  std::vector<std::pair<double, bool>> v;
  v.reserve(scores.size());
  std::int64_t n_att = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    v.emplace_back(scores[i], labels[i] == Label::attack);
    n_att += labels[i] == Label::attack;
  }
  const std::int64_t n_orig = static_cast<std::int64_t>(v.size()) - n_att;
  if (n_att == 0 || n_orig == 0) throw Error("roc_auc needs both classes");
  std::sort(v.begin(), v.end());
  // Twice the Mann-Whitney statistic, kept integral so the result is a single division.
  std::int64_t twice_u = 0;
  std::int64_t originals_below = 0;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    std::int64_t tie_att = 0, tie_orig = 0;
    while (j < v.size() && v[j].first == v[i].first) {
      (v[j].second ? tie_att : tie_orig) += 1;
      ++j;
    }
    twice_u += tie_att * (2 * originals_below + tie_orig);
    originals_below += tie_orig;
    i = j;
  }
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(n_att * n_orig));
}

// ---------------------------------------------------------------------------
// Per-run results and aggregation

enum class DatasetTag { holo_vanilla, holo_photo_replacement, midv2020_clips };

inline std::string_view to_string(DatasetTag t) {
  switch (t) {
    case DatasetTag::holo_vanilla: return "holo_vanilla";
    case DatasetTag::holo_photo_replacement: return "holo_photo_replacement";
    case DatasetTag::midv2020_clips: return "midv2020_clips";
  }
  return "holo_vanilla";
}

inline DatasetTag parse_dataset_tag(std::string_view s) {
  for (auto t : {DatasetTag::holo_vanilla, DatasetTag::holo_photo_replacement, DatasetTag::midv2020_clips})
    if (to_string(t) == s) return t;
  throw Error("unknown dataset tag: " + std::string(s));
}

/// Mixed test sets are scored with the F-score, attack-only ones with recall.
inline bool is_attack_only(DatasetTag t) { return t != DatasetTag::holo_vanilla; }

struct ClipOutcome {
  std::string clip_id;
  Label verdict = Label::attack;
  Label label = Label::attack;
  double score = 0.0;
  std::size_t stop_index = 0;
};

struct RunResult {
  int run_id = 0;
  DatasetTag dataset_tag = DatasetTag::holo_vanilla;
  std::string method;    // e.g. "OUR - mobilenetv3_small050"
  std::string strategy;  // "whole" or "cumulative"
  std::vector<ClipOutcome> clips;
};

/// The headline metric for a run: F-score on mixed sets, recall on attack-only sets.
inline double headline_metric(const RunResult& r) {
  std::vector<Label> verdicts, labels;
  for (const auto& c : r.clips) {
    verdicts.push_back(c.verdict);
    labels.push_back(c.label);
  }
  if (is_attack_only(r.dataset_tag)) return attack_recall(verdicts);
  return f_score(verdicts, labels).fscore;
}

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample (n - 1) standard deviation; 0 for a single value
  std::size_t n = 0;
};

inline MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  out.n = values.size();
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

struct AggregateKey {
  std::string method;
  std::string strategy;
  DatasetTag dataset_tag;
  auto operator<=>(const AggregateKey&) const = default;
};

/// Mean and sample standard deviation of the headline metric across runs.
inline std::map<AggregateKey, MeanStd> aggregate_runs(std::span<const RunResult> results) {
  std::map<AggregateKey, std::vector<double>> values;
  for (const auto& r : results) values[{r.method, r.strategy, r.dataset_tag}].push_back(headline_metric(r));
  std::map<AggregateKey, MeanStd> out;
  for (const auto& [k, v] : values) out[k] = mean_std(v);
  return out;
}

/// Expected headline metric of the three reference predictors for a test set with the given
/// attack fraction: perfectly random (p = 0.5), always attack, always original.
struct DummyMetrics {
  double random = 0.0;
  double always_attack = 0.0;
  double always_original = 0.0;
};

inline DummyMetrics dummy_metrics(DatasetTag tag, double attack_fraction = 0.5) {
  if (is_attack_only(tag)) return {0.5, 1.0, 0.0};
  const double p = attack_fraction;
  return {2.0 * p * 0.5 / (p + 0.5), 2.0 * p / (p + 1.0), 0.0};
}

}  // namespace holoverify
