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

// Clip-level decision from per-frame embeddings.
//
// A clip's score is the mean cosine distance (1 - cos) over all unordered frame pairs.
// Genuine holograms change appearance as the document moves, so originals score high;
// a score below the calibrated threshold raises an attack alert.

#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "holoverify/metrics.hpp"

namespace holoverify {

using Embedding = std::vector<float>;

struct EmbeddingSequence {
  std::string clip_id;
  std::vector<Embedding> vectors;
};

inline double norm(std::span<const float> v) {
  double s = 0.0;
  for (float x : v) s += static_cast<double>(x) * x;
  return std::sqrt(s);
}

inline double cosine_distance(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw Error("embedding length mismatch");
  double dot = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    saa += static_cast<double>(a[i]) * a[i];
    sbb += static_cast<double>(b[i]) * b[i];
  }
  if (!(saa > 0.0) || !(sbb > 0.0) || !std::isfinite(saa) || !std::isfinite(sbb))
    throw Error("degenerate embedding");
  // sqrt(|a|^2 |b|^2) keeps identical vectors exactly 0 apart.
  return 1.0 - dot / std::sqrt(saa * sbb);
}

/// Incremental mean pairwise cosine distance. Adding frame j accumulates its distance to
/// every earlier frame, so the running score equals video_score of the prefix.
class PairwiseScorer {
 public:
  void push(std::span<const float> v) {
    if (!std::isfinite(norm(v)) || norm(v) == 0.0) throw Error("degenerate embedding");
    for (const auto& prev : seen_) sum_ += cosine_distance(prev, v);
    pairs_ += seen_.size();
    seen_.emplace_back(v.begin(), v.end());
  }

  [[nodiscard]] double score() const { return pairs_ == 0 ? 0.0 : sum_ / static_cast<double>(pairs_); }
  [[nodiscard]] std::size_t count() const { return seen_.size(); }

 private:
  std::vector<Embedding> seen_;
  double sum_ = 0.0;
  std::size_t pairs_ = 0;
};

/// Mean over i < j of 1 - cos(v_i, v_j); 0 for a single frame. Range [0, 2].
inline double video_score(std::span<const Embedding> vectors) {
  if (vectors.empty()) throw Error("empty embedding sequence");
  PairwiseScorer s;
  for (const auto& v : vectors) s.push(v);
  return s.score();
}

inline double video_score(const EmbeddingSequence& seq) { return video_score(seq.vectors); }

// ---------------------------------------------------------------------------
// Calibration

enum class Strategy { whole, cumulative };

inline std::string_view to_string(Strategy s) { return s == Strategy::whole ? "whole" : "cumulative"; }

inline Strategy parse_strategy(std::string_view s) {
  if (s == "whole") return Strategy::whole;
  if (s == "cumulative") return Strategy::cumulative;
  throw Error("unknown strategy: " + std::string(s));
}

/// low_is_attack: attack iff score < threshold (embedding scores, flagged ratios).
/// high_is_attack: attack iff score >= threshold (classifier attack probabilities).
enum class Polarity { low_is_attack, high_is_attack };

struct LabeledScore {
  double score = 0.0;
  Label label = Label::attack;
};

struct CalibrationResult {
  double threshold = 0.0;
  double validation_fscore = 0.0;
  Strategy strategy = Strategy::whole;
  Polarity polarity = Polarity::low_is_attack;
  std::vector<LabeledScore> validation_scores;

  [[nodiscard]] Label decide(double score) const {
    const bool attack = polarity == Polarity::low_is_attack ? score < threshold : score >= threshold;
    return attack ? Label::attack : Label::original;
  }
};

/// Sweeps thresholds at the midpoints between consecutive distinct scores plus the two
/// infinite sentinels and keeps the best F-score (attack positive). Ties go to the smallest
/// threshold.
inline CalibrationResult calibrate_threshold(std::span<const LabeledScore> val,
                                             Polarity polarity = Polarity::low_is_attack,
                                             Strategy strategy = Strategy::whole) {
  bool has_att = false, has_orig = false;
  std::vector<double> distinct;
  for (const auto& v : val) {
    (v.label == Label::attack ? has_att : has_orig) = true;
    if (!std::isfinite(v.score)) throw Error("non-finite validation score");
    distinct.push_back(v.score);
  }
  if (!has_att || !has_orig) throw Error("calibration needs both original and attack samples");
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> candidates{-inf};
  for (std::size_t i = 0; i + 1 < distinct.size(); ++i)
    candidates.push_back(0.5 * (distinct[i] + distinct[i + 1]));
  candidates.push_back(inf);

  CalibrationResult best;
  best.strategy = strategy;
  best.polarity = polarity;
  best.validation_fscore = -1.0;
  for (double t : candidates) {
    CalibrationResult probe{t, 0.0, strategy, polarity, {}};
    Confusion c;
    for (const auto& v : val) {
      const bool pred = probe.decide(v.score) == Label::attack;
      const bool truth = v.label == Label::attack;
      if (pred && truth) ++c.tp;
      else if (pred) ++c.fp;
      else if (truth) ++c.fn;
      else ++c.tn;
    }
    const double f = f_score(c).fscore;
    if (f > best.validation_fscore) {
      best.threshold = t;
      best.validation_fscore = f;
    }
  }
  best.validation_scores.assign(val.begin(), val.end());
  return best;
}

// ---------------------------------------------------------------------------
// Decisions

inline Label decide_whole(std::span<const Embedding> seq, const CalibrationResult& cal) {
  return cal.decide(video_score(seq));
}

struct CumulativeDecision {
  Label verdict = Label::attack;
  std::size_t stop_index = 0;
  double score = 0.0;  // score at the stopping frame
};

inline constexpr int kDefaultMinBuffer = 5;

/// Streams the embeddings, evaluating the running score from frame min_buffer - 1 on, and
/// accepts the clip as original the first time the score reaches the threshold. Clips
/// shorter than the buffer are decided once on all of their frames.
inline CumulativeDecision decide_cumulative(std::span<const Embedding> stream,
                                            const CalibrationResult& cal,
                                            int min_buffer = kDefaultMinBuffer) {
  if (stream.empty()) throw Error("empty embedding stream");
  PairwiseScorer scorer;
  const auto first_eval = static_cast<std::size_t>(std::max(min_buffer, 1) - 1);
  for (std::size_t i = 0; i < stream.size(); ++i) {
    scorer.push(stream[i]);
    if (i < first_eval) continue;
    if (cal.decide(scorer.score()) == Label::original) return {Label::original, i, scorer.score()};
  }
  const std::size_t last = stream.size() - 1;
  if (last < first_eval) return {cal.decide(scorer.score()), last, scorer.score()};
  return {Label::attack, last, scorer.score()};
}

/// Largest running score the cumulative strategy evaluates. Thresholding it with the
/// low-is-attack rule reproduces decide_cumulative, which is what calibration sweeps over.
inline double cumulative_score(std::span<const Embedding> stream, int min_buffer = kDefaultMinBuffer) {
  if (stream.empty()) throw Error("empty embedding stream");
  PairwiseScorer scorer;
  const auto first_eval = static_cast<std::size_t>(std::max(min_buffer, 1) - 1);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < stream.size(); ++i) {
    scorer.push(stream[i]);
    if (i >= first_eval) best = std::max(best, scorer.score());
  }
  return stream.size() - 1 < first_eval ? scorer.score() : best;
}

/// Frame-classifier ablation: attack iff the mean per-frame attack probability >= tau.
inline Label classifier_decide(std::span<const double> frame_probs, double tau) {
  if (frame_probs.empty()) throw Error("classifier_decide on an empty clip");
  double sum = 0.0;
  for (double p : frame_probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error("frame probability outside [0, 1]");
    sum += p;
  }
  return sum / static_cast<double>(frame_probs.size()) >= tau ? Label::attack : Label::original;
}

inline double mean_probability(std::span<const double> frame_probs) {
  if (frame_probs.empty()) throw Error("empty probability list");
  double sum = 0.0;
  for (double p : frame_probs) sum += p;
  return sum / static_cast<double>(frame_probs.size());
}

// ---------------------------------------------------------------------------
// Serialization. Infinite thresholds are written as the strings "inf" / "-inf".

inline nlohmann::json threshold_to_json(double t) {
  if (std::isinf(t)) return t > 0 ? "inf" : "-inf";
  return t;
}

inline double threshold_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw Error("bad threshold value: " + s);
  }
  return j.get<double>();
}

inline nlohmann::json to_json(const CalibrationResult& c) {
  nlohmann::json j;
  j["threshold"] = threshold_to_json(c.threshold);
  j["validation_fscore"] = c.validation_fscore;
  j["strategy"] = to_string(c.strategy);
  j["polarity"] = c.polarity == Polarity::low_is_attack ? "score < threshold => attack"
                                                        : "score >= threshold => attack";
  auto& scores = j["validation_scores"] = nlohmann::json::array();
  for (const auto& s : c.validation_scores) scores.push_back({s.score, to_string(s.label)});
  return j;
}

inline CalibrationResult calibration_from_json(const nlohmann::json& j) {
  CalibrationResult c;
  c.threshold = threshold_from_json(j.at("threshold"));
  c.validation_fscore = j.at("validation_fscore").get<double>();
  c.strategy = parse_strategy(j.at("strategy").get<std::string>());
  c.polarity = j.at("polarity").get<std::string>().rfind("score <", 0) == 0 ? Polarity::low_is_attack
                                                                            : Polarity::high_is_attack;
  for (const auto& s : j.value("validation_scores", nlohmann::json::array()))
    c.validation_scores.push_back({s.at(0).get<double>(), parse_label(s.at(1).get<std::string>())});
  return c;
}

}  // namespace holoverify
