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

// Calibration and test-set evaluation of a trained encoder for one run.

#pragma once

#include <string>
#include <vector>

#include "holoverify/decision.hpp"
#include "holoverify/encoder.hpp"
#include "holoverify/metrics.hpp"

namespace holoverify {

inline Polarity model_polarity(const EncoderModel& model) {
  return model.is_classifier() ? Polarity::high_is_attack : Polarity::low_is_attack;
}

inline std::string method_name(const EncoderModel& model) {
  return std::string(model.is_classifier() ? "CLS - " : "OUR - ") + std::string(to_string(model.architecture));
}

/// Threshold for `strategy` fitted on the validation clips.
inline CalibrationResult calibrate_model(const EncoderModel& model, const ValidationInputs& val, Strategy strategy,
                                         int min_buffer = kDefaultMinBuffer) {
  if (model.is_classifier() && strategy != Strategy::whole)
    throw Error("the classifier ablation supports the whole strategy only");
  return calibrate_threshold(clip_scores(model, val, strategy, min_buffer), model_polarity(model), strategy);
}

/// Verdicts of every test clip under a fitted calibration.
inline RunResult evaluate_model(const EncoderModel& model, const ValidationInputs& test, const CalibrationResult& cal,
                                DatasetTag tag, int run_id = 0, int min_buffer = kDefaultMinBuffer) {
  RunResult r;
  r.run_id = run_id;
  r.dataset_tag = tag;
  r.method = method_name(model);
  r.strategy = std::string(to_string(cal.strategy));
  for (std::size_t i = 0; i < test.frames.size(); ++i) {
    ClipOutcome o;
    o.clip_id = test.clip_ids[i];
    o.label = test.labels[i];
    if (model.is_classifier()) {
      o.score = mean_probability(model.attack_probabilities(test.frames[i]));
      o.verdict = cal.decide(o.score);
      o.stop_index = test.frames[i].empty() ? 0 : test.frames[i].size() - 1;
    } else if (cal.strategy == Strategy::whole) {
      const auto e = model.embed(test.frames[i]);
      o.score = video_score(e);
      o.verdict = cal.decide(o.score);
      o.stop_index = e.size() - 1;
    } else {
      const auto d = decide_cumulative(model.embed(test.frames[i]), cal, min_buffer);
      o.score = d.score;
      o.verdict = d.verdict;
      o.stop_index = d.stop_index;
    }
    r.clips.push_back(std::move(o));
  }
  return r;
}

}  // namespace holoverify
