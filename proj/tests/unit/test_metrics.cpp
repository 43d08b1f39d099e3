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

#include <gtest/gtest.h>

#include "holoverify/metrics.hpp"
#include "holoverify/report.hpp"
#include "holoverify/rng.hpp"

namespace holoverify {
namespace {

constexpr Label A = Label::attack;
constexpr Label O = Label::original;

// Pairwise AUC: P(score_attack > score_original) + 0.5 P(tie).
double auc_oracle(const std::vector<double>& s, const std::vector<Label>& l) {
  double wins = 0;
  int pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (l[i] == A && l[j] == O) {
        ++pairs;
        wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
      }
  return wins / pairs;
}

TEST(FScore, HandExamples) {
  const std::vector<Label> labels{A, A, O, O};
  const auto perfect = f_score(labels, labels);
  EXPECT_DOUBLE_EQ(perfect.precision, 1);
  EXPECT_DOUBLE_EQ(perfect.recall, 1);
  EXPECT_DOUBLE_EQ(perfect.fscore, 1);
  EXPECT_NEAR(f_score(std::vector<Label>{A, A, A, A}, labels).fscore, 2.0 / 3.0, 1e-12);
  const auto c = f_score(Confusion{3, 1, 1, 0});
  EXPECT_DOUBLE_EQ(c.precision, 0.75);
  EXPECT_DOUBLE_EQ(c.recall, 0.75);
  EXPECT_DOUBLE_EQ(c.fscore, 0.75);
  EXPECT_THROW(f_score(std::vector<Label>{A}, labels), Error);
}

TEST(FScore, NoPositivePredictionsIsZero) {
  const auto s = f_score(std::vector<Label>{O, O}, std::vector<Label>{A, O});
  EXPECT_DOUBLE_EQ(s.fscore, 0.0);
}

TEST(AttackRecall, Examples) {
  std::vector<Label> v(20, O);
  for (int i = 0; i < 17; ++i) v[i] = A;
  EXPECT_DOUBLE_EQ(attack_recall(v), 0.85);
  EXPECT_DOUBLE_EQ(attack_recall(std::vector<Label>(5, A)), 1.0);
  EXPECT_DOUBLE_EQ(attack_recall(std::vector<Label>(5, O)), 0.0);
}

TEST(RocAuc, ExtremesAndOracle) {
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{0.9, 0.8, 0.1, 0.2}, std::vector<Label>{A, A, O, O}), 1.0);
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, std::vector<Label>{A, O, A, O}), 0.5);
  Rng rng(64);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> s(50);
    std::vector<Label> l(50);
    for (int i = 0; i < 50; ++i) {
      s[i] = static_cast<double>(uniform_index(rng, 12)) / 4.0;  // plenty of ties
      l[i] = i % 3 ? A : O;
    }
    EXPECT_DOUBLE_EQ(roc_auc(s, l), auc_oracle(s, l));
  }
  EXPECT_THROW(roc_auc(std::vector<double>{1, 2}, std::vector<Label>{A, A}), Error);
}

TEST(Aggregate, MeanAndSampleStd) {
  auto run = [](int id, double f) {
    // Ten clips whose F-score is f: build from a confusion with fixed support.
    RunResult r;
    r.run_id = id;
    r.method = "m";
    r.strategy = "whole";
    const int tp = static_cast<int>(f * 100 + 0.5);
    for (int i = 0; i < 100; ++i) r.clips.push_back({"c", i < tp ? A : O, A, 0.0, 0});
    r.dataset_tag = DatasetTag::holo_photo_replacement;  // recall = tp / 100
    return r;
  };
  const std::vector<RunResult> runs{run(0, 0.88), run(1, 0.90), run(2, 0.92)};
  const auto agg = aggregate_runs(runs);
  const auto& m = agg.at({"m", "whole", DatasetTag::holo_photo_replacement});
  EXPECT_NEAR(m.mean, 0.90, 1e-12);
  EXPECT_NEAR(m.stddev, 0.02, 1e-12);
  EXPECT_EQ(percent_cell(m), "90 ± 2");

  const std::vector<RunResult> same{run(0, 0.5), run(1, 0.5)};
  EXPECT_DOUBLE_EQ(aggregate_runs(same).begin()->second.stddev, 0.0);
}

TEST(Dummy, ReferenceRows) {
  const auto v = dummy_metrics(DatasetTag::holo_vanilla);
  EXPECT_DOUBLE_EQ(v.random, 0.5);
  EXPECT_NEAR(v.always_attack, 2.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(v.always_original, 0.0);
  const auto r = dummy_metrics(DatasetTag::midv2020_clips);
  EXPECT_DOUBLE_EQ(r.random, 0.5);
  EXPECT_DOUBLE_EQ(r.always_attack, 1.0);
  EXPECT_DOUBLE_EQ(r.always_original, 0.0);
}

TEST(Report, ResultsTableCarriesDummyRows) {
  RunResult r;
  r.method = "OUR - mobilenetv3_small050";
  r.strategy = "whole";
  r.clips = {{"a", A, A, 0, 0}, {"b", O, O, 0, 0}};
  const std::vector<RunResult> runs{r};
  const auto t = results_report(runs);
  ASSERT_EQ(t.rows.size(), 4u);
  EXPECT_EQ(t.rows[0][1], r.method);
  EXPECT_EQ(t.rows[0][2], "100");
  EXPECT_EQ(t.rows[0][3], "");
  EXPECT_EQ(t.rows[1], (std::vector<std::string>{"Dummy", "Perfectly random", "50", "50", "50"}));
  EXPECT_EQ(t.rows[2], (std::vector<std::string>{"Dummy", "Always positive (attack)", "67", "100", "100"}));
  EXPECT_EQ(t.rows[3], (std::vector<std::string>{"Dummy", "Always negative (original)", "0", "0", "0"}));
  EXPECT_NE(to_text(t).find("Always positive"), std::string::npos);
  EXPECT_EQ(to_csv(t).substr(0, 16), "Decision,Method,");
}

TEST(Report, SweepTableHasNineCellsPerWindow) {
  SweepTable sweep;
  for (int t : {0, 10})
    for (double s : {30.0, 40.0, 50.0})
      for (double h : {0.01, 0.02, 0.03}) sweep.entries.push_back({s, h, t, 0.5 + s / 1000 + h, 0});
  const auto table = sweep_report(sweep);
  ASSERT_EQ(table.rows.size(), 2u);
  for (const auto& row : table.rows) EXPECT_EQ(row.size(), 10u);
  EXPECT_EQ(table.rows[0][0], "all");
  EXPECT_EQ(table.rows[1][9], "0.580");
}

TEST(Report, RunResultJsonRoundTrip) {
  RunResult r;
  r.run_id = 3;
  r.dataset_tag = DatasetTag::midv2020_clips;
  r.method = "x";
  r.strategy = "cumulative";
  r.clips = {{"c1", A, A, 0.25, 4}};
  const auto back = run_result_from_json(nlohmann::json::parse(to_json(r).dump()));
  EXPECT_EQ(back.run_id, 3);
  EXPECT_EQ(back.dataset_tag, r.dataset_tag);
  ASSERT_EQ(back.clips.size(), 1u);
  EXPECT_EQ(back.clips[0].stop_index, 4u);
  EXPECT_DOUBLE_EQ(back.clips[0].score, 0.25);
}

TEST(Report, AblationRowsFollowSettings) {
  const std::vector<AblationSetting> settings{{true, "triplet", "full", "resnet18"},
                                              {false, "triplet", "full", "resnet18"},
                                              {true, "triplet", "none", "resnet18"}};
  RunResult r;
  r.method = settings[1].method();
  r.strategy = "whole";
  r.clips = {{"a", A, A, 0, 0}, {"b", A, O, 0, 0}};
  const std::vector<RunResult> runs{r};
  const auto t = ablation_report(settings, runs);
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.rows[1][0], "Off");
  EXPECT_EQ(t.rows[1][4], "67");
  EXPECT_EQ(t.rows[2][1], "None (pretrained weights)");
  EXPECT_EQ(t.rows[0][4], "");
}

}  // namespace
}  // namespace holoverify
