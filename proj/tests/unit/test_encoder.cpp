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

#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "holoverify/encoder.hpp"
#include "holoverify/evaluate.hpp"
#include "holoverify/rng.hpp"
#include "tiny_dataset.hpp"

namespace holoverify {
namespace {

namespace fs = std::filesystem;

std::vector<double> vec(std::initializer_list<double> v) { return v; }

PlanarImage random_input(Rng& rng) {
  PlanarImage img(kNetworkInputSide, kNetworkInputSide);
  for (auto& v : img.values()) v = static_cast<float>(normal(rng));
  return img;
}

TEST(TripletLoss, HandExamples) {
  EXPECT_DOUBLE_EQ(triplet_loss(vec({0, 0}), vec({0, 0}), vec({2, 0}), 1.0), 0.0);
  EXPECT_DOUBLE_EQ(triplet_loss(vec({1, 2}), vec({1, 2}), vec({1, 2}), 1.0), 1.0);
  EXPECT_DOUBLE_EQ(triplet_loss(vec({0, 0}), vec({3, 0}), vec({1, 0}), 1.0), 3.0);
  EXPECT_THROW(triplet_loss(vec({0}), vec({0, 0}), vec({0, 0})), Error);
}

TEST(TripletLoss, TensorBatchIsMeanOfRows) {
  Rng rng(4);
  const int b = 6, d = 5;
  auto a = torch::randn({b, d}, torch::kDouble), p = torch::randn({b, d}, torch::kDouble),
       n = torch::randn({b, d}, torch::kDouble);
  double sum = 0.0;
  for (int i = 0; i < b; ++i) {
    auto row = [&](const torch::Tensor& t) {
      std::vector<double> v(d);
      for (int k = 0; k < d; ++k) v[k] = t[i][k].item<double>();
      return v;
    };
    sum += triplet_loss(row(a), row(p), row(n), 0.7);
  }
  EXPECT_NEAR(triplet_loss(a, p, n, 0.7).item<double>(), sum / b, 1e-12);
}

TEST(TripletLoss, GradientMatchesFiniteDifferences) {
  Rng rng(17);
  int checked = 0;
  while (checked < 10) {
    std::vector<double> x[3];
    for (auto& v : x) {
      v.resize(4);
      for (auto& e : v) e = normal(rng);
    }
    const double margin = 1.0;
    double dap = 0, dan = 0;
    for (int i = 0; i < 4; ++i) {
      dap += (x[0][i] - x[1][i]) * (x[0][i] - x[1][i]);
      dan += (x[0][i] - x[2][i]) * (x[0][i] - x[2][i]);
    }
    if (std::abs(std::sqrt(dap) - std::sqrt(dan) + margin) < 1e-2) continue;
    TripletLossGrad g;
    triplet_loss(x[0], x[1], x[2], margin, &g);
    const std::vector<double>* grads[3] = {&g.da, &g.dp, &g.dn};
    const double h = 1e-6;
    for (int which = 0; which < 3; ++which)
      for (int i = 0; i < 4; ++i) {
        auto up = x[which], down = x[which];
        up[i] += h;
        down[i] -= h;
        auto eval = [&](const std::vector<double>& v) {
          auto args = std::array{x[0], x[1], x[2]};
          args[which] = v;
          return triplet_loss(args[0], args[1], args[2], margin);
        };
        const double fd = (eval(up) - eval(down)) / (2 * h);
        EXPECT_NEAR((*grads[which])[i], fd, 1e-4 * std::max(1.0, std::abs(fd)));
      }
    ++checked;
  }
}

TEST(EncoderModel, EmbeddingWidthFollowsArchitecture) {
  Rng rng(2);
  const auto input = random_input(rng);
  const std::pair<Architecture, std::int64_t> cases[] = {
      {Architecture::mobilenetv3_small050, 288}, {Architecture::resnet18, 512}, {Architecture::mobilevit_xxs, 320}};
  for (const auto& [arch, dim] : cases) {
    const auto m = EncoderModel::create(arch, 1);
    const auto e = m.embed_frame(input);
    EXPECT_EQ(static_cast<std::int64_t>(e.size()), dim) << to_string(arch);
    for (float v : e) ASSERT_TRUE(std::isfinite(v));
  }
}

TEST(EncoderModel, EvalEmbeddingIsDeterministic) {
  Rng rng(3);
  const auto input = random_input(rng);
  const auto m = EncoderModel::create(Architecture::mobilenetv3_small050, 5);
  EXPECT_EQ(m.embed_frame(input), m.embed_frame(input));
  const auto twin = EncoderModel::create(Architecture::mobilenetv3_small050, 5);
  EXPECT_EQ(twin.embed_frame(input), m.embed_frame(input));
}

TEST(EncoderModel, RejectsWrongInputShape) {
  const auto m = EncoderModel::create(Architecture::mobilenetv3_small050, 5);
  EXPECT_THROW(m.embed_frame(PlanarImage(100, 100)), Error);
  EXPECT_THROW(m.forward(torch::zeros({1, 1, 224, 224})), Error);
}

TEST(Checkpoint, RoundTripIsBitwise) {
  Rng rng(6);
  const auto input = random_input(rng);
  auto m = EncoderModel::create(Architecture::mobilenetv3_small050, 9, true);
  m.config_hash = "abc123";
  const auto path = fs::temp_directory_path() / "holoverify_ckpt_rt.ckpt";
  save_checkpoint(m, path, {{"seed", 9}});
  nlohmann::json meta;
  const auto back = load_checkpoint(path, &meta);
  EXPECT_EQ(back.embed_frame(input), m.embed_frame(input));
  const std::vector<PlanarImage> one{input};
  EXPECT_EQ(back.attack_probabilities(one), m.attack_probabilities(one));
  EXPECT_EQ(meta["config_hash"], "abc123");
  EXPECT_EQ(meta["seed"], 9);
  EXPECT_EQ(meta["embedding_dim"], 288);
  EXPECT_EQ(meta["architecture"], "mobilenetv3_small050");
}

TEST(Checkpoint, MissingAndForeignFilesFail) {
  const auto missing = fs::temp_directory_path() / "holoverify_no_such.ckpt";
  fs::remove(missing);
  try {
    load_checkpoint(missing);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(missing.string()), std::string::npos);
  }
  const auto junk = fs::temp_directory_path() / "holoverify_junk.ckpt";
  std::ofstream(junk) << "hello\n";
  EXPECT_THROW(load_checkpoint(junk), Error);
}

TEST(TrainConfig, JsonRoundTripAndValidation) {
  TrainConfig c;
  c.max_epochs = 3;
  c.train_data = TrainData::originals_only;
  c.aug.enabled = false;
  EXPECT_EQ(to_json(train_config_from_json(to_json(c))), to_json(c));
  EXPECT_THROW(train_config_from_json({{"margin", -1.0}}), Error);
  EXPECT_THROW(train_config_from_json({{"max_epochs", 0}}), Error);
  EXPECT_THROW(train_config_from_json({{"mode", "bogus"}}), Error);
}

TEST(ValidationCriterion, CollapsedEmbeddingsGiveMinusMargin) {
  auto m = EncoderModel::create(Architecture::mobilenetv3_small050, 1);
  {
    torch::NoGradGuard no_grad;
    for (auto& [name, t] : m.state())
      if (t.is_floating_point()) t.zero_();
  }
  const auto clips = testing::tiny_prepared(1, 3);
  EXPECT_DOUBLE_EQ(validation_criterion(m, clips, Selection::originals_loss), -1.0);
}

TEST(ValidationCriterion, FscoreNeedsBothLabels) {
  const auto m = EncoderModel::create(Architecture::mobilenetv3_small050, 1);
  auto clips = testing::tiny_prepared(1, 3);
  std::erase_if(clips, [](const PreparedClip& c) { return c.record.label == Label::attack; });
  EXPECT_THROW(validation_criterion(m, clips, Selection::fscore), Error);
}

TEST(Train, SameSeedReproducesHistoryAndWeights) {
  const auto clips = testing::tiny_prepared(2, 3);
  TrainConfig cfg;
  cfg.max_epochs = 2;
  cfg.batch_size = 4;
  cfg.seed = 5;
  const auto a = train(clips, clips, cfg);
  const auto b = train(clips, clips, cfg);
  ASSERT_EQ(a.history.size(), 2u);
  EXPECT_EQ(a.selected_epoch, b.selected_epoch);
  EXPECT_EQ(a.selection, Selection::fscore);
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    EXPECT_EQ(a.history[i].train_loss, b.history[i].train_loss);
    EXPECT_EQ(a.history[i].criterion, b.history[i].criterion);
  }
  const auto in = clip_inputs(clips.front(), cfg.aug);
  EXPECT_EQ(a.model.embed(in), b.model.embed(in));
  // Two originals and four attack sources per identity.
  EXPECT_EQ(a.history[0].original_triplets, 2u);
  EXPECT_EQ(a.history[0].attack_triplets, 6u);
}

TEST(Train, OriginalsOnlyNeverBuildsAttackTriplets) {
  const auto clips = testing::tiny_prepared(2, 3);
  TrainConfig cfg;
  cfg.max_epochs = 1;
  cfg.batch_size = 4;
  cfg.train_data = TrainData::originals_only;
  const auto r = train(clips, clips, cfg);
  EXPECT_EQ(r.selection, Selection::originals_loss);
  EXPECT_EQ(r.history[0].attack_triplets, 0u);
  EXPECT_EQ(r.history[0].original_triplets, 2u);
}

TEST(TrainClassifier, RejectsSingleClassAndOutputsProbabilities) {
  auto clips = testing::tiny_prepared(2, 3);
  TrainConfig cfg;
  cfg.max_epochs = 1;
  cfg.batch_size = 8;
  std::vector<PreparedClip> originals;
  for (const auto& c : clips)
    if (c.record.label == Label::original) originals.push_back(c);
  EXPECT_THROW(train_classifier(originals, clips, cfg), Error);
  const auto r = train_classifier(clips, clips, cfg);
  ASSERT_TRUE(r.model.is_classifier());
  for (const auto& c : clips)
    for (double p : r.model.attack_probabilities(clip_inputs(c, cfg.aug))) {
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
    }
  EXPECT_THROW(EncoderModel::create(Architecture::mobilenetv3_small050, 1).attack_probabilities(
                   clip_inputs(clips[0], cfg.aug)),
               Error);
}

TEST(Evaluate, VerdictsFollowCalibration) {
  const auto clips = testing::tiny_prepared(2, 6);
  const AugConfig aug;
  const auto m = EncoderModel::create(Architecture::mobilenetv3_small050, 3);
  const auto v = ValidationInputs::build(clips, aug);
  const auto whole = calibrate_model(m, v, Strategy::whole);
  const auto r = evaluate_model(m, v, whole, DatasetTag::holo_vanilla, 2);
  EXPECT_EQ(r.method, "OUR - mobilenetv3_small050");
  EXPECT_EQ(r.strategy, "whole");
  ASSERT_EQ(r.clips.size(), clips.size());
  std::vector<Label> verdicts, labels;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    EXPECT_EQ(r.clips[i].score, video_score(m.embed(v.frames[i])));
    EXPECT_EQ(r.clips[i].verdict, whole.decide(r.clips[i].score));
    verdicts.push_back(r.clips[i].verdict);
    labels.push_back(r.clips[i].label);
  }
  // Evaluating on the calibration set reproduces the calibrated F-score.
  EXPECT_DOUBLE_EQ(f_score(verdicts, labels).fscore, whole.validation_fscore);
  const auto cum = evaluate_model(m, v, calibrate_model(m, v, Strategy::cumulative), DatasetTag::holo_vanilla);
  for (const auto& o : cum.clips)
    if (o.verdict == Label::original) EXPECT_GE(o.stop_index, 4u);
  const auto cls = EncoderModel::create(Architecture::mobilenetv3_small050, 3, true);
  EXPECT_THROW(calibrate_model(cls, v, Strategy::cumulative), Error);
  EXPECT_EQ(method_name(cls), "CLS - mobilenetv3_small050");
}

}  // namespace
}  // namespace holoverify
