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
#include <map>

#include <gtest/gtest.h>

#include "holoverify/augment.hpp"
#include "holoverify/triplets.hpp"

namespace holoverify {
namespace {

// Frame f of the clip is a small raster whose pixels encode (clip_tag, f).
PreparedClip make_clip(const std::string& id, Label label, AttackKind kind, int frames, int tag = 0,
                       std::string identity = "01", int side = 8) {
  PreparedClip c;
  c.record.clip_id = id;
  c.record.document_model = "id01";
  c.record.identity = std::move(identity);
  c.record.label = label;
  c.record.attack_kind = kind;
  for (int f = 0; f < frames; ++f) {
    Image img(side, side);
    for (int y = 0; y < side; ++y)
      for (int x = 0; x < side; ++x) {
        img.at(x, y, 0) = static_cast<std::uint8_t>(10 * f);
        img.at(x, y, 1) = static_cast<std::uint8_t>(tag);
        img.at(x, y, 2) = static_cast<std::uint8_t>(8 * x + y);
      }
    c.rois.push_back(img);
  }
  return c;
}

PreparedClip original(const std::string& id, int frames, int tag = 0) {
  return make_clip(id, Label::original, AttackKind::none, frames, tag);
}

PreparedClip attack(const std::string& id, int frames, int tag, AttackKind kind = AttackKind::pseudo_holo_copy,
                    std::string identity = "01") {
  return make_clip(id, Label::attack, kind, frames, tag, std::move(identity));
}

TEST(OriginalTriplet, UsesFrameTwiceThenNext) {
  const auto clip = original("o", 3);
  const auto t = sample_original_triplet(clip, 0);
  EXPECT_EQ(t.anchor, clip.rois[0]);
  EXPECT_EQ(t.positive, clip.rois[0]);
  EXPECT_EQ(t.negative, clip.rois[1]);
  EXPECT_EQ(t.provenance.negative.frame, 1);
  EXPECT_THROW(sample_original_triplet(clip, 2), Error);
  EXPECT_THROW(sample_original_triplet(original("short", 1), 0), Error);
  EXPECT_THROW(sample_original_triplet(attack("a", 3, 1), 0), Error);
}

TEST(OriginalTriplet, AnchorIndexIsUniform) {
  const auto clip = original("o", 20);
  Rng rng(123);
  constexpr int kDraws = 10000;
  std::map<int, int> hits;
  for (int i = 0; i < kDraws; ++i) ++hits[sample_original_triplet(clip, rng).provenance.anchor.frame];
  ASSERT_EQ(hits.size(), 19u);
  const double p = 1.0 / 19, bound = 3.0 * std::sqrt(kDraws * p * (1 - p));
  for (const auto& [t, n] : hits) {
    EXPECT_GE(t, 0);
    EXPECT_LE(t, 18);
    EXPECT_NEAR(n, kDraws * p, bound) << "t=" << t;
  }
}

TEST(AttackTriplet, AnchorAndPositiveShareAClip) {
  const auto a = attack("A", 10, 1), b = attack("B", 8, 2);
  const std::vector<const PreparedClip*> group{&a, &b};
  Rng rng(5);
  bool saw_equal_frames = false;
  for (int i = 0; i < 500; ++i) {
    const auto t = sample_attack_triplet(group, rng);
    EXPECT_EQ(t.source_label, Label::attack);
    EXPECT_EQ(t.provenance.anchor.clip_id, t.provenance.positive.clip_id);
    EXPECT_NE(t.provenance.anchor.clip_id, t.provenance.negative.clip_id);
    saw_equal_frames |= t.provenance.anchor.frame == t.provenance.positive.frame;
  }
  EXPECT_TRUE(saw_equal_frames);
}

TEST(AttackTriplet, NegativeClipIsUniformOverOthers) {
  const auto a = attack("A", 4, 1), b = attack("B", 4, 2), c = attack("C", 4, 3), d = attack("D", 4, 4);
  const std::vector<const PreparedClip*> group{&a, &b, &c, &d};
  Rng rng(77);
  constexpr int kDraws = 10000;
  std::map<std::string, int> hits;
  for (int i = 0; i < kDraws; ++i) ++hits[sample_attack_triplet(group, 0, rng).provenance.negative.clip_id];
  ASSERT_EQ(hits.size(), 3u);
  EXPECT_FALSE(hits.count("A"));
  const double p = 1.0 / 3, bound = 3.0 * std::sqrt(kDraws * p * (1 - p));
  for (const auto& [id, n] : hits) EXPECT_NEAR(n, kDraws * p, bound) << id;
}

TEST(AttackTriplet, RejectsBadGroups) {
  const auto a = attack("A", 4, 1), other = attack("X", 4, 2, AttackKind::pseudo_holo_copy, "02");
  const auto pr = attack("P", 4, 3, AttackKind::photo_replacement);
  Rng rng(1);
  EXPECT_THROW(sample_attack_triplet(std::vector<const PreparedClip*>{&a}, rng), Error);
  EXPECT_THROW(sample_attack_triplet(std::vector<const PreparedClip*>{&a, &other}, rng), Error);
  EXPECT_THROW(sample_attack_triplet(std::vector<const PreparedClip*>{&a, &pr}, rng), Error);
}

TEST(AugmentTriplet, DisabledKeepsAnchorAndPositiveIdentical) {
  const auto clip = make_clip("o", Label::original, AttackKind::none, 5, 0, "01", 64);
  AugConfig cfg;
  cfg.enabled = false;
  Rng rng(9);
  for (int t = 0; t < 4; ++t) {
    const auto aug = augment_triplet(sample_original_triplet(clip, t), cfg, rng);
    EXPECT_EQ(aug.anchor, aug.positive);
    EXPECT_NE(aug.anchor, aug.negative);
  }
}

TEST(AugmentTriplet, GeometricTransformIsShared) {
  // Asymmetric gradient pattern: every geometric transform yields a distinct image.
  auto pattern = [](int tag) {
    Image img(64, 64);
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x) {
        img.at(x, y, 0) = static_cast<std::uint8_t>(4 * x);
        img.at(x, y, 1) = static_cast<std::uint8_t>(2 * y + x / 8);
        img.at(x, y, 2) = static_cast<std::uint8_t>(tag);
      }
    return img;
  };
  RawTriplet raw{pattern(10), pattern(20), pattern(30), Label::original, {}};
  AugConfig cfg;
  cfg.geometric_p = 1.0;
  cfg.crop_p = 0.0;
  cfg.blur_p = 0.0;
  cfg.jitter_p = 0.0;
  auto expected = [&](const Image& img, GeoTransform g) {
    const int side = static_cast<int>(std::lround(cfg.crop_ratio * 64));
    auto p = crop_resize(to_planar(apply_geometric(img, g)), (64 - side) / 2, (64 - side) / 2, side, side,
                         {cfg.output_size, cfg.output_size});
    normalize(p, cfg);
    return p;
  };
  const GeoTransform all[] = {GeoTransform::rot90, GeoTransform::rot180, GeoTransform::rot270, GeoTransform::flip_h,
                              GeoTransform::flip_v};
  Rng rng(4);
  std::set<int> seen;
  for (int trial = 0; trial < 30; ++trial) {
    const auto out = augment_triplet(raw, cfg, rng);
    int matched = -1;
    for (int g = 0; g < 5; ++g)
      if (out.anchor == expected(raw.anchor, all[g])) matched = g;
    ASSERT_GE(matched, 0);
    seen.insert(matched);
    EXPECT_EQ(out.positive, expected(raw.positive, all[matched]));
    EXPECT_EQ(out.negative, expected(raw.negative, all[matched]));
  }
  EXPECT_GE(seen.size(), 3u);
}

TEST(AugmentTriplet, ConstantImageNormalizesByHand) {
  const Image grey(256, 256, 153);
  AugConfig cfg;
  Rng rng(2);
  for (const auto& out : {eval_transform(grey, cfg), augment_image(grey, [] {
                            AugConfig c;
                            c.blur_p = 1.0;
                            c.jitter_p = 0.0;
                            return c;
                          }(), rng)}) {
    ASSERT_EQ(out.width(), 224);
    ASSERT_EQ(out.height(), 224);
    for (int c = 0; c < 3; ++c) {
      const double want = (153.0 / 255.0 - cfg.mean[c]) / cfg.stddev[c];
      EXPECT_NEAR(out.at(c, 0, 0), want, 1e-5);
      EXPECT_NEAR(out.at(c, 111, 200), want, 1e-5);
    }
  }
}

TEST(AugmentTriplet, BlurKernelsAreOddAndInsideBounds) {
  AugConfig cfg;
  EXPECT_EQ(blur_kernel_sizes(cfg), (std::vector<int>{5, 7, 9}));
  const auto k = gaussian_kernel(7, 2.0);
  double sum = 0;
  for (double v : k) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(k[0], k[6]);
}

TEST(Epoch, SixtyFourSourcesInBatchesOfThirtyTwo) {
  std::vector<PreparedClip> train;
  for (int i = 0; i < 64; ++i) train.push_back(original("o" + std::to_string(i), 2, i));
  const auto epoch = build_epoch(train, AugConfig{}, 32, 1);
  EXPECT_EQ(epoch.num_sources(), 64u);
  EXPECT_EQ(epoch.num_batches(), 2u);
}

TEST(Epoch, OriginalsOnlySetNeverYieldsAttackTriplets) {
  std::vector<PreparedClip> train;
  for (int i = 0; i < 5; ++i) train.push_back(original("o" + std::to_string(i), 4, i));
  AugConfig cfg;
  cfg.enabled = false;
  auto epoch = build_epoch(train, cfg, 2, 3);
  std::size_t n = 0;
  while (auto batch = epoch.next())
    for (const auto& t : *batch) {
      EXPECT_EQ(t.source_label, Label::original);
      ++n;
    }
  EXPECT_EQ(n, 5u);
}

TEST(Epoch, EligibilityRules) {
  std::vector<PreparedClip> train{original("o-long", 3), original("o-short", 1),
                                  attack("a1", 3, 1), attack("a2", 3, 2),
                                  attack("lonely", 3, 3, AttackKind::pseudo_holo_copy, "02"),
                                  attack("pr", 3, 4, AttackKind::photo_replacement)};
  const auto sources = triplet_sources(train);
  ASSERT_EQ(sources.size(), 3u);
  EXPECT_EQ(train[sources[0].clip].record.clip_id, "o-long");
  EXPECT_EQ(sources[1].kind, Label::attack);
  EXPECT_EQ(sources[1].group.size(), 2u);
}

TEST(Epoch, SameSeedReplaysIdenticalBatches) {
  std::vector<PreparedClip> train{original("o1", 4, 1), original("o2", 5, 2), attack("a1", 3, 3),
                                  attack("a2", 3, 4), attack("a3", 2, 5)};
  auto run = [&](std::uint64_t seed) {
    auto epoch = build_epoch(train, AugConfig{}, 2, seed);
    std::vector<Triplet> all;
    while (auto b = epoch.next()) all.insert(all.end(), b->begin(), b->end());
    return all;
  };
  const auto a = run(17), b = run(17), c = run(18);
  ASSERT_EQ(a.size(), 5u);
  ASSERT_EQ(b.size(), a.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].anchor, b[i].anchor);
    EXPECT_EQ(a[i].positive, b[i].positive);
    EXPECT_EQ(a[i].negative, b[i].negative);
    EXPECT_EQ(a[i].provenance.anchor, b[i].provenance.anchor);
    differs |= !(a[i].anchor == c[i].anchor);
  }
  EXPECT_TRUE(differs);
}

}  // namespace
}  // namespace holoverify
