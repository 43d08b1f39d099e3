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

#include <filesystem>
#include <fstream>
#include <iterator>

#include <gtest/gtest.h>

#include "holoverify/baseline.hpp"
#include "holoverify/synthcam.hpp"

namespace holoverify {
namespace {

namespace fs = std::filesystem;

SynthSpec small_spec() {
  SynthSpec s;
  s.n_models = 2;
  s.n_identities = 5;
  s.frames_per_clip = 3;
  s.frame_size = {160, 112};
  s.image_format = "png";
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

const SynthClipPlan& find_plan(const std::vector<SynthClipPlan>& plans, AttackKind kind) {
  for (const auto& p : plans)
    if (p.record.attack_kind == kind) return p;
  throw Error("no plan of that kind");
}

TEST(Synthcam, PlansSeventyClipsForTwoModels) {
  const auto plans = plan_clips(small_spec(), 1);
  ASSERT_EQ(plans.size(), 70u);
  int originals = 0;
  for (const auto& p : plans) originals += p.record.label == Label::original;
  EXPECT_EQ(originals, 30);
  EXPECT_EQ(plans.front().record.clip_id, "fraud/copy_without_holo/id01/id01_01");
}

TEST(Synthcam, DatasetRoundTripsThroughScan) {
  const auto spec = small_spec();
  const auto root = fs::temp_directory_path() / "holoverify_synth_rt";
  fs::remove_all(root);
  generate_dataset(spec, root, 5);
  const auto plans = plan_clips(spec, 5);
  const auto clips = scan_dataset(root, DatasetKind::synthetic);
  ASSERT_EQ(clips.size(), plans.size());
  for (std::size_t i = 0; i < clips.size(); ++i) {
    const auto& want = plans[i].record;
    const auto& got = clips[i];
    EXPECT_EQ(got.clip_id, want.clip_id);
    EXPECT_EQ(got.document_model, want.document_model);
    EXPECT_EQ(got.identity, want.identity);
    EXPECT_EQ(got.label, want.label);
    EXPECT_EQ(got.attack_kind, want.attack_kind);
    EXPECT_DOUBLE_EQ(got.fps, want.fps);
    ASSERT_EQ(got.frames.size(), 3u);
    const ClipRenderer r(spec, plans[i]);
    for (int t = 0; t < 3; ++t)
      for (int k = 0; k < 4; ++k) {
        EXPECT_DOUBLE_EQ(got.frames[t].quad[k].x, r.quad(t)[k].x);
        EXPECT_DOUBLE_EQ(got.frames[t].quad[k].y, r.quad(t)[k].y);
      }
  }
  const auto rois = RoiConfig::load(root / "rois.json");
  EXPECT_EQ(rois.rects(), synth_roi_config(spec).rects());
  EXPECT_EQ(synth_spec_from_json(load_json_file(root / "synth_spec.json")).n_models, 2);
}

TEST(Synthcam, SameSeedWritesIdenticalTrees) {
  auto spec = small_spec();
  spec.n_models = 1;
  spec.n_identities = 2;
  spec.image_format = "jpg";
  const auto a = fs::temp_directory_path() / "holoverify_synth_a";
  const auto b = fs::temp_directory_path() / "holoverify_synth_b";
  fs::remove_all(a);
  fs::remove_all(b);
  generate_dataset(spec, a, 9);
  generate_dataset(spec, b, 9);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    const auto other = b / fs::relative(e.path(), a);
    ASSERT_TRUE(fs::exists(other)) << other;
    EXPECT_EQ(slurp(e.path()), slurp(other)) << e.path();
    ++files;
  }
  EXPECT_EQ(files, 2u + 14u * 4u);  // spec, rois, 14 clips x (3 frames + markup)
}

TEST(Synthcam, DynamicOverlayVariesStaticDoesNot) {
  const auto spec = small_spec();
  const auto plans = plan_clips(spec, 3);
  const auto overlay = layout_for_model(0).overlay;
  auto ratio = [&](const SynthClipPlan& plan) {
    const ClipRenderer r(spec, plan);
    std::vector<Image> frames;
    for (int t = 0; t < 6; ++t) frames.push_back(crop(r.render_canonical(t), overlay));
    return running_ratios(frames, 50, 0).back();
  };
  EXPECT_GT(ratio(find_plan(plans, AttackKind::none)), 0.05);
  EXPECT_GT(ratio(find_plan(plans, AttackKind::photo_replacement)), 0.0);
  EXPECT_EQ(ratio(find_plan(plans, AttackKind::pseudo_holo_copy)), 0.0);
  EXPECT_EQ(ratio(find_plan(plans, AttackKind::photo_holo_copy)), 0.0);
  EXPECT_EQ(ratio(find_plan(plans, AttackKind::copy_without_holo)), 0.0);
}

TEST(Synthcam, PhotoReplacementLeavesFaceWithoutOverlay) {
  const auto spec = small_spec();
  const auto plans = plan_clips(spec, 3);
  const auto& pr = find_plan(plans, AttackKind::photo_replacement);
  const ClipRenderer r(spec, pr);
  const auto l = layout_for_model(pr.model);
  // A face pixel inside the overlay never changes; an overlay pixel outside the face may.
  const int fx = l.overlay.x + 20, fy = l.overlay.y + l.overlay.height / 2;
  ASSERT_TRUE(l.face.contains(fx, fy));
  const auto f0 = r.render_canonical(0), f1 = r.render_canonical(3);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(f0.at(fx, fy, c), f1.at(fx, fy, c));
}

TEST(Synthcam, InvalidSpecsAndPathsFail) {
  auto spec = small_spec();
  spec.frames_per_clip = 1;
  EXPECT_THROW(plan_clips(spec, 1), Error);
  spec = small_spec();
  spec.n_models = 0;
  EXPECT_THROW(validate(spec), Error);
  const auto file = fs::temp_directory_path() / "holoverify_not_a_dir";
  std::ofstream(file) << "x";
  EXPECT_THROW(generate_dataset(small_spec(), file / "sub", 1), Error);
}

TEST(Synthcam, SpecJsonRoundTrip) {
  auto spec = small_spec();
  spec.glare = 0.25;
  spec.hue_speed = 0.3;
  const auto back = synth_spec_from_json(to_json(spec));
  EXPECT_EQ(to_json(back), to_json(spec));
}

TEST(Synthcam, LayoutNamesRoundTrip) {
  for (int m = 0; m < 20; ++m) EXPECT_EQ(layout_for_name(layout_for_model(m).name).overlay, layout_for_model(m).overlay);
  EXPECT_EQ(layout_for_name("psp02").name, "psp02");
  EXPECT_THROW(layout_for_name("foo01"), Error);
  EXPECT_THROW(layout_for_name("id"), Error);
  EXPECT_THROW(layout_for_name("id00"), Error);
}

}  // namespace
}  // namespace holoverify
