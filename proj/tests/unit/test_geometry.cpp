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

#include <gtest/gtest.h>

#include "holoverify/catalog.hpp"
#include "holoverify/geometry.hpp"
#include "holoverify/rng.hpp"

namespace holoverify {
namespace {

// Smooth colourful test pattern, so bilinear resampling errors stay small.
Image smooth_pattern(int w, int h) {
  Image img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      img.at(x, y, 0) = saturate_u8(128 + 100 * std::sin(x / 23.0));
      img.at(x, y, 1) = saturate_u8(128 + 100 * std::cos(y / 17.0));
      img.at(x, y, 2) = saturate_u8(128 + 80 * std::sin((x + y) / 31.0));
    }
  return img;
}

TEST(Homography, FitsFourPointsExactly) {
  const Quad from = rect_corners({100, 50});
  const Quad to{Point2{10, 12}, Point2{95, 3}, Point2{120, 70}, Point2{4, 66}};
  const auto h = Homography::from_points(from, to);
  for (int i = 0; i < 4; ++i) {
    const auto p = h.apply(from[i]);
    EXPECT_NEAR(p.x, to[i].x, 1e-9);
    EXPECT_NEAR(p.y, to[i].y, 1e-9);
  }
  const auto back = h.inverse().apply(h.apply({33.0, 21.0}));
  EXPECT_NEAR(back.x, 33.0, 1e-9);
  EXPECT_NEAR(back.y, 21.0, 1e-9);
}

TEST(Homography, CollinearPointsAreDegenerate) {
  const Quad line{Point2{0, 0}, Point2{1, 1}, Point2{2, 2}, Point2{3, 3}};
  EXPECT_THROW(Homography::from_points(rect_corners({10, 10}), line), Error);
}

TEST(Quad, OrdersClockwiseFromTopLeft) {
  const Quad shuffled{Point2{90, 60}, Point2{10, 5}, Point2{5, 55}, Point2{95, 8}};
  const auto q = order_clockwise_from_top_left(shuffled);
  EXPECT_DOUBLE_EQ(q[0].x, 10);
  EXPECT_DOUBLE_EQ(q[1].x, 95);
  EXPECT_DOUBLE_EQ(q[2].x, 90);
  EXPECT_DOUBLE_EQ(q[3].x, 5);
  EXPECT_TRUE(is_simple(q));
  EXPECT_FALSE(is_simple(Quad{q[0], q[2], q[1], q[3]}));
}

TEST(Rectify, IdentityQuadReproducesInput) {
  const Size canon{160, 100};
  const Image src = smooth_pattern(canon.width, canon.height);
  const Image out = rectify_frame(src, rect_corners(canon), canon);
  ASSERT_EQ(out.size(), canon);
  for (std::size_t i = 0; i < src.pixels().size(); ++i)
    ASSERT_LE(std::abs(int(out.pixels()[i]) - int(src.pixels()[i])), 1) << "at byte " << i;
}

TEST(Rectify, RotatedCornersGiveRotatedDocument) {
  // The document occupies a 100x100 square; listing its corners starting from the
  // top-right reads it rotated by 90 degrees.
  const Size canon{100, 100};
  const Image src = smooth_pattern(100, 100);
  const auto c = rect_corners(canon);
  const Quad rotated{c[1], c[2], c[3], c[0]};
  const Image out = rectify_frame(src, rotated, canon);
  int worst = 0;
  for (int y = 0; y < 100; ++y)
    for (int x = 0; x < 100; ++x)
      for (int ch = 0; ch < 3; ++ch)  // out(x, y) = src(99 - y, x)
        worst = std::max(worst, std::abs(int(out.at(x, y, ch)) - int(src.at(99 - y, x, ch))));
  EXPECT_LE(worst, 1);
}

TEST(Rectify, RecoversDocumentRenderedUnderKnownHomography) {
  const Size canon{300, 190};
  const Image doc = smooth_pattern(canon.width, canon.height);
  const Quad quad{Point2{60, 40}, Point2{380, 70}, Point2{350, 300}, Point2{45, 260}};
  // Forward render: frame pixel -> document coordinates.
  const auto frame_to_doc = Homography::from_points(quad, rect_corners(canon));
  const Image frame = warp_perspective(doc, frame_to_doc, {440, 340});
  const Image back = rectify_frame(frame, quad, canon);
  double err = 0.0;
  for (std::size_t i = 0; i < doc.pixels().size(); ++i) err += std::abs(int(back.pixels()[i]) - int(doc.pixels()[i]));
  EXPECT_LT(err / doc.pixels().size(), 3.0);
}

TEST(Rectify, RegionMatchesCropOfFullRectification) {
  const Image frame = smooth_pattern(320, 240);
  const Quad quad{Point2{20, 30}, Point2{300, 10}, Point2{290, 220}, Point2{35, 200}};
  const Size canon{224, 141};
  const Rect region{37, 21, 90, 77};
  EXPECT_EQ(rectify_region(frame, quad, canon, region), crop(rectify_frame(frame, quad, canon), region));
  EXPECT_THROW(rectify_region(frame, quad, canon, Rect{200, 0, 90, 10}), Error);
}

TEST(Rectify, RejectsDegenerateQuads) {
  const Image frame(50, 50);
  EXPECT_THROW(rectify_frame(frame, Quad{Point2{0, 0}, Point2{10, 0}, Point2{20, 0}, Point2{30, 0}}), Error);
  EXPECT_THROW(rectify_frame(frame, Quad{Point2{0, 0}, Point2{40, 40}, Point2{40, 0}, Point2{0, 40}}), Error);
}

TEST(Resize, ConstantImageStaysConstant) {
  Image img(37, 23, 91);
  const Image out = resize(img, {64, 64});
  for (auto v : out.pixels()) ASSERT_EQ(v, 91);
}

}  // namespace
}  // namespace holoverify
