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

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "holoverify/image.hpp"

namespace holoverify {

// Coordinates are continuous pixel coordinates: pixel (i, j) covers [i, i+1) x [j, j+1),
// so its centre is at (i + 0.5, j + 0.5) and an image of size W x H spans [0, W] x [0, H].

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Four document corners. Convention: clockwise starting at the document's top-left.
using Quad = std::array<Point2, 4>;

inline Quad rect_corners(Size s) {
  const double w = s.width;
  const double h = s.height;
  return {Point2{0, 0}, Point2{w, 0}, Point2{w, h}, Point2{0, h}};
}

/// Signed shoelace area; positive for clockwise order in image (y-down) coordinates.
inline double signed_area(const Quad& q) {
  double a = 0.0;
  for (int i = 0; i < 4; ++i) {
    const auto& p = q[i];
    const auto& n = q[(i + 1) % 4];
    a += p.x * n.y - n.x * p.y;
  }
  return 0.5 * a;
}

namespace detail {

inline double cross(Point2 o, Point2 a, Point2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline bool segments_cross(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double d1 = cross(c, d, a);
  const double d2 = cross(c, d, b);
  const double d3 = cross(a, b, c);
  const double d4 = cross(a, b, d);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace detail

/// A quadrilateral is simple when its two pairs of opposite edges do not cross.
inline bool is_simple(const Quad& q) {
  return !detail::segments_cross(q[0], q[1], q[2], q[3]) &&
         !detail::segments_cross(q[1], q[2], q[3], q[0]);
}

/// Reorders arbitrary annotation vertices clockwise (y-down) starting from the top-left one.
inline Quad order_clockwise_from_top_left(Quad q) {
  Point2 c{};
  for (const auto& p : q) {
    c.x += p.x / 4;
    c.y += p.y / 4;
  }
  std::sort(q.begin(), q.end(), [&](Point2 a, Point2 b) {
    return std::atan2(a.y - c.y, a.x - c.x) < std::atan2(b.y - c.y, b.x - c.x);
  });
  // atan2 ascending is clockwise on screen; rotate so the top-left vertex comes first.
  const auto first = std::min_element(q.begin(), q.end(), [](Point2 a, Point2 b) {
    return a.x + a.y < b.x + b.y;
  });
  std::rotate(q.begin(), first, q.end());
  return q;
}

/// Projective 3x3 map, row-major.
class Homography {
 public:
  Homography() : m_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}
  explicit Homography(const std::array<double, 9>& m) : m_(m) {}

  /// Exact four-point fit mapping from[i] -> to[i].
  static Homography from_points(const Quad& from, const Quad& to) {
    Eigen::Matrix<double, 8, 8> a;
    Eigen::Matrix<double, 8, 1> b;
    for (int i = 0; i < 4; ++i) {
      const double x = from[i].x, y = from[i].y, u = to[i].x, v = to[i].y;
      a.row(2 * i) << x, y, 1, 0, 0, 0, -u * x, -u * y;
      a.row(2 * i + 1) << 0, 0, 0, x, y, 1, -v * x, -v * y;
      b(2 * i) = u;
      b(2 * i + 1) = v;
    }
    Eigen::FullPivLU<Eigen::Matrix<double, 8, 8>> lu(a);
    if (!lu.isInvertible()) throw Error("degenerate quad");
    const Eigen::Matrix<double, 8, 1> h = lu.solve(b);
    return Homography({h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), 1.0});
  }

  [[nodiscard]] Point2 apply(Point2 p) const {
    const double w = m_[6] * p.x + m_[7] * p.y + m_[8];
    return {(m_[0] * p.x + m_[1] * p.y + m_[2]) / w, (m_[3] * p.x + m_[4] * p.y + m_[5]) / w};
  }

  [[nodiscard]] Homography inverse() const {
    Eigen::Matrix3d m;
    m << m_[0], m_[1], m_[2], m_[3], m_[4], m_[5], m_[6], m_[7], m_[8];
    const Eigen::Matrix3d inv = m.inverse();
    return Homography({inv(0, 0), inv(0, 1), inv(0, 2), inv(1, 0), inv(1, 1), inv(1, 2),
                       inv(2, 0), inv(2, 1), inv(2, 2)});
  }

  [[nodiscard]] const std::array<double, 9>& matrix() const { return m_; }

 private:
  std::array<double, 9> m_;
};

/// Backward warp: every output pixel centre is mapped through `dst_to_src` and sampled
/// bilinearly. Samples landing outside the source (beyond half a pixel) become `fill`.
/// Output pixel (x, y) stands for destination pixel (origin.x + x, origin.y + y), so a
/// sub-window of a larger destination raster can be produced on its own.
inline Image warp_perspective(const Image& src, const Homography& dst_to_src, Size dst,
                              std::uint8_t fill = 0, Point2 origin = {0.0, 0.0}) {
  Image out(dst.width, dst.height, fill);
  const double w = src.width();
  const double h = src.height();
  const auto& m = dst_to_src.matrix();
  std::uint8_t* o = out.pixels().data();
  double v[3];
  for (int y = 0; y < dst.height; ++y) {
    const double py = origin.y + y + 0.5;
    for (int x = 0; x < dst.width; ++x, o += 3) {
      const double px = origin.x + x + 0.5;
      const double iw = m[6] * px + m[7] * py + m[8];
      const double sx = (m[0] * px + m[1] * py + m[2]) / iw;
      const double sy = (m[3] * px + m[4] * py + m[5]) / iw;
      if (!(sx >= 0.0 && sy >= 0.0 && sx <= w && sy <= h)) continue;
      sample_bilinear_rgb(src, sx - 0.5, sy - 0.5, v);
      for (int c = 0; c < 3; ++c) o[c] = saturate_u8(v[c]);
    }
  }
  return out;
}

}  // namespace holoverify
