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
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace holoverify {

/// Library-wide error type. Messages are meant to be shown to the user as-is.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Size {
  int width = 0;
  int height = 0;

  friend bool operator==(const Size&, const Size&) = default;
  [[nodiscard]] long long area() const { return static_cast<long long>(width) * height; }
};

/// Axis-aligned integer rectangle, (x, y) is the top-left corner.
struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  friend bool operator==(const Rect&, const Rect&) = default;
  [[nodiscard]] bool inside(Size s) const {
    return x >= 0 && y >= 0 && width > 0 && height > 0 && x + width <= s.width &&
           y + height <= s.height;
  }
  [[nodiscard]] bool contains(int px, int py) const {
    return px >= x && py >= y && px < x + width && py < y + height;
  }
};

/// 8-bit interleaved R,G,B raster.
class Image {
 public:
  Image() = default;
  Image(int width, int height, std::uint8_t fill = 0)
      : width_(width), height_(height), data_(checked_size(width, height), fill) {}

  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int height() const { return height_; }
  [[nodiscard]] Size size() const { return {width_, height_}; }
  [[nodiscard]] bool empty() const { return data_.empty(); }

  std::uint8_t& at(int x, int y, int c) { return data_[index(x, y, c)]; }
  [[nodiscard]] std::uint8_t at(int x, int y, int c) const { return data_[index(x, y, c)]; }

  [[nodiscard]] std::span<std::uint8_t> pixels() { return data_; }
  [[nodiscard]] std::span<const std::uint8_t> pixels() const { return data_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  static std::size_t checked_size(int w, int h) {
    if (w < 0 || h < 0) throw Error("negative image size");
    return static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3;
  }
  [[nodiscard]] std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * 3 + c;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Planar (C,H,W) float image, three channels. Used between augmentation and the encoder.
class PlanarImage {
 public:
  PlanarImage() = default;
  PlanarImage(int width, int height, float fill = 0.0f)
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * height * 3, fill) {}

  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int height() const { return height_; }
  [[nodiscard]] Size size() const { return {width_, height_}; }

  float& at(int c, int y, int x) { return data_[index(c, y, x)]; }
  [[nodiscard]] float at(int c, int y, int x) const { return data_[index(c, y, x)]; }

  [[nodiscard]] std::span<float> values() { return data_; }
  [[nodiscard]] std::span<const float> values() const { return data_; }
  [[nodiscard]] std::span<float> channel(int c) {
    return std::span<float>(data_).subspan(static_cast<std::size_t>(c) * width_ * height_,
                                           static_cast<std::size_t>(width_) * height_);
  }

  friend bool operator==(const PlanarImage&, const PlanarImage&) = default;

 private:
  [[nodiscard]] std::size_t index(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

inline std::uint8_t saturate_u8(double v) {
  if (!(v > 0.0)) return 0;
  if (v >= 254.5) return 255;
  return static_cast<std::uint8_t>(v + 0.5);
}

namespace detail {

// Bilinear interpolation at index-space coordinates (x, y), neighbours clamped to the raster.
template <typename Fetch>
double bilinear(Fetch&& fetch, int width, int height, double x, double y) {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const double ax = x - fx;
  const double ay = y - fy;
  const int x0 = std::clamp(static_cast<int>(fx), 0, width - 1);
  const int y0 = std::clamp(static_cast<int>(fy), 0, height - 1);
  const int x1 = std::clamp(static_cast<int>(fx) + 1, 0, width - 1);
  const int y1 = std::clamp(static_cast<int>(fy) + 1, 0, height - 1);
  const double top = fetch(x0, y0) * (1.0 - ax) + fetch(x1, y0) * ax;
  const double bottom = fetch(x0, y1) * (1.0 - ax) + fetch(x1, y1) * ax;
  return top * (1.0 - ay) + bottom * ay;
}

}  // namespace detail

/// Bilinear sample of channel `c` at index-space position (x, y); edges replicate.
inline double sample_bilinear(const Image& img, double x, double y, int c) {
  return detail::bilinear([&](int px, int py) { return static_cast<double>(img.at(px, py, c)); },
                          img.width(), img.height(), x, y);
}

/// All three channels of an interleaved image at once; same arithmetic as sample_bilinear.
inline void sample_bilinear_rgb(const Image& img, double x, double y, double out[3]) {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const double ax = x - fx;
  const double ay = y - fy;
  const int w = img.width(), h = img.height();
  const int x0 = std::clamp(static_cast<int>(fx), 0, w - 1);
  const int y0 = std::clamp(static_cast<int>(fy), 0, h - 1);
  const int x1 = std::clamp(static_cast<int>(fx) + 1, 0, w - 1);
  const int y1 = std::clamp(static_cast<int>(fy) + 1, 0, h - 1);
  const std::uint8_t* d = img.pixels().data();
  const std::uint8_t* p00 = d + (static_cast<std::size_t>(y0) * w + x0) * 3;
  const std::uint8_t* p01 = d + (static_cast<std::size_t>(y0) * w + x1) * 3;
  const std::uint8_t* p10 = d + (static_cast<std::size_t>(y1) * w + x0) * 3;
  const std::uint8_t* p11 = d + (static_cast<std::size_t>(y1) * w + x1) * 3;
  for (int c = 0; c < 3; ++c) {
    const double top = p00[c] * (1.0 - ax) + p01[c] * ax;
    const double bottom = p10[c] * (1.0 - ax) + p11[c] * ax;
    out[c] = top * (1.0 - ay) + bottom * ay;
  }
}

inline double sample_bilinear(const PlanarImage& img, double x, double y, int c) {
  return detail::bilinear([&](int px, int py) { return static_cast<double>(img.at(c, py, px)); },
                          img.width(), img.height(), x, y);
}

inline Image crop(const Image& src, Rect r) {
  if (!r.inside(src.size())) throw Error("crop rectangle outside image");
  Image out(r.width, r.height);
  for (int y = 0; y < r.height; ++y)
    for (int x = 0; x < r.width; ++x)
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = src.at(r.x + x, r.y + y, c);
  return out;
}

/// Bilinear resize with half-pixel centres (align_corners = false).
inline Image resize(const Image& src, Size dst) {
  if (src.empty() || dst.width <= 0 || dst.height <= 0) throw Error("invalid resize");
  Image out(dst.width, dst.height);
  const double sx = static_cast<double>(src.width()) / dst.width;
  const double sy = static_cast<double>(src.height()) / dst.height;
  for (int y = 0; y < dst.height; ++y) {
    const double yy = (y + 0.5) * sy - 0.5;
    for (int x = 0; x < dst.width; ++x) {
      const double xx = (x + 0.5) * sx - 0.5;
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = saturate_u8(sample_bilinear(src, xx, yy, c));
    }
  }
  return out;
}

inline PlanarImage resize(const PlanarImage& src, Size dst) {
  PlanarImage out(dst.width, dst.height);
  const double sx = static_cast<double>(src.width()) / dst.width;
  const double sy = static_cast<double>(src.height()) / dst.height;
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < dst.height; ++y) {
      const double yy = (y + 0.5) * sy - 0.5;
      for (int x = 0; x < dst.width; ++x)
        out.at(c, y, x) =
            static_cast<float>(sample_bilinear(src, (x + 0.5) * sx - 0.5, yy, c));
    }
  return out;
}

/// Crops `r` (fractional origin allowed) and resamples it to `dst`, in one bilinear pass.
inline PlanarImage crop_resize(const PlanarImage& src, double rx, double ry, double rw, double rh,
                               Size dst) {
  PlanarImage out(dst.width, dst.height);
  const double sx = rw / dst.width;
  const double sy = rh / dst.height;
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < dst.height; ++y) {
      const double yy = ry + (y + 0.5) * sy - 0.5;
      for (int x = 0; x < dst.width; ++x)
        out.at(c, y, x) =
            static_cast<float>(sample_bilinear(src, rx + (x + 0.5) * sx - 0.5, yy, c));
    }
  return out;
}

/// Converts to planar float in [0, 1].
inline PlanarImage to_planar(const Image& img) {
  PlanarImage out(img.width(), img.height());
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x) out.at(c, y, x) = img.at(x, y, c) / 255.0f;
  return out;
}

/// Inverse of to_planar; values are clamped to [0, 1] first.
inline Image to_image(const PlanarImage& img) {
  Image out(img.width(), img.height());
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x)
        out.at(x, y, c) = saturate_u8(static_cast<double>(img.at(c, y, x)) * 255.0);
  return out;
}

/// HSV saturation in [0, 255], (max - min) / max scaled (OpenCV convention).
inline std::uint8_t saturation(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const int mx = std::max({r, g, b});
  const int mn = std::min({r, g, b});
  if (mx == 0) return 0;
  return saturate_u8(255.0 * (mx - mn) / mx);
}

// ---------------------------------------------------------------------------
// File I/O. OpenCV handles the codecs; everything else stays in our own types.

inline Image read_image(const std::filesystem::path& path) {
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) throw Error("cannot read image: " + path.string());
  Image out(bgr.cols, bgr.rows);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) {
      out.at(x, y, 0) = row[x][2];
      out.at(x, y, 1) = row[x][1];
      out.at(x, y, 2) = row[x][0];
    }
  }
  return out;
}

/// Writes PNG or JPEG depending on the extension. JPEG uses quality `jpeg_quality`.
inline void write_image(const std::filesystem::path& path, const Image& img,
                        int jpeg_quality = 95) {
  cv::Mat bgr(img.height(), img.width(), CV_8UC3);
  for (int y = 0; y < img.height(); ++y) {
    auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < img.width(); ++x)
      row[x] = cv::Vec3b(img.at(x, y, 2), img.at(x, y, 1), img.at(x, y, 0));
  }
  std::vector<int> params;
  const auto ext = path.extension().string();
  if (ext == ".jpg" || ext == ".jpeg") params = {cv::IMWRITE_JPEG_QUALITY, jpeg_quality};
  if (ext == ".png") params = {cv::IMWRITE_PNG_COMPRESSION, 3};
  if (!cv::imwrite(path.string(), bgr, params))
    throw Error("cannot write image: " + path.string());
}

}  // namespace holoverify
