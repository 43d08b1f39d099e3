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
#include <vector>

#include <nlohmann/json.hpp>

#include "holoverify/image.hpp"
#include "holoverify/rng.hpp"

namespace holoverify {

inline constexpr int kNetworkInputSide = 224;

struct AugConfig {
  bool enabled = true;
  double geometric_p = 0.5;
  double crop_ratio = 0.8;
  double crop_p = 1.0;
  int output_size = kNetworkInputSide;
  double blur_p = 0.4;
  int blur_kernel_min = 3;  // exclusive bounds; kernels are odd
  int blur_kernel_max = 11;
  double blur_sigma_min = 2.0;
  double blur_sigma_max = 10.0;
  double jitter_p = 0.4;
  std::array<double, 2> brightness{0.7, 1.3};
  std::array<double, 2> contrast{0.9, 1.1};
  std::array<double, 2> saturation{0.95, 1.05};
  std::array<float, 3> mean{0.485f, 0.456f, 0.406f};
  std::array<float, 3> stddev{0.229f, 0.224f, 0.225f};
};

inline void validate(const AugConfig& c) {
  for (double p : {c.geometric_p, c.crop_p, c.blur_p, c.jitter_p})
    if (!(p >= 0.0 && p <= 1.0)) throw Error("augmentation probability outside [0, 1]");
  if (!(c.crop_ratio > 0.0 && c.crop_ratio <= 1.0)) throw Error("crop ratio must lie in (0, 1]");
  if (c.output_size <= 0) throw Error("augmentation output size must be positive");
  bool has_odd_kernel = false;
  for (int k = c.blur_kernel_min + 1; k < c.blur_kernel_max; ++k) has_odd_kernel |= k % 2 == 1;
  if (!has_odd_kernel) throw Error("blur kernel range holds no odd size");
  for (float s : c.stddev)
    if (!(s > 0)) throw Error("normalization std must be positive");
}

inline nlohmann::json to_json(const AugConfig& c) {
  return {{"enabled", c.enabled},
          {"geometric_p", c.geometric_p},
          {"crop_ratio", c.crop_ratio},
          {"crop_p", c.crop_p},
          {"output_size", c.output_size},
          {"blur_p", c.blur_p},
          {"blur_kernel", {c.blur_kernel_min, c.blur_kernel_max}},
          {"blur_sigma", {c.blur_sigma_min, c.blur_sigma_max}},
          {"jitter_p", c.jitter_p},
          {"brightness", c.brightness},
          {"contrast", c.contrast},
          {"saturation", c.saturation},
          {"mean", c.mean},
          {"std", c.stddev}};
}

/// Reads an AugConfig; missing keys keep their defaults.
inline AugConfig aug_config_from_json(const nlohmann::json& j) {
  AugConfig c;
  c.enabled = j.value("enabled", c.enabled);
  c.geometric_p = j.value("geometric_p", c.geometric_p);
  c.crop_ratio = j.value("crop_ratio", c.crop_ratio);
  c.crop_p = j.value("crop_p", c.crop_p);
  c.output_size = j.value("output_size", c.output_size);
  c.blur_p = j.value("blur_p", c.blur_p);
  if (j.contains("blur_kernel")) {
    c.blur_kernel_min = j["blur_kernel"].at(0);
    c.blur_kernel_max = j["blur_kernel"].at(1);
  }
  if (j.contains("blur_sigma")) {
    c.blur_sigma_min = j["blur_sigma"].at(0);
    c.blur_sigma_max = j["blur_sigma"].at(1);
  }
  c.jitter_p = j.value("jitter_p", c.jitter_p);
  c.brightness = j.value("brightness", c.brightness);
  c.contrast = j.value("contrast", c.contrast);
  c.saturation = j.value("saturation", c.saturation);
  c.mean = j.value("mean", c.mean);
  c.stddev = j.value("std", c.stddev);
  validate(c);
  return c;
}

// ---------------------------------------------------------------------------
// Exact geometric transforms

enum class GeoTransform { identity, rot90, rot180, rot270, flip_h, flip_v };

/// rot90 is a clockwise quarter turn.
inline Image apply_geometric(const Image& src, GeoTransform t) {
  if (t == GeoTransform::identity) return src;
  const int w = src.width(), h = src.height();
  const bool swap = t == GeoTransform::rot90 || t == GeoTransform::rot270;
  Image out(swap ? h : w, swap ? w : h);
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x) {
      int sx = x, sy = y;
      switch (t) {
        case GeoTransform::rot90: sx = y; sy = h - 1 - x; break;
        case GeoTransform::rot180: sx = w - 1 - x; sy = h - 1 - y; break;
        case GeoTransform::rot270: sx = w - 1 - y; sy = x; break;
        case GeoTransform::flip_h: sx = w - 1 - x; break;
        case GeoTransform::flip_v: sy = h - 1 - y; break;
        case GeoTransform::identity: break;
      }
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = src.at(sx, sy, c);
    }
  return out;
}

inline GeoTransform draw_geometric(const AugConfig& cfg, Rng& rng) {
  if (!bernoulli(rng, cfg.geometric_p)) return GeoTransform::identity;
  static constexpr std::array kChoices{GeoTransform::rot90, GeoTransform::rot180, GeoTransform::rot270,
                                       GeoTransform::flip_h, GeoTransform::flip_v};
  return kChoices[uniform_index(rng, kChoices.size())];
}

// ---------------------------------------------------------------------------
// Photometric operations on planar [0, 1] images

inline std::vector<double> gaussian_kernel(int size, double sigma) {
  std::vector<double> k(size);
  const int half = size / 2;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - half;
    k[i] = std::exp(-0.5 * d * d / (sigma * sigma));
    sum += k[i];
  }
  for (auto& v : k) v /= sum;
  return k;
}

/// Separable Gaussian blur with mirrored borders (edge pixel not repeated).
inline PlanarImage gaussian_blur(const PlanarImage& src, int kernel, double sigma) {
  const auto k = gaussian_kernel(kernel, sigma);
  const int half = kernel / 2;
  const int w = src.width(), h = src.height();
  auto reflect = [](int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) i = i < 0 ? -i : 2 * (n - 1) - i;
    return i;
  };
  PlanarImage tmp(w, h), out(w, h);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int i = 0; i < kernel; ++i) acc += k[i] * src.at(c, y, reflect(x + i - half, w));
        tmp.at(c, y, x) = static_cast<float>(acc);
      }
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int i = 0; i < kernel; ++i) acc += k[i] * tmp.at(c, reflect(y + i - half, h), x);
        out.at(c, y, x) = static_cast<float>(acc);
      }
  }
  return out;
}

inline float luma(float r, float g, float b) { return 0.299f * r + 0.587f * g + 0.114f * b; }

inline void adjust_brightness(PlanarImage& img, double factor) {
  for (auto& v : img.values()) v = std::clamp(static_cast<float>(v * factor), 0.0f, 1.0f);
}

/// Blends with the mean grey level of the image.
inline void adjust_contrast(PlanarImage& img, double factor) {
  double mean = 0.0;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) mean += luma(img.at(0, y, x), img.at(1, y, x), img.at(2, y, x));
  mean /= static_cast<double>(img.width()) * img.height();
  for (auto& v : img.values())
    v = std::clamp(static_cast<float>((v - mean) * factor + mean), 0.0f, 1.0f);
}

/// Blends each pixel with its own grey level.
inline void adjust_saturation(PlanarImage& img, double factor) {
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const float g = luma(img.at(0, y, x), img.at(1, y, x), img.at(2, y, x));
      for (int c = 0; c < 3; ++c)
        img.at(c, y, x) = std::clamp(static_cast<float>((img.at(c, y, x) - g) * factor + g), 0.0f, 1.0f);
    }
}

inline void normalize(PlanarImage& img, const AugConfig& cfg) {
  for (int c = 0; c < 3; ++c)
    for (auto& v : img.channel(c)) v = (v - cfg.mean[c]) / cfg.stddev[c];
}

/// Deterministic preprocessing used at inference time and when augmentation is disabled:
/// the centred crop_ratio window, resized to output_size, then normalized.
inline PlanarImage eval_transform(const Image& roi, const AugConfig& cfg) {
  const auto src = to_planar(roi);
  const double cw = cfg.crop_ratio * src.width();
  const double ch = cfg.crop_ratio * src.height();
  auto out = crop_resize(src, std::round((src.width() - cw) / 2), std::round((src.height() - ch) / 2),
                         cw, ch, {cfg.output_size, cfg.output_size});
  normalize(out, cfg);
  return out;
}

/// Inverse of normalize, as an 8-bit image.
inline Image denormalize(const PlanarImage& img, const AugConfig& cfg) {
  PlanarImage out = img;
  for (int c = 0; c < 3; ++c)
    for (auto& v : out.channel(c)) v = v * cfg.stddev[c] + cfg.mean[c];
  return to_image(out);
}

/// Odd kernel sizes strictly between blur_kernel_min and blur_kernel_max.
inline std::vector<int> blur_kernel_sizes(const AugConfig& cfg) {
  std::vector<int> sizes;
  for (int k = cfg.blur_kernel_min + 1; k < cfg.blur_kernel_max; ++k)
    if (k % 2 == 1) sizes.push_back(k);
  if (sizes.empty()) throw Error("blur kernel range holds no odd size");
  return sizes;
}

/// Random per-image part of the pipeline: crop, blur, colour jitter, normalization.
/// The geometric transform is applied beforehand because it is shared within a triplet.
inline PlanarImage augment_image(const Image& roi, const AugConfig& cfg, Rng& rng) {
  const auto src = to_planar(roi);
  const int cw = std::max(1, static_cast<int>(std::lround(cfg.crop_ratio * src.width())));
  const int ch = std::max(1, static_cast<int>(std::lround(cfg.crop_ratio * src.height())));
  PlanarImage out;
  if (bernoulli(rng, cfg.crop_p)) {
    const int x0 = uniform_int(rng, 0, src.width() - cw);
    const int y0 = uniform_int(rng, 0, src.height() - ch);
    out = crop_resize(src, x0, y0, cw, ch, {cfg.output_size, cfg.output_size});
  } else {
    out = crop_resize(src, (src.width() - cw) / 2, (src.height() - ch) / 2, cw, ch,
                      {cfg.output_size, cfg.output_size});
  }
  if (bernoulli(rng, cfg.blur_p)) {
    const auto sizes = blur_kernel_sizes(cfg);
    const int kernel = sizes[uniform_index(rng, sizes.size())];
    const double sigma = uniform(rng, cfg.blur_sigma_min, cfg.blur_sigma_max);
    out = gaussian_blur(out, kernel, sigma);
  }
  if (bernoulli(rng, cfg.jitter_p)) {
    adjust_brightness(out, uniform(rng, cfg.brightness[0], cfg.brightness[1]));
    adjust_contrast(out, uniform(rng, cfg.contrast[0], cfg.contrast[1]));
    adjust_saturation(out, uniform(rng, cfg.saturation[0], cfg.saturation[1]));
  }
  normalize(out, cfg);
  return out;
}

}  // namespace holoverify
