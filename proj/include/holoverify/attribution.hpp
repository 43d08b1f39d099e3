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

// Integrated gradients with a right Riemann sum:
//   attr_i = (x_i - x'_i) / steps * sum_{k=1..steps} dF/dx_i (x' + k/steps (x - x'))

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include <torch/torch.h>

#include "holoverify/augment.hpp"
#include "holoverify/encoder.hpp"

namespace holoverify {

/// Scalar function that also writes its gradient.
using ScalarFunction = std::function<double(std::span<const double> x, std::span<double> grad)>;

inline std::vector<double> integrated_gradients(const ScalarFunction& f, std::span<const double> input,
                                                std::span<const double> baseline, int steps) {
  if (steps < 1) throw Error("integrated gradients needs at least one step");
  if (input.size() != baseline.size()) throw Error("input and baseline differ in shape");
  const std::size_t n = input.size();
  std::vector<double> acc(n, 0.0), x(n), g(n);
  for (int k = 1; k <= steps; ++k) {
    const double alpha = static_cast<double>(k) / steps;
    for (std::size_t i = 0; i < n; ++i) x[i] = baseline[i] + alpha * (input[i] - baseline[i]);
    std::fill(g.begin(), g.end(), 0.0);
    f(x, g);
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(g[i])) throw Error("non-finite gradient in integrated gradients");
      acc[i] += g[i];
    }
  }
  for (std::size_t i = 0; i < n; ++i) acc[i] *= (input[i] - baseline[i]) / steps;
  return acc;
}

/// Batched scalar target: [B, ...] -> [B].
using TensorTarget = std::function<torch::Tensor(const torch::Tensor&)>;

/// Same rule on tensors; `input` and `baseline` carry no batch dimension.
inline torch::Tensor integrated_gradients(const TensorTarget& f, const torch::Tensor& input,
                                          const torch::Tensor& baseline, int steps, int chunk = 16) {
  if (steps < 1) throw Error("integrated gradients needs at least one step");
  if (input.sizes() != baseline.sizes()) throw Error("input and baseline differ in shape");
  const auto delta = (input - baseline).detach();
  auto acc = torch::zeros_like(input);
  for (int start = 1; start <= steps; start += chunk) {
    const int end = std::min(steps, start + chunk - 1);
    const auto alphas = torch::arange(start, end + 1, torch::kDouble).to(input.scalar_type()) / steps;
    std::vector<std::int64_t> shape{alphas.size(0)};
    for (auto s : input.sizes()) shape.push_back(s);
    auto view = alphas;
    for (std::int64_t d = 0; d < input.dim(); ++d) view = view.unsqueeze(-1);
    auto x = (baseline.unsqueeze(0) + view * delta.unsqueeze(0)).expand(shape).clone().requires_grad_(true);
    const auto out = f(x);
    if (out.dim() != 1 || out.size(0) != x.size(0)) throw Error("attribution target must return one value per sample");
    const auto grad = torch::autograd::grad({out.sum()}, {x}, {}, false, false, true)[0];
    if (!grad.defined()) continue;  // target independent of the input
    if (!torch::isfinite(grad).all().item<bool>()) throw Error("non-finite gradient in integrated gradients");
    acc += grad.sum(0);
  }
  return acc * delta / steps;
}

/// Default target: L2 norm of the embedding.
inline TensorTarget embedding_norm_target(const EncoderModel& model) {
  return [&model](const torch::Tensor& x) { return torch::linalg_vector_norm(model.forward(x), 2, {1}); };
}

/// Normalized-input image of a black frame.
inline PlanarImage black_baseline(const AugConfig& cfg, int side = kNetworkInputSide) {
  PlanarImage b(side, side);
  normalize(b, cfg);
  return b;
}

/// Per-channel attribution of an encoder input (normalized 3x224x224) in eval mode.
inline PlanarImage attribute_frame(const EncoderModel& model, const PlanarImage& input, const PlanarImage& baseline,
                                   int steps = 64, TensorTarget target = {}) {
  model.net->eval();
  if (!target) target = embedding_norm_target(model);
  const auto x = to_tensor(std::span<const PlanarImage>(&input, 1))[0];
  const auto b = to_tensor(std::span<const PlanarImage>(&baseline, 1))[0];
  const auto attr = integrated_gradients(target, x, b, steps).contiguous();
  PlanarImage out(input.width(), input.height());
  std::memcpy(out.values().data(), attr.data_ptr<float>(), out.values().size() * sizeof(float));
  return out;
}

/// Sum of absolute attributions over channels, row-major H x W.
inline std::vector<double> attribution_magnitude(const PlanarImage& attr) {
  std::vector<double> out(static_cast<std::size_t>(attr.width()) * attr.height(), 0.0);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < attr.height(); ++y)
      for (int x = 0; x < attr.width(); ++x)
        out[static_cast<std::size_t>(y) * attr.width() + x] += std::abs(attr.at(c, y, x));
  return out;
}

/// Mean magnitude inside `region` divided by the mean magnitude outside it.
inline double region_ratio(const PlanarImage& attr, Rect region) {
  const auto mag = attribution_magnitude(attr);
  double in = 0.0, out = 0.0;
  std::size_t n_in = 0, n_out = 0;
  for (int y = 0; y < attr.height(); ++y)
    for (int x = 0; x < attr.width(); ++x) {
      const double v = mag[static_cast<std::size_t>(y) * attr.width() + x];
      if (region.contains(x, y)) {
        in += v;
        ++n_in;
      } else {
        out += v;
        ++n_out;
      }
    }
  if (n_in == 0 || n_out == 0) throw Error("region must split the image in two non-empty parts");
  if (out == 0.0) return in > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  return (in / static_cast<double>(n_in)) / (out / static_cast<double>(n_out));
}

/// Maps a rectangle in canonical document coordinates to encoder-input pixels, following
/// ROI extraction (crop + resize to kRoiSide) and the deterministic centred crop.
inline Rect input_region(Rect canonical, const RoiSpec& roi, const AugConfig& cfg) {
  const double crop_side = cfg.crop_ratio * kRoiSide;
  const double crop_origin = std::round((kRoiSide - crop_side) / 2);
  const double scale = cfg.output_size / crop_side;
  auto map = [&](double v, int origin, int extent) {
    const double in_roi = (v - origin) * kRoiSide / extent;
    return std::clamp((in_roi - crop_origin) * scale, 0.0, static_cast<double>(cfg.output_size));
  };
  const double x0 = map(canonical.x, roi.rect.x, roi.rect.width);
  const double x1 = map(canonical.x + canonical.width, roi.rect.x, roi.rect.width);
  const double y0 = map(canonical.y, roi.rect.y, roi.rect.height);
  const double y1 = map(canonical.y + canonical.height, roi.rect.y, roi.rect.height);
  const int ix = static_cast<int>(std::lround(x0)), iy = static_cast<int>(std::lround(y0));
  return {ix, iy, static_cast<int>(std::lround(x1)) - ix, static_cast<int>(std::lround(y1)) - iy};
}

/// Heat overlay: pixels blend toward yellow-red in proportion to their attribution
/// magnitude (normalized by the maximum); a zero map returns the input unchanged.
inline Image render_attribution(const PlanarImage& attr, const Image& input, double max_alpha = 0.7) {
  if (attr.width() != input.width() || attr.height() != input.height())
    throw Error("attribution map and image differ in shape");
  const auto mag = attribution_magnitude(attr);
  const double peak = *std::max_element(mag.begin(), mag.end());
  Image out = input;
  if (!(peak > 0.0)) return out;
  for (int y = 0; y < input.height(); ++y)
    for (int x = 0; x < input.width(); ++x) {
      const double h = mag[static_cast<std::size_t>(y) * input.width() + x] / peak;
      if (h <= 0.0) continue;
      const double a = max_alpha * h;
      const double heat[3] = {255.0, 255.0 * h, 0.0};
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = saturate_u8((1 - a) * input.at(x, y, c) + a * heat[c]);
    }
  return out;
}

}  // namespace holoverify
