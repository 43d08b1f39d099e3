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

// Convolutional / hybrid backbones returning globally pooled feature vectors.

#pragma once

#include <memory>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "holoverify/image.hpp"

namespace holoverify {

enum class Architecture { resnet18, mobilevit_xxs, mobilenetv3_small050 };

inline std::string_view to_string(Architecture a) {
  switch (a) {
    case Architecture::resnet18: return "resnet18";
    case Architecture::mobilevit_xxs: return "mobilevit_xxs";
    case Architecture::mobilenetv3_small050: return "mobilenetv3_small050";
  }
  return "?";
}

inline Architecture parse_architecture(std::string_view s) {
  if (s == "resnet18") return Architecture::resnet18;
  if (s == "mobilevit_xxs") return Architecture::mobilevit_xxs;
  if (s == "mobilenetv3_small050" || s == "mobilenet_small0.5") return Architecture::mobilenetv3_small050;
  throw Error("unknown architecture: " + std::string(s));
}

/// Input [B, 3, H, W] -> pooled features [B, feature_dim()].
class BackboneImpl : public torch::nn::Module {
 public:
  virtual torch::Tensor forward(torch::Tensor x) = 0;
  [[nodiscard]] virtual std::int64_t feature_dim() const = 0;
};

namespace nets {

namespace F = torch::nn::functional;

inline int make_divisible(double v, int divisor = 8) {
  int out = std::max(divisor, static_cast<int>(v + divisor / 2.0) / divisor * divisor);
  if (out < 0.9 * v) out += divisor;
  return out;
}

enum class Act { none, relu, hardswish, silu };

inline torch::Tensor activate(torch::Tensor x, Act a) {
  switch (a) {
    case Act::none: return x;
    case Act::relu: return torch::relu(x);
    case Act::hardswish: return torch::hardswish(x);
    case Act::silu: return torch::silu(x);
  }
  return x;
}

struct ConvBnImpl : torch::nn::Module {
  torch::nn::Conv2d conv{nullptr};
  torch::nn::BatchNorm2d bn{nullptr};
  Act act;
  ConvBnImpl(int in, int out, int k, int stride, Act a, int groups = 1) : act(a) {
    conv = register_module("conv", torch::nn::Conv2d(torch::nn::Conv2dOptions(in, out, k)
                                                         .stride(stride)
                                                         .padding(k / 2)
                                                         .groups(groups)
                                                         .bias(false)));
    bn = register_module("bn", torch::nn::BatchNorm2d(out));
  }
  torch::Tensor forward(torch::Tensor x) { return activate(bn(conv(x)), act); }
};
TORCH_MODULE(ConvBn);

// ---------------------------------------------------------------------------
// ResNet-18

struct BasicBlockImpl : torch::nn::Module {
  ConvBn c1{nullptr}, c2{nullptr}, down{nullptr};
  BasicBlockImpl(int in, int out, int stride) {
    c1 = register_module("c1", ConvBn(in, out, 3, stride, Act::relu));
    c2 = register_module("c2", ConvBn(out, out, 3, 1, Act::none));
    if (stride != 1 || in != out) down = register_module("down", ConvBn(in, out, 1, stride, Act::none));
  }
  torch::Tensor forward(torch::Tensor x) {
    auto y = c2(c1(x));
    return torch::relu(y + (down ? down(x) : x));
  }
};
TORCH_MODULE(BasicBlock);

class ResNet18 : public BackboneImpl {
 public:
  ResNet18() {
    stem_ = register_module("stem", ConvBn(3, 64, 7, 2, Act::relu));
    const int widths[] = {64, 128, 256, 512};
    int in = 64;
    for (int s = 0; s < 4; ++s) {
      const int stride = s == 0 ? 1 : 2;
      layers_->push_back(BasicBlock(in, widths[s], stride));
      layers_->push_back(BasicBlock(widths[s], widths[s], 1));
      in = widths[s];
    }
    register_module("layers", layers_);
  }
  torch::Tensor forward(torch::Tensor x) override {
    x = F::max_pool2d(stem_(x), F::MaxPool2dFuncOptions(3).stride(2).padding(1));
    return layers_->forward(x).mean({2, 3});
  }
  [[nodiscard]] std::int64_t feature_dim() const override { return 512; }

 private:
  ConvBn stem_{nullptr};
  torch::nn::Sequential layers_;
};

// ---------------------------------------------------------------------------
// MobileNetV3-Small at width multiplier 0.5

struct SqueezeExciteImpl : torch::nn::Module {
  torch::nn::Conv2d reduce{nullptr}, expand{nullptr};
  explicit SqueezeExciteImpl(int ch) {
    const int mid = make_divisible(ch / 4.0);
    reduce = register_module("reduce", torch::nn::Conv2d(torch::nn::Conv2dOptions(ch, mid, 1)));
    expand = register_module("expand", torch::nn::Conv2d(torch::nn::Conv2dOptions(mid, ch, 1)));
  }
  torch::Tensor forward(torch::Tensor x) {
    auto s = x.mean({2, 3}, true);
    return x * torch::hardsigmoid(expand(torch::relu(reduce(s))));
  }
};
TORCH_MODULE(SqueezeExcite);

struct InvertedResidualImpl : torch::nn::Module {
  ConvBn expand{nullptr}, depthwise{nullptr}, project{nullptr};
  SqueezeExcite se{nullptr};
  bool residual;
  InvertedResidualImpl(int in, int exp, int out, int k, int stride, bool use_se, Act act)
      : residual(stride == 1 && in == out) {
    if (exp != in) expand = register_module("expand", ConvBn(in, exp, 1, 1, act));
    depthwise = register_module("depthwise", ConvBn(exp, exp, k, stride, act, exp));
    if (use_se) se = register_module("se", SqueezeExcite(exp));
    project = register_module("project", ConvBn(exp, out, 1, 1, Act::none));
  }
  torch::Tensor forward(torch::Tensor x) {
    auto y = expand ? expand(x) : x;
    y = depthwise(y);
    if (se) y = se(y);
    y = project(y);
    return residual ? x + y : y;
  }
};
TORCH_MODULE(InvertedResidual);

class MobileNetV3Small : public BackboneImpl {
 public:
  explicit MobileNetV3Small(double width = 0.5) {
    struct Cfg { int k, exp, out; bool se; Act act; int stride; };
    const Cfg cfg[] = {{3, 16, 16, true, Act::relu, 2},       {3, 72, 24, false, Act::relu, 2},
                       {3, 88, 24, false, Act::relu, 1},      {5, 96, 40, true, Act::hardswish, 2},
                       {5, 240, 40, true, Act::hardswish, 1}, {5, 240, 40, true, Act::hardswish, 1},
                       {5, 120, 48, true, Act::hardswish, 1}, {5, 144, 48, true, Act::hardswish, 1},
                       {5, 288, 96, true, Act::hardswish, 2}, {5, 576, 96, true, Act::hardswish, 1},
                       {5, 576, 96, true, Act::hardswish, 1}};
    int in = make_divisible(16 * width);
    stem_ = register_module("stem", ConvBn(3, in, 3, 2, Act::hardswish));
    for (const auto& c : cfg) {
      const int exp = make_divisible(c.exp * width), out = make_divisible(c.out * width);
      blocks_->push_back(InvertedResidual(in, exp, out, c.k, c.stride, c.se, c.act));
      in = out;
    }
    register_module("blocks", blocks_);
    dim_ = make_divisible(576 * width);
    head_ = register_module("head", ConvBn(in, static_cast<int>(dim_), 1, 1, Act::hardswish));
  }
  torch::Tensor forward(torch::Tensor x) override { return head_(blocks_->forward(stem_(x))).mean({2, 3}); }
  [[nodiscard]] std::int64_t feature_dim() const override { return dim_; }

 private:
  ConvBn stem_{nullptr}, head_{nullptr};
  torch::nn::Sequential blocks_;
  std::int64_t dim_ = 0;
};

// ---------------------------------------------------------------------------
// MobileViT-XXS

struct MV2BlockImpl : torch::nn::Module {
  ConvBn expand{nullptr}, depthwise{nullptr}, project{nullptr};
  bool residual;
  MV2BlockImpl(int in, int out, int stride, int expansion = 2) : residual(stride == 1 && in == out) {
    const int hidden = in * expansion;
    expand = register_module("expand", ConvBn(in, hidden, 1, 1, Act::silu));
    depthwise = register_module("depthwise", ConvBn(hidden, hidden, 3, stride, Act::silu, hidden));
    project = register_module("project", ConvBn(hidden, out, 1, 1, Act::none));
  }
  torch::Tensor forward(torch::Tensor x) {
    auto y = project(depthwise(expand(x)));
    return residual ? x + y : y;
  }
};
TORCH_MODULE(MV2Block);

struct TransformerLayerImpl : torch::nn::Module {
  torch::nn::LayerNorm norm1{nullptr}, norm2{nullptr};
  torch::nn::Linear qkv{nullptr}, proj{nullptr}, fc1{nullptr}, fc2{nullptr};
  int heads;
  TransformerLayerImpl(int dim, int ffn, int n_heads) : heads(n_heads) {
    norm1 = register_module("norm1", torch::nn::LayerNorm(torch::nn::LayerNormOptions({dim})));
    qkv = register_module("qkv", torch::nn::Linear(dim, 3 * dim));
    proj = register_module("proj", torch::nn::Linear(dim, dim));
    norm2 = register_module("norm2", torch::nn::LayerNorm(torch::nn::LayerNormOptions({dim})));
    fc1 = register_module("fc1", torch::nn::Linear(dim, ffn));
    fc2 = register_module("fc2", torch::nn::Linear(ffn, dim));
  }
  // x: [B, N, D]
  torch::Tensor forward(torch::Tensor x) {
    const auto B = x.size(0), N = x.size(1), D = x.size(2);
    auto q = qkv(norm1(x)).reshape({B, N, 3, heads, D / heads}).permute({2, 0, 3, 1, 4});
    auto attn = torch::softmax(torch::matmul(q[0], q[1].transpose(-2, -1)) / std::sqrt(double(D / heads)), -1);
    auto y = torch::matmul(attn, q[2]).transpose(1, 2).reshape({B, N, D});
    x = x + proj(y);
    return x + fc2(torch::silu(fc1(norm2(x))));
  }
};
TORCH_MODULE(TransformerLayer);

struct MobileViTBlockImpl : torch::nn::Module {
  ConvBn local{nullptr}, to_tokens{nullptr}, from_tokens{nullptr}, fuse{nullptr};
  torch::nn::Sequential transformer;
  torch::nn::LayerNorm norm{nullptr};
  int patch = 2;
  MobileViTBlockImpl(int ch, int dim, int depth) {
    local = register_module("local", ConvBn(ch, ch, 3, 1, Act::silu));
    to_tokens = register_module("to_tokens", ConvBn(ch, dim, 1, 1, Act::none));
    for (int i = 0; i < depth; ++i) transformer->push_back(TransformerLayer(dim, 2 * dim, 4));
    register_module("transformer", transformer);
    norm = register_module("norm", torch::nn::LayerNorm(torch::nn::LayerNormOptions({dim})));
    from_tokens = register_module("from_tokens", ConvBn(dim, ch, 1, 1, Act::silu));
    fuse = register_module("fuse", ConvBn(2 * ch, ch, 3, 1, Act::silu));
  }
  torch::Tensor forward(torch::Tensor x) {
    auto y = to_tokens(local(x));
    const auto H0 = y.size(2), W0 = y.size(3);
    // Odd feature maps are resized up to a whole number of patches and back afterwards.
    const bool resized = H0 % patch != 0 || W0 % patch != 0;
    if (resized)
      y = F::interpolate(y, F::InterpolateFuncOptions()
                                .size(std::vector<std::int64_t>{(H0 + patch - 1) / patch * patch,
                                                                (W0 + patch - 1) / patch * patch})
                                .mode(torch::kBilinear)
                                .align_corners(false));
    const auto B = y.size(0), D = y.size(1), H = y.size(2), W = y.size(3);
    const std::int64_t h = H / patch, w = W / patch, P = patch * patch;
    // Unfold into P sequences of h*w tokens: pixels at the same offset within each patch attend.
    auto t = y.reshape({B, D, h, patch, w, patch}).permute({0, 3, 5, 2, 4, 1}).reshape({B * P, h * w, D});
    t = norm(transformer->forward(t));
    y = t.reshape({B, patch, patch, h, w, D}).permute({0, 5, 3, 1, 4, 2}).reshape({B, D, H, W});
    if (resized)
      y = F::interpolate(y, F::InterpolateFuncOptions()
                                .size(std::vector<std::int64_t>{H0, W0})
                                .mode(torch::kBilinear)
                                .align_corners(false));
    return fuse(torch::cat({x, from_tokens(y)}, 1));
  }
};
TORCH_MODULE(MobileViTBlock);

class MobileViTXXS : public BackboneImpl {
 public:
  MobileViTXXS() {
    stem_ = register_module("stem", ConvBn(3, 16, 3, 2, Act::silu));
    body_->push_back(MV2Block(16, 16, 1));
    body_->push_back(MV2Block(16, 24, 2));
    body_->push_back(MV2Block(24, 24, 1));
    body_->push_back(MV2Block(24, 24, 1));
    body_->push_back(MV2Block(24, 48, 2));
    body_->push_back(MobileViTBlock(48, 64, 2));
    body_->push_back(MV2Block(48, 64, 2));
    body_->push_back(MobileViTBlock(64, 80, 4));
    body_->push_back(MV2Block(64, 80, 2));
    body_->push_back(MobileViTBlock(80, 96, 3));
    register_module("body", body_);
    head_ = register_module("head", ConvBn(80, 320, 1, 1, Act::silu));
  }
  torch::Tensor forward(torch::Tensor x) override {
    return head_(body_->forward(stem_(x))).mean({2, 3});
  }
  [[nodiscard]] std::int64_t feature_dim() const override { return 320; }

 private:
  ConvBn stem_{nullptr}, head_{nullptr};
  torch::nn::Sequential body_;
};

}  // namespace nets

/// Freshly initialized backbone (default PyTorch initialization, seeded by the caller).
inline std::shared_ptr<BackboneImpl> make_backbone(Architecture a) {
  switch (a) {
    case Architecture::resnet18: return std::make_shared<nets::ResNet18>();
    case Architecture::mobilevit_xxs: return std::make_shared<nets::MobileViTXXS>();
    case Architecture::mobilenetv3_small050: return std::make_shared<nets::MobileNetV3Small>(0.5);
  }
  throw Error("unknown architecture");
}

}  // namespace holoverify
