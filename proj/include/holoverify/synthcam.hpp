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

// Procedural identity-document clips for desk-scale experiments.
//
// Every clip shows one document model filmed under a smoothly varying pose. Originals carry
// a pseudo-holographic overlay whose colour, opacity and line pattern change from frame to
// frame; attacks carry no overlay, a frame-constant imitation, or a desaturated "photocopy"
// of one overlay state. Photo-replacement clips keep the dynamic overlay everywhere except
// over the (substituted) face picture. Quads are exact because frames are rendered from
// known homographies. The output tree is the layout scan_dataset reads.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "holoverify/catalog.hpp"
#include "holoverify/config.hpp"
#include "holoverify/geometry.hpp"
#include "holoverify/rng.hpp"

namespace holoverify {

enum class OverlayKind { dynamic_holo, none, static_holo, desaturated_copy, photo_replacement };

inline OverlayKind overlay_for(AttackKind k) {
  switch (k) {
    case AttackKind::none: return OverlayKind::dynamic_holo;
    case AttackKind::copy_without_holo: return OverlayKind::none;
    case AttackKind::pseudo_holo_copy: return OverlayKind::static_holo;
    case AttackKind::photo_holo_copy: return OverlayKind::desaturated_copy;
    case AttackKind::photo_replacement: return OverlayKind::photo_replacement;
  }
  return OverlayKind::none;
}

inline bool is_dynamic(OverlayKind k) {
  return k == OverlayKind::dynamic_holo || k == OverlayKind::photo_replacement;
}

struct SynthSpec {
  int n_models = 4;
  int n_identities = 5;
  int n_originals = 3;  // original takes per identity
  int frames_per_clip = 12;
  double fps = 5.0;
  Size frame_size{640, 448};
  std::string image_format = "png";
  /// Hologram hue advance per frame, in turns.
  double hue_speed = 0.17;
  /// Additive Gaussian sensor noise, in 8-bit intensity units.
  double noise_sigma = 0.0;
  /// Relative amplitude of per-frame global illumination drift (0 disables it).
  double illumination = 0.2;
  /// Peak strength of a moving specular glare blob (0 disables it).
  double glare = 0.5;
  bool include_attacks = true;
};

inline void validate(const SynthSpec& s) {
  if (s.n_models < 1 || s.n_identities < 1 || s.n_originals < 0 || s.frames_per_clip < 2)
    throw Error("invalid synthetic dataset spec");
  if (s.noise_sigma < 0 || s.illumination < 0 || s.illumination >= 1 || s.glare < 0 || s.glare > 1)
    throw Error("synthetic nuisance strengths out of range");
  if (!(s.fps > 0)) throw Error("synthetic fps must be positive");
  if (s.frame_size.width < 64 || s.frame_size.height < 64) throw Error("synthetic frames are too small");
  if (s.image_format != "jpg" && s.image_format != "png") throw Error("image_format must be jpg or png");
}

inline nlohmann::json to_json(const SynthSpec& s) {
  return {{"n_models", s.n_models},       {"n_identities", s.n_identities},
          {"n_originals", s.n_originals}, {"frames_per_clip", s.frames_per_clip},
          {"fps", s.fps},                 {"frame_size", {s.frame_size.width, s.frame_size.height}},
          {"image_format", s.image_format}, {"hue_speed", s.hue_speed},
          {"noise_sigma", s.noise_sigma}, {"illumination", s.illumination},
          {"glare", s.glare},             {"include_attacks", s.include_attacks}};
}

inline SynthSpec synth_spec_from_json(const nlohmann::json& j) {
  SynthSpec s;
  s.n_models = j.value("n_models", s.n_models);
  s.n_identities = j.value("n_identities", s.n_identities);
  s.n_originals = j.value("n_originals", s.n_originals);
  s.frames_per_clip = j.value("frames_per_clip", s.frames_per_clip);
  s.fps = j.value("fps", s.fps);
  if (j.contains("frame_size")) s.frame_size = {j["frame_size"].at(0), j["frame_size"].at(1)};
  s.image_format = j.value("image_format", s.image_format);
  s.hue_speed = j.value("hue_speed", s.hue_speed);
  s.noise_sigma = j.value("noise_sigma", s.noise_sigma);
  s.illumination = j.value("illumination", s.illumination);
  s.glare = j.value("glare", s.glare);
  s.include_attacks = j.value("include_attacks", s.include_attacks);
  validate(s);
  return s;
}

/// Canonical-coordinate layout of one document model.
struct DocumentLayout {
  std::string name;
  Rect roi;
  Rect face;
  Rect overlay;
};

/// Even models are ID-card-like, odd ones passport-like; the two families place the face
/// (and the hologram securing it) at slightly different positions.
inline DocumentLayout layout_for_model(int model) {
  const bool passport = model % 2 == 1;
  char name[32];
  std::snprintf(name, sizeof name, "%s%02d", passport ? "psp" : "id", model / 2 + 1);
  const int dx = passport ? 36 : 0;
  const int dy = passport ? 28 : 0;
  DocumentLayout l;
  l.name = name;
  l.roi = {40 + dx, 150 + dy, 420, 420};
  l.face = {95 + dx, 205 + dy, 250, 310};
  l.overlay = {150 + dx, 250 + dy, 280, 280};
  return l;
}

/// Inverse of the naming above: "id03" -> model 4, "psp03" -> model 5.
inline DocumentLayout layout_for_name(std::string_view name) {
  const bool passport = name.rfind("psp", 0) == 0;
  const auto digits = name.substr(passport ? 3 : name.rfind("id", 0) == 0 ? 2 : name.size());
  int nn = 0;
  const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), nn);
  if (digits.empty() || ec != std::errc() || end != digits.data() + digits.size() || nn < 1)
    throw Error("not a synthetic document model: " + std::string(name));
  return layout_for_model(2 * (nn - 1) + (passport ? 1 : 0));
}

inline RoiConfig synth_roi_config(const SynthSpec& spec) {
  RoiConfig cfg(kCanonicalSize);
  for (int m = 0; m < spec.n_models; ++m) {
    const auto l = layout_for_model(m);
    cfg.set(l.name, l.roi);
  }
  return cfg;
}

inline std::string identity_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d", i + 1);
  return buf;
}

/// Everything needed to render one clip.
struct SynthClipPlan {
  ClipRecord record;  // metadata only, frames empty
  OverlayKind overlay = OverlayKind::none;
  int model = 0;
  int identity = 0;
  std::uint64_t seed = 0;
};

inline std::vector<SynthClipPlan> plan_clips(const SynthSpec& spec, std::uint64_t seed) {
  validate(spec);
  std::vector<SynthClipPlan> plans;
  const std::vector<AttackKind> attacks{AttackKind::copy_without_holo, AttackKind::photo_holo_copy,
                                        AttackKind::photo_replacement, AttackKind::pseudo_holo_copy};
  for (int m = 0; m < spec.n_models; ++m) {
    const auto layout = layout_for_model(m);
    for (int i = 0; i < spec.n_identities; ++i) {
      const auto id = identity_name(i);
      auto add = [&](AttackKind kind, const std::string& clip_id) {
        SynthClipPlan p;
        p.record.clip_id = clip_id;
        p.record.document_model = layout.name;
        p.record.identity = id;
        p.record.attack_kind = kind;
        p.record.label = kind == AttackKind::none ? Label::original : Label::attack;
        p.record.fps = spec.fps;
        p.overlay = overlay_for(kind);
        p.model = m;
        p.identity = i;
        p.seed = derive_seed(seed, fnv1a64(clip_id));
        plans.push_back(std::move(p));
      };
      for (int take = 0; take < spec.n_originals; ++take)
        add(AttackKind::none, "origins/" + layout.name + "/" + layout.name + "_" + id + "_" + identity_name(take));
      if (spec.include_attacks)
        for (auto k : attacks)
          add(k, "fraud/" + std::string(to_string(k)) + "/" + layout.name + "/" + layout.name + "_" + id);
    }
  }
  std::sort(plans.begin(), plans.end(),
            [](const SynthClipPlan& a, const SynthClipPlan& b) { return a.record.clip_id < b.record.clip_id; });
  return plans;
}

namespace detail {

inline std::array<double, 3> hsv_to_rgb(double h, double s, double v) {
  h = h - std::floor(h);
  const double c = v * s;
  const double hp = h * 6.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp) % 6) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  const double m = v - c;
  return {r + m, g + m, b + m};
}

// Smooth pseudo-random field built from a handful of seeded plane waves.
struct WaveField {
  std::array<double, 6> fx{}, fy{}, ph{}, amp{};
  explicit WaveField(Rng& rng, double min_period, double max_period) {
    for (int k = 0; k < 6; ++k) {
      const double ang = uniform(rng, 0.0, 2 * std::numbers::pi);
      const double period = uniform(rng, min_period, max_period);
      fx[k] = std::cos(ang) * 2 * std::numbers::pi / period;
      fy[k] = std::sin(ang) * 2 * std::numbers::pi / period;
      ph[k] = uniform(rng, 0.0, 2 * std::numbers::pi);
      amp[k] = uniform(rng, 0.4, 1.0);
    }
  }
  [[nodiscard]] double operator()(double x, double y) const {
    double s = 0.0, n = 0.0;
    for (int k = 0; k < 6; ++k) {
      s += amp[k] * std::sin(fx[k] * x + fy[k] * y + ph[k]);
      n += amp[k];
    }
    return s / n;  // in [-1, 1]
  }
};

inline void blend(Image& img, int x, int y, std::array<double, 3> rgb, double a) {
  for (int c = 0; c < 3; ++c) img.at(x, y, c) = saturate_u8((1 - a) * img.at(x, y, c) + a * rgb[c]);
}

// Document without any hologram: model background, text lines, face picture.
inline Image render_base_document(const DocumentLayout& layout, int model, std::uint64_t face_seed) {
  Image doc(kCanonicalSize.width, kCanonicalSize.height);
  Rng model_rng(derive_seed(0xD0C0u, static_cast<std::uint64_t>(model)));
  const double base_hue = uniform(model_rng, 0.0, 1.0);
  const WaveField guilloche(model_rng, 40.0, 160.0);
  for (int y = 0; y < doc.height(); ++y)
    for (int x = 0; x < doc.width(); ++x) {
      const double g = guilloche(x, y);
      const auto rgb = hsv_to_rgb(base_hue + 0.05 * g, 0.18 + 0.05 * g, 0.88 + 0.05 * g);
      for (int c = 0; c < 3; ++c) doc.at(x, y, c) = saturate_u8(255 * rgb[c]);
    }
  // Text lines to the right of the face.
  Rng text_rng(face_seed ^ 0x7E57u);
  for (int line = 0; line < 8; ++line) {
    const int y0 = 160 + line * 60;
    const int x0 = layout.roi.x + layout.roi.width + 40;
    const int len = uniform_int(text_rng, 180, 520);
    for (int y = y0; y < y0 + 18 && y < doc.height(); ++y)
      for (int x = x0; x < std::min(doc.width() - 30, x0 + len); ++x)
        if (((x - x0) / 14) % 5 != 4) blend(doc, x, y, {40, 40, 60}, 0.85);
  }
  // Face: smooth random skin/hair/background texture plus a facial layout.
  Rng face_rng(face_seed);
  const WaveField tex(face_rng, 25.0, 120.0);
  const double skin_hue = uniform(face_rng, 0.03, 0.09);
  const double bg_v = uniform(face_rng, 0.55, 0.85);
  const auto& f = layout.face;
  const double cx = f.x + f.width / 2.0, cy = f.y + f.height * 0.48;
  const double rx = f.width * uniform(face_rng, 0.30, 0.36), ry = f.height * uniform(face_rng, 0.34, 0.40);
  for (int y = f.y; y < f.y + f.height; ++y)
    for (int x = f.x; x < f.x + f.width; ++x) {
      const double t = tex(x, y);
      const double dx = (x - cx) / rx, dy = (y - cy) / ry;
      const double r2 = dx * dx + dy * dy;
      std::array<double, 3> rgb;
      if (r2 < 1.0) rgb = hsv_to_rgb(skin_hue, 0.35 + 0.08 * t, 0.78 + 0.12 * t);
      else if (dy < -0.2 && r2 < 1.6) rgb = hsv_to_rgb(0.07, 0.5, 0.25 + 0.1 * t);  // hair
      else rgb = hsv_to_rgb(0.6, 0.1, bg_v + 0.1 * t);
      // Eyes and mouth.
      const auto dark = [&](double ex, double ey, double sx, double sy) {
        const double ux = (x - (cx + ex * rx)) / (sx * rx), uy = (y - (cy + ey * ry)) / (sy * ry);
        return ux * ux + uy * uy < 1.0;
      };
      if (dark(-0.38, -0.15, 0.16, 0.07) || dark(0.38, -0.15, 0.16, 0.07)) rgb = {0.15, 0.12, 0.1};
      if (dark(0.0, 0.45, 0.32, 0.06)) rgb = {0.55, 0.2, 0.2};
      for (int c = 0; c < 3; ++c) doc.at(x, y, c) = saturate_u8(255 * rgb[c]);
    }
  return doc;
}

struct OverlayState {
  double hue = 0.0;    // turns
  double alpha = 0.0;  // opacity
  double shift = 0.0;  // line pattern phase, radians
  double saturation = 1.0;
};

// Line pattern of the hologram: concentric rings crossed by diagonal bands, in [0, 1].
inline double overlay_mask(const Rect& r, double x, double y, double shift) {
  const double cx = r.x + r.width / 2.0, cy = r.y + r.height / 2.0;
  const double dx = x - cx, dy = y - cy;
  const double rad = std::sqrt(dx * dx + dy * dy);
  const double edge = std::clamp((r.width / 2.0 - rad) / 12.0, 0.0, 1.0);
  const double rings = 0.5 + 0.5 * std::cos(rad / 9.0 - shift);
  const double bands = 0.5 + 0.5 * std::cos((dx + dy) / 14.0 + 1.7 * shift);
  const double m = std::max(std::clamp((rings - 0.45) * 3.0, 0.0, 1.0), std::clamp((bands - 0.6) * 3.0, 0.0, 1.0));
  return m * edge;
}

inline void paint_overlay(Image& doc, const DocumentLayout& layout, const OverlayState& s, bool skip_face) {
  const auto& r = layout.overlay;
  for (int y = r.y; y < r.y + r.height; ++y)
    for (int x = r.x; x < r.x + r.width; ++x) {
      if (skip_face && layout.face.contains(x, y)) continue;
      const double m = overlay_mask(r, x + 0.5, y + 0.5, s.shift);
      if (m <= 0.0) continue;
      const auto rgb = hsv_to_rgb(s.hue + (x + y) / 700.0, s.saturation, 1.0);
      blend(doc, x, y, {255 * rgb[0], 255 * rgb[1], 255 * rgb[2]}, s.alpha * m);
    }
}

}  // namespace detail

/// Renders the frames of one planned clip. Rendering is a pure function of the plan.
class ClipRenderer {
 public:
  /// Clean documents shared between clips can be memoized through `cache`.
  using BaseCache = std::map<std::uint64_t, std::shared_ptr<const Image>>;

  ClipRenderer(const SynthSpec& spec, const SynthClipPlan& plan, BaseCache* cache = nullptr)
      : spec_(spec), plan_(plan) {
    layout_ = layout_for_model(plan.model);
    Rng rng(plan.seed);
    // Photo replacement substitutes a different face picture.
    const auto face_seed = derive_seed(derive_seed(0xFACEu, plan.model), plan.identity) ^
                           (plan.overlay == OverlayKind::photo_replacement ? 0x5EEDu : 0u);
    const bool printed = plan.record.label == Label::attack;
    const auto key = derive_seed(face_seed, 2 * static_cast<std::uint64_t>(plan.model) + printed);
    if (cache && cache->count(key)) {
      base_ = cache->at(key);
    } else {
      auto doc = detail::render_base_document(layout_, plan.model, face_seed);
      // Printed copies lose a little contrast.
      if (printed)
        for (auto& v : doc.pixels()) v = saturate_u8(0.94 * v + 8);
      base_ = std::make_shared<const Image>(std::move(doc));
      if (cache) (*cache)[key] = base_;
    }
    hue0_ = uniform(rng, 0.0, 1.0);
    hue_speed_ = spec.hue_speed * uniform(rng, 0.8, 1.25);
    alpha_phase_ = uniform(rng, 0.0, 2 * std::numbers::pi);
    shift_phase_ = uniform(rng, 0.0, 2 * std::numbers::pi);
    for (auto& p : pose_phase_) p = uniform(rng, 0.0, 2 * std::numbers::pi);
    for (auto& a : pose_amp_) a = uniform(rng, 0.5, 1.0);
    bg_hue_ = uniform(rng, 0.0, 1.0);
    bg_v_ = uniform(rng, 0.25, 0.6);
    glare_dir_ = uniform(rng, 0.0, 2 * std::numbers::pi);
    light_phase_ = uniform(rng, 0.0, 2 * std::numbers::pi);
    frozen_t_ = uniform(rng, 0.0, 20.0);
  }

  [[nodiscard]] detail::OverlayState overlay_state(double t) const {
    detail::OverlayState s;
    s.hue = hue0_ + hue_speed_ * t;
    s.alpha = 0.5 + 0.38 * std::sin(1.3 * t + alpha_phase_);
    s.shift = shift_phase_ + 0.9 * t;
    return s;
  }

  /// The document as printed/lit at frame t, before projection into the camera frame.
  [[nodiscard]] Image render_canonical(int t) const {
    Image doc = *base_;
    switch (plan_.overlay) {
      case OverlayKind::none: break;
      case OverlayKind::dynamic_holo: detail::paint_overlay(doc, layout_, overlay_state(t), false); break;
      case OverlayKind::photo_replacement: detail::paint_overlay(doc, layout_, overlay_state(t), true); break;
      case OverlayKind::static_holo: {
        auto s = overlay_state(frozen_t_);
        s.alpha = 0.6;
        detail::paint_overlay(doc, layout_, s, false);
        break;
      }
      case OverlayKind::desaturated_copy: {
        auto s = overlay_state(frozen_t_);
        s.alpha = 0.45;
        s.saturation = 0.35;
        detail::paint_overlay(doc, layout_, s, false);
        break;
      }
    }
    return doc;
  }

  /// Document corners in the camera frame at frame t (clockwise from top-left).
  [[nodiscard]] Quad quad(int t) const {
    const auto W = spec_.frame_size.width, H = spec_.frame_size.height;
    const double s = 0.78 * W / kCanonicalSize.width;
    const double a = s * kCanonicalSize.width / 2, b = s * kCanonicalSize.height / 2;
    const double cx = W / 2.0 + 0.05 * W * pose_amp_[0] * std::sin(0.7 * t + pose_phase_[0]);
    const double cy = H / 2.0 + 0.05 * H * pose_amp_[1] * std::sin(0.6 * t + pose_phase_[1]);
    const double theta = 0.07 * pose_amp_[2] * std::sin(0.5 * t + pose_phase_[2]);
    const double kx = 0.06 * pose_amp_[3] * std::sin(0.8 * t + pose_phase_[3]);
    const double ky = 0.06 * pose_amp_[4] * std::sin(0.9 * t + pose_phase_[4]);
    Quad q;
    const std::array<Point2, 4> local{Point2{-a, -b}, Point2{a, -b}, Point2{a, b}, Point2{-a, b}};
    for (int i = 0; i < 4; ++i) {
      const double k = 1.0 + kx * local[i].x / a + ky * local[i].y / b;
      const double x = local[i].x * k, y = local[i].y * k;
      q[i] = {cx + x * std::cos(theta) - y * std::sin(theta), cy + x * std::sin(theta) + y * std::cos(theta)};
    }
    return q;
  }

  /// Camera frame t: background, projected document, optional lighting nuisances and noise.
  [[nodiscard]] Image render_frame(int t) const {
    const auto doc = render_canonical(t);
    const auto q = quad(t);
    const auto frame_to_doc = Homography::from_points(rect_corners(kCanonicalSize), q).inverse();
    const auto W = spec_.frame_size.width, H = spec_.frame_size.height;
    Image out(W, H);
    const double gain = 1.0 + spec_.illumination * std::sin(1.1 * t + light_phase_);
    const std::array<double, 3> tint{1.0 + 0.4 * spec_.illumination * std::sin(0.7 * t + light_phase_), 1.0,
                                     1.0 - 0.4 * spec_.illumination * std::sin(0.7 * t + light_phase_)};
    const double gx = W * (0.5 + 0.45 * std::cos(glare_dir_) * std::sin(0.45 * t));
    const double gy = H * (0.5 + 0.45 * std::sin(glare_dir_) * std::sin(0.45 * t));
    const double gr = 0.12 * W;
    Rng noise_rng(derive_seed(plan_.seed, 1000 + static_cast<std::uint64_t>(t)));
    const auto bg = detail::hsv_to_rgb(bg_hue_, 0.3, bg_v_);
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) {
        const Point2 p = frame_to_doc.apply({x + 0.5, y + 0.5});
        double v[3];
        if (p.x >= 0 && p.y >= 0 && p.x <= doc.width() && p.y <= doc.height()) {
          sample_bilinear_rgb(doc, p.x - 0.5, p.y - 0.5, v);
        } else {
          const double w = 0.85 + 0.15 * std::sin(x * 0.05) * std::cos(y * 0.043);
          for (int c = 0; c < 3; ++c) v[c] = 255 * bg[c] * w;
        }
        if (spec_.illumination > 0)
          for (int c = 0; c < 3; ++c) v[c] *= gain * tint[c];
        if (spec_.glare > 0) {
          const double d2 = ((x - gx) * (x - gx) + (y - gy) * (y - gy)) / (gr * gr);
          const double g = spec_.glare * std::exp(-0.5 * d2);
          for (int c = 0; c < 3; ++c) v[c] += g * (255 - v[c]);
        }
        if (spec_.noise_sigma > 0)
          for (int c = 0; c < 3; ++c) v[c] += spec_.noise_sigma * normal(noise_rng);
        for (int c = 0; c < 3; ++c) out.at(x, y, c) = saturate_u8(v[c]);
      }
    return out;
  }

  [[nodiscard]] const DocumentLayout& layout() const { return layout_; }

 private:
  SynthSpec spec_;
  SynthClipPlan plan_;
  DocumentLayout layout_;
  std::shared_ptr<const Image> base_;
  double hue0_ = 0, hue_speed_ = 0, alpha_phase_ = 0, shift_phase_ = 0;
  std::array<double, 5> pose_phase_{}, pose_amp_{};
  double bg_hue_ = 0, bg_v_ = 0, glare_dir_ = 0, light_phase_ = 0, frozen_t_ = 0;
};

/// Renders every clip in memory (frames carried by FrameRecord::image).
inline std::vector<ClipRecord> generate_clips(const SynthSpec& spec, std::uint64_t seed) {
  std::vector<ClipRecord> out;
  ClipRenderer::BaseCache cache;
  for (const auto& plan : plan_clips(spec, seed)) {
    ClipRenderer r(spec, plan, &cache);
    auto clip = plan.record;
    for (int t = 0; t < spec.frames_per_clip; ++t)
      clip.frames.push_back({t, {}, r.quad(t), std::make_shared<const Image>(r.render_frame(t))});
    out.push_back(std::move(clip));
  }
  return out;
}

/// Writes the dataset tree: images/, markup/, rois.json and synth_spec.json.
inline void generate_dataset(const SynthSpec& spec, const std::filesystem::path& out_path, std::uint64_t seed) {
  namespace fs = std::filesystem;
  validate(spec);
  std::error_code ec;
  fs::create_directories(out_path, ec);
  if (ec || !fs::is_directory(out_path)) throw Error("cannot create output directory: " + out_path.string());
  {
    std::ofstream probe(out_path / "synth_spec.json");
    if (!probe) throw Error("output directory is not writable: " + out_path.string());
    auto j = to_json(spec);
    j["seed"] = seed;
    probe << j.dump(2) << '\n';
  }
  synth_roi_config(spec).save(out_path / "rois.json");
  ClipRenderer::BaseCache cache;
  for (const auto& plan : plan_clips(spec, seed)) {
    ClipRenderer r(spec, plan, &cache);
    const auto clip_dir = out_path / "images" / plan.record.clip_id;
    const auto markup = out_path / "markup" / (plan.record.clip_id + ".json");
    fs::create_directories(clip_dir);
    fs::create_directories(markup.parent_path());
    nlohmann::json m;
    m["fps"] = spec.fps;
    m["document_model"] = plan.record.document_model;
    m["identity"] = plan.record.identity;
    m["attack_kind"] = to_string(plan.record.attack_kind);
    auto& frames = m["frames"] = nlohmann::json::array();
    for (int t = 0; t < spec.frames_per_clip; ++t) {
      char name[32];
      std::snprintf(name, sizeof name, "%04d.%s", t, spec.image_format.c_str());
      write_image(clip_dir / name, r.render_frame(t));
      nlohmann::json quad = nlohmann::json::array();
      for (const auto& p : r.quad(t)) quad.push_back({p.x, p.y});
      frames.push_back({{"file", name}, {"quad", quad}});
    }
    std::ofstream out(markup);
    if (!out) throw Error("cannot write annotation: " + markup.string());
    out << m.dump(1) << '\n';
  }
}

}  // namespace holoverify
