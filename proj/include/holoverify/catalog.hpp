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

// Dataset ingestion: clip records, quad rectification, ROI extraction, frame-rate
// normalization.
//
// On-disk layout understood by scan_dataset (MIDV-Holo and synthetic trees):
//
//   <root>/images/origins/<model>/<clip>/<frame>.{png,jpg}
//   <root>/images/fraud/<attack_kind>/<model>/<clip>/<frame>.{png,jpg}
//   <root>/markup/<same relative clip path>.json
//
// and for MIDV-2020 clips:
//
//   <root>/images/<model>/<clip>/<frame>.jpg
//   <root>/annotations/<model>/<clip>.json        (VIA project export)

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "holoverify/geometry.hpp"
#include "holoverify/image.hpp"

namespace holoverify {

inline constexpr Size kCanonicalSize{1123, 709};
inline constexpr int kRoiSide = 256;

enum class Label { original, attack };

enum class AttackKind { none, copy_without_holo, pseudo_holo_copy, photo_holo_copy, photo_replacement };

inline std::string_view to_string(Label l) { return l == Label::original ? "original" : "attack"; }

inline std::string_view to_string(AttackKind k) {
  switch (k) {
    case AttackKind::none: return "none";
    case AttackKind::copy_without_holo: return "copy_without_holo";
    case AttackKind::pseudo_holo_copy: return "pseudo_holo_copy";
    case AttackKind::photo_holo_copy: return "photo_holo_copy";
    case AttackKind::photo_replacement: return "photo_replacement";
  }
  return "none";
}

inline Label parse_label(std::string_view s) {
  if (s == "original") return Label::original;
  if (s == "attack") return Label::attack;
  throw Error("unknown label: " + std::string(s));
}

inline std::optional<AttackKind> parse_attack_kind(std::string_view s) {
  for (auto k : {AttackKind::none, AttackKind::copy_without_holo, AttackKind::pseudo_holo_copy,
                 AttackKind::photo_holo_copy, AttackKind::photo_replacement})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

struct FrameRecord {
  int index = 0;
  std::filesystem::path image_path;
  Quad quad{};
  /// In-memory raster; when set it takes precedence over image_path.
  std::shared_ptr<const Image> image;
};

struct ClipRecord {
  std::string clip_id;
  std::string document_model;
  std::string identity;
  Label label = Label::original;
  AttackKind attack_kind = AttackKind::none;
  double fps = 5.0;
  std::vector<FrameRecord> frames;

  [[nodiscard]] bool is_photo_replacement() const {
    return attack_kind == AttackKind::photo_replacement;
  }
};

/// Throws when a record breaks the ClipRecord invariants.
inline void validate(const ClipRecord& clip) {
  if ((clip.label == Label::original) != (clip.attack_kind == AttackKind::none))
    throw Error(clip.clip_id + ": label and attack kind disagree");
  if (!(clip.fps > 0)) throw Error(clip.clip_id + ": fps must be positive");
  for (std::size_t i = 1; i < clip.frames.size(); ++i)
    if (clip.frames[i].index <= clip.frames[i - 1].index)
      throw Error(clip.clip_id + ": frames are not strictly ordered");
}

inline Image load_frame(const FrameRecord& f) {
  if (f.image) return *f.image;
  return read_image(f.image_path);
}

// ---------------------------------------------------------------------------
// ROI configuration

struct RoiSpec {
  std::string document_model;
  Rect rect;
  Size canonical_size = kCanonicalSize;
};

class RoiConfig {
 public:
  static constexpr int kVersion = 1;

  RoiConfig() = default;
  explicit RoiConfig(Size canonical) : canonical_(canonical) {}

  void set(const std::string& model, Rect r) {
    if (r.width <= 0 || r.height <= 0)
      throw Error("ROI for '" + model + "' has an empty rectangle");
    if (!r.inside(canonical_))
      throw Error("ROI for '" + model + "' lies outside the canonical document");
    rects_[model] = r;
  }

  [[nodiscard]] RoiSpec get(const std::string& model) const {
    auto it = rects_.find(model);
    if (it == rects_.end()) throw Error("no ROI configured for document model '" + model + "'");
    return {model, it->second, canonical_};
  }

  [[nodiscard]] bool contains(const std::string& model) const { return rects_.count(model) != 0; }
  [[nodiscard]] Size canonical_size() const { return canonical_; }
  [[nodiscard]] const std::map<std::string, Rect>& rects() const { return rects_; }

  [[nodiscard]] nlohmann::json to_json() const {
    nlohmann::json j;
    j["version"] = kVersion;
    j["canonical_size"] = {{"width", canonical_.width}, {"height", canonical_.height}};
    auto& rois = j["rois"] = nlohmann::json::object();
    for (const auto& [model, r] : rects_)
      rois[model] = {{"x", r.x}, {"y", r.y}, {"w", r.width}, {"h", r.height}};
    return j;
  }

  static RoiConfig from_json(const nlohmann::json& j) {
    if (j.value("version", 0) != kVersion) throw Error("unsupported ROI config version");
    Size canonical = kCanonicalSize;
    if (j.contains("canonical_size"))
      canonical = {j["canonical_size"].at("width").get<int>(),
                   j["canonical_size"].at("height").get<int>()};
    RoiConfig cfg(canonical);
    for (const auto& [model, r] : j.at("rois").items())
      cfg.set(model, Rect{r.at("x").get<int>(), r.at("y").get<int>(), r.at("w").get<int>(),
                          r.at("h").get<int>()});
    return cfg;
  }

  static RoiConfig load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open ROI config: " + path.string());
    try {
      return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw Error("malformed ROI config " + path.string() + ": " + e.what());
    }
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write ROI config: " + path.string());
    out << to_json().dump(2) << '\n';
  }

 private:
  Size canonical_ = kCanonicalSize;
  std::map<std::string, Rect> rects_;
};

// ---------------------------------------------------------------------------
// Geometry operations

/// Perspective-unwarps `image` so that `quad` lands on the corners of a `canonical` raster.
inline Image rectify_frame(const Image& image, const Quad& quad, Size canonical = kCanonicalSize) {
  if (std::abs(signed_area(quad)) < 1.0) throw Error("degenerate quad");
  if (!is_simple(quad)) throw Error("quad is not a simple polygon");
  const auto canonical_to_source = Homography::from_points(rect_corners(canonical), quad);
  return warp_perspective(image, canonical_to_source, canonical);
}

/// Only the `region` window of rectify_frame(image, quad, canonical), pixel-identical to
/// cropping the full rectification.
inline Image rectify_region(const Image& image, const Quad& quad, Size canonical, Rect region) {
  if (std::abs(signed_area(quad)) < 1.0) throw Error("degenerate quad");
  if (!is_simple(quad)) throw Error("quad is not a simple polygon");
  if (!region.inside(canonical)) throw Error("region outside the canonical raster");
  const auto canonical_to_source = Homography::from_points(rect_corners(canonical), quad);
  return warp_perspective(image, canonical_to_source, {region.width, region.height}, 0,
                          {static_cast<double>(region.x), static_cast<double>(region.y)});
}

inline Image rectify_frame(const FrameRecord& frame, Size canonical = kCanonicalSize) {
  return rectify_frame(load_frame(frame), frame.quad, canonical);
}

/// Crops the model ROI out of a rectified document and resizes it to kRoiSide squared.
inline Image extract_roi(const Image& rectified, const RoiSpec& roi) {
  if (rectified.size() != roi.canonical_size)
    throw Error("rectified image does not have the canonical size");
  return resize(crop(rectified, roi.rect), {kRoiSide, kRoiSide});
}

/// Keeps frames 0, k, 2k, ... where k = source_fps / target_fps.
template <typename T>
std::vector<T> resample_fps(const std::vector<T>& frames, double source_fps, double target_fps) {
  if (!(target_fps > 0) || source_fps < target_fps)
    throw Error("unsupported resampling ratio");
  const double ratio = source_fps / target_fps;
  const auto k = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(k)) > 1e-9) throw Error("unsupported resampling ratio");
  std::vector<T> out;
  out.reserve(frames.size() / k + 1);
  for (std::size_t i = 0; i < frames.size(); i += k) out.push_back(frames[i]);
  return out;
}

inline ClipRecord resample_clip(ClipRecord clip, double target_fps) {
  clip.frames = resample_fps(clip.frames, clip.fps, target_fps);
  clip.fps = target_fps;
  return clip;
}

/// A clip whose frames have been rectified and reduced to the kRoiSide ROI.
struct PreparedClip {
  ClipRecord record;
  std::vector<Image> rois;
};

inline PreparedClip prepare_clip(const ClipRecord& clip, const RoiConfig& rois) {
  PreparedClip out{clip, {}};
  const auto spec = rois.get(clip.document_model);
  out.rois.reserve(clip.frames.size());
  for (const auto& f : clip.frames)
    out.rois.push_back(
        resize(rectify_region(load_frame(f), f.quad, spec.canonical_size, spec.rect), {kRoiSide, kRoiSide}));
  out.record.frames.clear();
  for (const auto& f : clip.frames) out.record.frames.push_back({f.index, f.image_path, f.quad, {}});
  return out;
}

inline std::vector<PreparedClip> prepare_clips(const std::vector<ClipRecord>& clips,
                                               const RoiConfig& rois) {
  std::vector<PreparedClip> out;
  out.reserve(clips.size());
  for (const auto& c : clips) out.push_back(prepare_clip(c, rois));
  return out;
}

// ---------------------------------------------------------------------------
// Directory scanning

enum class DatasetKind { midv_holo, midv_2020, synthetic };

inline DatasetKind parse_dataset_kind(std::string_view s) {
  if (s == "midv_holo") return DatasetKind::midv_holo;
  if (s == "midv_2020") return DatasetKind::midv_2020;
  if (s == "synthetic") return DatasetKind::synthetic;
  throw Error("unknown dataset kind: " + std::string(s));
}

struct ScanReport {
  std::vector<std::string> warnings;
  /// Clip count per "model/identity/attack_kind".
  std::map<std::string, int> counts;
};

namespace detail {

inline bool is_image_file(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".tif" || ext == ".tiff";
}

inline std::vector<std::filesystem::path> sorted_children(const std::filesystem::path& dir,
                                                          bool directories) {
  std::vector<std::filesystem::path> out;
  if (!std::filesystem::is_directory(dir)) return out;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (directories ? e.is_directory() : (e.is_regular_file() && is_image_file(e.path())))
      out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

inline nlohmann::json read_json(const std::filesystem::path& p, const std::string& clip_path) {
  std::ifstream in(p);
  if (!in) throw Error("missing annotation file for clip " + clip_path + ": " + p.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("cannot parse annotation file " + p.string() + ": " + e.what());
  }
}

inline Quad quad_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) throw Error("quad must have 4 vertices");
  Quad q{};
  for (int i = 0; i < 4; ++i) q[i] = {j[i].at(0).get<double>(), j[i].at(1).get<double>()};
  return q;
}

// Accepts either {"frames": [{"file", "quad"}, ...]} or an object keyed by frame file name
// whose values carry "quad" directly or under "document".
inline std::map<std::string, Quad> holo_quads(const nlohmann::json& markup) {
  std::map<std::string, Quad> out;
  if (markup.contains("frames")) {
    for (const auto& f : markup["frames"])
      out[f.at("file").get<std::string>()] = quad_from_json(f.at("quad"));
    return out;
  }
  for (const auto& [name, v] : markup.items()) {
    if (!v.is_object()) continue;
    if (v.contains("quad")) out[name] = quad_from_json(v["quad"]);
    else if (v.contains("document") && v["document"].contains("quad"))
      out[name] = quad_from_json(v["document"]["quad"]);
  }
  return out;
}

inline std::map<std::string, Quad> via_quads(const nlohmann::json& via) {
  std::map<std::string, Quad> out;
  const auto& meta = via.contains("_via_img_metadata") ? via["_via_img_metadata"] : via;
  for (const auto& [key, entry] : meta.items()) {
    if (!entry.is_object() || !entry.contains("regions")) continue;
    for (const auto& region : entry["regions"]) {
      const auto& shape = region.at("shape_attributes");
      if (!shape.contains("all_points_x") || shape["all_points_x"].size() != 4) continue;
      const auto field = region.value("region_attributes", nlohmann::json::object())
                             .value("field_name", std::string("doc_quad"));
      if (field != "doc_quad") continue;
      Quad q{};
      for (int i = 0; i < 4; ++i)
        q[i] = {shape["all_points_x"][i].get<double>(), shape["all_points_y"][i].get<double>()};
      out[entry.at("filename").get<std::string>()] = q;
      break;
    }
  }
  return out;
}

// Identity from "<model>_<identity>[_<take>]" clip directory names.
inline std::string identity_from_clip_name(const std::string& model, const std::string& clip) {
  std::string rest = clip;
  if (rest.rfind(model + "_", 0) == 0) rest = rest.substr(model.size() + 1);
  const auto us = rest.find('_');
  return us == std::string::npos ? rest : rest.substr(0, us);
}

inline ClipRecord read_clip(const std::filesystem::path& clip_dir, const std::filesystem::path& markup,
                            std::string clip_id, const std::string& model, AttackKind kind,
                            DatasetKind dataset) {
  const auto markup_json = read_json(markup, clip_dir.string());
  const auto quads = dataset == DatasetKind::midv_2020 ? via_quads(markup_json) : holo_quads(markup_json);

  ClipRecord clip;
  clip.clip_id = std::move(clip_id);
  clip.document_model = markup_json.value("document_model", model);
  clip.attack_kind = kind;
  clip.label = kind == AttackKind::none ? Label::original : Label::attack;
  clip.fps = markup_json.value("fps", dataset == DatasetKind::midv_2020 ? 10.0 : 5.0);
  const auto clip_name = clip_dir.filename().string();
  clip.identity = markup_json.contains("identity")
                      ? markup_json["identity"].get<std::string>()
                      : (dataset == DatasetKind::midv_2020 ? clip_name
                                                           : identity_from_clip_name(model, clip_name));
  int index = 0;
  for (const auto& img : sorted_children(clip_dir, false)) {
    const auto it = quads.find(img.filename().string());
    if (it == quads.end())
      throw Error("missing quad annotation for frame " + img.string() + " in " + markup.string());
    clip.frames.push_back({index++, img, order_clockwise_from_top_left(it->second), {}});
  }
  validate(clip);
  return clip;
}

}  // namespace detail

/// Enumerates every clip under `root`, sorted by clip_id.
inline std::vector<ClipRecord> scan_dataset(const std::filesystem::path& root, DatasetKind kind,
                                            ScanReport* report = nullptr) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw Error("dataset root does not exist: " + root.string());
  ScanReport local;
  ScanReport& rep = report ? *report : local;
  std::vector<ClipRecord> clips;

  const auto images = root / "images";
  auto add_model_tree = [&](const fs::path& tree, const std::string& rel_prefix, AttackKind attack) {
    for (const auto& model_dir : detail::sorted_children(tree, true)) {
      const auto model = model_dir.filename().string();
      for (const auto& clip_dir : detail::sorted_children(model_dir, true)) {
        const auto rel = rel_prefix + model + "/" + clip_dir.filename().string();
        const auto markup = kind == DatasetKind::midv_2020
                                ? root / "annotations" / model / (clip_dir.filename().string() + ".json")
                                : root / "markup" / (rel + ".json");
        clips.push_back(detail::read_clip(clip_dir, markup, rel, model, attack, kind));
      }
    }
  };

  if (kind == DatasetKind::midv_2020) {
    add_model_tree(images, "", AttackKind::copy_without_holo);
  } else {
    add_model_tree(images / "origins", "origins/", AttackKind::none);
    for (const auto& attack_dir : detail::sorted_children(images / "fraud", true)) {
      const auto name = attack_dir.filename().string();
      const auto attack = parse_attack_kind(name);
      if (!attack || *attack == AttackKind::none)
        throw Error("unknown attack folder: " + attack_dir.string());
      add_model_tree(attack_dir, "fraud/" + name + "/", *attack);
    }
  }

  std::sort(clips.begin(), clips.end(),
            [](const ClipRecord& a, const ClipRecord& b) { return a.clip_id < b.clip_id; });
  if (clips.empty()) rep.warnings.push_back("no clips found under " + root.string());
  for (const auto& c : clips)
    ++rep.counts[c.document_model + "/" + c.identity + "/" + std::string(to_string(c.attack_kind))];
  return clips;
}

}  // namespace holoverify
