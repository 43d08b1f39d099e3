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

// Weak-label triplet selection.
//
// Original clips: anchor and positive are frame t, the negative is frame t + 1 of the same
// clip (the hologram is assumed to have changed). Attack clips: anchor and positive are
// frames of one clip, the negative is a frame of another attack clip of the same identity
// (a different, but static, hologram imitation). Photo-replacement clips never take part.

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "holoverify/augment.hpp"
#include "holoverify/catalog.hpp"
#include "holoverify/rng.hpp"

namespace holoverify {

struct FrameRef {
  std::string clip_id;
  int frame = 0;
  friend bool operator==(const FrameRef&, const FrameRef&) = default;
};

struct TripletProvenance {
  std::string document_model;
  std::string identity;
  FrameRef anchor, positive, negative;
};

/// Un-augmented triplet of kRoiSide ROI images.
struct RawTriplet {
  Image anchor, positive, negative;
  Label source_label = Label::original;
  TripletProvenance provenance;
};

/// Augmented, normalized network inputs.
struct Triplet {
  PlanarImage anchor, positive, negative;
  Label source_label = Label::original;
  TripletProvenance provenance;
};

inline RawTriplet sample_original_triplet(const PreparedClip& clip, int t) {
  if (clip.record.label != Label::original) throw Error(clip.record.clip_id + ": not an original clip");
  const int n = static_cast<int>(clip.rois.size());
  if (n < 2) throw Error("clip too short: " + clip.record.clip_id);
  if (t < 0 || t + 1 >= n) throw Error("frame index out of range for original triplet");
  const auto& id = clip.record.clip_id;
  return {clip.rois[t], clip.rois[t], clip.rois[t + 1], Label::original,
          {clip.record.document_model, clip.record.identity, {id, t}, {id, t}, {id, t + 1}}};
}

/// Draws t uniformly over the valid indices.
inline RawTriplet sample_original_triplet(const PreparedClip& clip, Rng& rng) {
  if (clip.rois.size() < 2) throw Error("clip too short: " + clip.record.clip_id);
  return sample_original_triplet(clip, static_cast<int>(uniform_index(rng, clip.rois.size() - 1)));
}

namespace detail {

inline void check_attack_group(std::span<const PreparedClip* const> clips) {
  if (clips.size() < 2) throw Error("insufficient clips for identity");
  for (const auto* c : clips) {
    if (c->record.label != Label::attack) throw Error(c->record.clip_id + ": not an attack clip");
    if (c->record.is_photo_replacement())
      throw Error(c->record.clip_id + ": photo-replacement clips cannot form triplets");
    if (c->rois.empty()) throw Error(c->record.clip_id + ": clip has no frames");
    if (c->record.identity != clips.front()->record.identity ||
        c->record.document_model != clips.front()->record.document_model)
      throw Error("attack triplet clips do not share an identity");
  }
}

}  // namespace detail

/// Attack triplet anchored on clips[anchor_clip]; the negative clip is drawn uniformly
/// from the others.
inline RawTriplet sample_attack_triplet(std::span<const PreparedClip* const> clips, std::size_t anchor_clip,
                                        Rng& rng) {
  detail::check_attack_group(clips);
  const auto& a = *clips[anchor_clip];
  std::size_t neg = uniform_index(rng, clips.size() - 1);
  if (neg >= anchor_clip) ++neg;
  const auto& n = *clips[neg];
  const int fa = static_cast<int>(uniform_index(rng, a.rois.size()));
  const int fp = static_cast<int>(uniform_index(rng, a.rois.size()));
  const int fn = static_cast<int>(uniform_index(rng, n.rois.size()));
  return {a.rois[fa], a.rois[fp], n.rois[fn], Label::attack,
          {a.record.document_model, a.record.identity, {a.record.clip_id, fa}, {a.record.clip_id, fp},
           {n.record.clip_id, fn}}};
}

inline RawTriplet sample_attack_triplet(std::span<const PreparedClip* const> clips, Rng& rng) {
  detail::check_attack_group(clips);
  return sample_attack_triplet(clips, uniform_index(rng, clips.size()), rng);
}

/// Shared geometric draw, then independent crop / blur / jitter per image.
inline Triplet augment_triplet(const RawTriplet& t, const AugConfig& cfg, Rng& rng) {
  Triplet out{{}, {}, {}, t.source_label, t.provenance};
  if (!cfg.enabled) {
    out.anchor = eval_transform(t.anchor, cfg);
    out.positive = eval_transform(t.positive, cfg);
    out.negative = eval_transform(t.negative, cfg);
    return out;
  }
  const auto geo = draw_geometric(cfg, rng);
  out.anchor = augment_image(apply_geometric(t.anchor, geo), cfg, rng);
  out.positive = augment_image(apply_geometric(t.positive, geo), cfg, rng);
  out.negative = augment_image(apply_geometric(t.negative, geo), cfg, rng);
  return out;
}

// ---------------------------------------------------------------------------
// Epochs

/// One triplet per eligible clip per epoch: every original clip with two or more frames,
/// and every attack clip whose identity has at least one other eligible attack clip.
struct TripletSource {
  Label kind = Label::original;
  std::size_t clip = 0;                 // index of the anchor clip in the training set
  std::vector<std::size_t> group;       // attack sources: all clips of the identity
  std::size_t position_in_group = 0;    // attack sources: index of `clip` within `group`
};

inline std::vector<TripletSource> triplet_sources(std::span<const PreparedClip> train) {
  std::vector<TripletSource> out;
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> attack_groups;
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto& r = train[i].record;
    if (r.label == Label::original) {
      if (train[i].rois.size() >= 2) out.push_back({Label::original, i, {}, 0});
    } else if (!r.is_photo_replacement() && !train[i].rois.empty()) {
      attack_groups[{r.document_model, r.identity}].push_back(i);
    }
  }
  for (const auto& [key, group] : attack_groups) {
    if (group.size() < 2) continue;
    for (std::size_t k = 0; k < group.size(); ++k) out.push_back({Label::attack, group[k], group, k});
  }
  return out;
}

/// Deterministic stream of augmented triplet batches for one epoch. The order of sources
/// is fixed by the epoch seed; every source draws from its own derived stream.
class EpochStream {
 public:
  EpochStream(std::span<const PreparedClip> train, AugConfig cfg, std::size_t batch_size,
              std::uint64_t epoch_seed)
      : train_(train), cfg_(std::move(cfg)), batch_size_(batch_size), seed_(epoch_seed) {
    if (train.empty()) throw Error("empty training set");
    if (batch_size == 0) throw Error("batch size must be positive");
    validate(cfg_);
    sources_ = triplet_sources(train);
    if (sources_.empty()) throw Error("training set holds no eligible triplet source");
    Rng order_rng(derive_seed(seed_, 0));
    shuffle(sources_, order_rng);
  }

  [[nodiscard]] std::size_t num_sources() const { return sources_.size(); }
  [[nodiscard]] std::size_t num_batches() const { return (sources_.size() + batch_size_ - 1) / batch_size_; }
  [[nodiscard]] const std::vector<TripletSource>& sources() const { return sources_; }

  /// Builds the triplet for source `i` of this epoch.
  [[nodiscard]] Triplet make(std::size_t i) const {
    Rng rng(derive_seed(seed_, i + 1));
    const auto& s = sources_[i];
    RawTriplet raw;
    if (s.kind == Label::original) {
      raw = sample_original_triplet(train_[s.clip], rng);
    } else {
      std::vector<const PreparedClip*> group;
      for (auto idx : s.group) group.push_back(&train_[idx]);
      raw = sample_attack_triplet(group, s.position_in_group, rng);
    }
    return augment_triplet(raw, cfg_, rng);
  }

  std::optional<std::vector<Triplet>> next() {
    if (cursor_ >= sources_.size()) return std::nullopt;
    std::vector<Triplet> batch;
    const auto end = std::min(sources_.size(), cursor_ + batch_size_);
    for (; cursor_ < end; ++cursor_) batch.push_back(make(cursor_));
    return batch;
  }

 private:
  std::span<const PreparedClip> train_;
  AugConfig cfg_;
  std::size_t batch_size_;
  std::uint64_t seed_;
  std::vector<TripletSource> sources_;
  std::size_t cursor_ = 0;
};

inline EpochStream build_epoch(std::span<const PreparedClip> train, const AugConfig& cfg, std::size_t batch_size,
                               std::uint64_t epoch_seed) {
  return EpochStream(train, cfg, batch_size, epoch_seed);
}

}  // namespace holoverify
