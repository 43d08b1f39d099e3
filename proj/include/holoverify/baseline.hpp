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

// Handcrafted "no tracking" hologram detector used as the comparison baseline.
//
// Each pixel whose temporal colour statistic over the trailing window exceeds S_thresh is
// flagged as holographic; the clip is accepted as original once the flagged fraction
// reaches h_thresh. The default statistic is the max - min range of the HSV saturation
// channel; any other per-pixel statistic can be plugged in.

#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "holoverify/catalog.hpp"
#include "holoverify/decision.hpp"
#include "holoverify/metrics.hpp"

namespace holoverify {

struct BaselineParams {
  double s_thresh = 50.0;
  double h_thresh = 0.01;
  int window = 0;  // trailing window T in frames; 0 uses every frame seen so far
  int min_buffer = kDefaultMinBuffer;
  Size working_size = kCanonicalSize;
};

inline void validate(const BaselineParams& p) {
  if (!(p.s_thresh > 0)) throw Error("S_thresh must be positive");
  if (!(p.h_thresh > 0 && p.h_thresh < 1)) throw Error("h_thresh must lie in (0, 1)");
  if (p.window != 0 && p.window < 2) throw Error("window T must be at least 2 frames");
}

/// Per-pixel binary map, row-major.
struct BinaryMap {
  Size size;
  std::vector<std::uint8_t> bits;

  [[nodiscard]] std::size_t count() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
  }
  [[nodiscard]] double ratio() const {
    return bits.empty() ? 0.0 : static_cast<double>(count()) / static_cast<double>(bits.size());
  }
};

/// Per-pixel temporal statistic over a window of equally sized frames.
using TemporalStatistic = std::function<std::vector<double>(std::span<const Image>)>;

inline std::vector<std::uint8_t> saturation_plane(const Image& img) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(img.width()) * img.height());
  std::size_t k = 0;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      out[k++] = saturation(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
  return out;
}

inline std::vector<double> saturation_range(std::span<const Image> frames) {
  const auto n = static_cast<std::size_t>(frames.front().width()) * frames.front().height();
  std::vector<std::uint8_t> lo(n, 255), hi(n, 0);
  for (const auto& f : frames) {
    const auto s = saturation_plane(f);
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = std::min(lo[i], s[i]);
      hi[i] = std::max(hi[i], s[i]);
    }
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = hi[i] - lo[i];
  return out;
}

inline BinaryMap holographic_map(std::span<const Image> frames, double s_thresh,
                                 const TemporalStatistic& statistic = saturation_range) {
  if (frames.size() < 2) throw Error("holographic_map needs at least 2 frames");
  for (const auto& f : frames)
    if (f.size() != frames.front().size()) throw Error("frames have mismatched sizes");
  const auto stat = statistic(frames);
  BinaryMap map{frames.front().size(), std::vector<std::uint8_t>(stat.size())};
  for (std::size_t i = 0; i < stat.size(); ++i) map.bits[i] = stat[i] > s_thresh ? 1 : 0;
  return map;
}

/// Flagged ratio evaluated after each frame i >= 1 over frames [i - T + 1, i]
/// (or [0, i] when T = 0). Entry i holds the ratio after frame i; entry 0 is 0.
inline std::vector<double> running_ratios(std::span<const Image> frames, double s_thresh, int window) {
  std::vector<double> out(frames.size(), 0.0);
  if (frames.empty()) return out;
  const auto n = static_cast<std::size_t>(frames.front().width()) * frames.front().height();
  std::vector<std::vector<std::uint8_t>> planes;
  planes.reserve(frames.size());
  for (const auto& f : frames) {
    if (f.size() != frames.front().size()) throw Error("frames have mismatched sizes");
    planes.push_back(saturation_plane(f));
  }
  std::vector<std::uint8_t> lo(planes[0]), hi(planes[0]);
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (window == 0) {
      for (std::size_t p = 0; p < n; ++p) {
        lo[p] = std::min(lo[p], planes[i][p]);
        hi[p] = std::max(hi[p], planes[i][p]);
      }
    } else {
      const std::size_t start = i + 1 >= static_cast<std::size_t>(window) ? i + 1 - window : 0;
      lo = planes[start];
      hi = planes[start];
      for (std::size_t j = start + 1; j <= i; ++j)
        for (std::size_t p = 0; p < n; ++p) {
          lo[p] = std::min(lo[p], planes[j][p]);
          hi[p] = std::max(hi[p], planes[j][p]);
        }
    }
    std::size_t flagged = 0;
    for (std::size_t p = 0; p < n; ++p) flagged += (hi[p] - lo[p]) > s_thresh;
    out[i] = static_cast<double>(flagged) / static_cast<double>(n);
  }
  return out;
}

struct BaselineDecision {
  Label verdict = Label::attack;
  std::size_t stop_index = 0;
  double score = 0.0;  // flagged ratio at the stopping frame (whole: over the full clip)
};

inline BaselineDecision baseline_decide_from_ratios(std::span<const double> ratios,
                                                    const BaselineParams& params, Strategy strategy) {
  if (ratios.empty()) throw Error("baseline_decide on an empty clip");
  const std::size_t last = ratios.size() - 1;
  if (strategy == Strategy::whole) {
    const double r = ratios[last];
    return {r >= params.h_thresh ? Label::original : Label::attack, last, r};
  }
  const auto first_eval = static_cast<std::size_t>(std::max(params.min_buffer, 1) - 1);
  for (std::size_t i = first_eval; i < ratios.size(); ++i)
    if (ratios[i] >= params.h_thresh) return {Label::original, i, ratios[i]};
  if (last < first_eval)
    return {ratios[last] >= params.h_thresh ? Label::original : Label::attack, last, ratios[last]};
  return {Label::attack, last, ratios[last]};
}

/// Decides one clip whose frames are already rectified to a common size.
inline BaselineDecision baseline_decide(std::span<const Image> frames, const BaselineParams& params,
                                        Strategy strategy) {
  validate(params);
  // The whole-clip decision is a single evaluation over every frame.
  const auto ratios = running_ratios(frames, params.s_thresh, strategy == Strategy::whole ? 0 : params.window);
  return baseline_decide_from_ratios(ratios, params, strategy);
}

/// Attack-likelihood score used for ROC analysis: the fraction of cumulative evaluation
/// steps at which the clip is *not* yet accepted. 1 for a clip never accepted, smaller the
/// earlier (and more persistently) the flagged ratio clears h_thresh.
inline double baseline_attack_score(std::span<const double> ratios, const BaselineParams& params) {
  const auto first_eval = static_cast<std::size_t>(std::max(params.min_buffer, 1) - 1);
  const std::size_t begin = std::min(first_eval, ratios.size() - 1);
  std::size_t steps = 0, below = 0;
  for (std::size_t i = begin; i < ratios.size(); ++i) {
    ++steps;
    below += ratios[i] < params.h_thresh;
  }
  return static_cast<double>(below) / static_cast<double>(steps);
}

// ---------------------------------------------------------------------------
// Grid search

struct BaselineClip {
  std::string clip_id;
  Label label = Label::attack;
  std::vector<Image> frames;
};

struct SweepEntry {
  double s_thresh = 0.0;
  double h_thresh = 0.0;
  int window = 0;
  double auc = 0.0;
  double fscore = 0.0;  // cumulative-strategy F-score of the thresholded verdicts
};

struct SweepTable {
  std::vector<SweepEntry> entries;
  std::size_t best_auc = 0;
  std::size_t best_fscore = 0;
};

inline SweepTable parameter_sweep(std::span<const BaselineClip> clips, std::span<const double> s_grid,
                                  std::span<const double> h_grid, std::span<const int> t_grid,
                                  int min_buffer = kDefaultMinBuffer) {
  SweepTable table;
  std::vector<Label> labels;
  for (const auto& c : clips) labels.push_back(c.label);
  for (int t : t_grid)
    for (double s : s_grid) {
      std::vector<std::vector<double>> ratios;
      ratios.reserve(clips.size());
      for (const auto& c : clips) ratios.push_back(running_ratios(c.frames, s, t));
      for (double h : h_grid) {
        BaselineParams p{s, h, t, min_buffer, kCanonicalSize};
        validate(p);
        std::vector<double> scores;
        std::vector<Label> verdicts;
        for (const auto& r : ratios) {
          scores.push_back(baseline_attack_score(r, p));
          verdicts.push_back(baseline_decide_from_ratios(r, p, Strategy::cumulative).verdict);
        }
        table.entries.push_back({s, h, t, roc_auc(scores, labels), f_score(verdicts, labels).fscore});
      }
    }
  for (std::size_t i = 1; i < table.entries.size(); ++i) {
    if (table.entries[i].auc > table.entries[table.best_auc].auc) table.best_auc = i;
    if (table.entries[i].fscore > table.entries[table.best_fscore].fscore) table.best_fscore = i;
  }
  return table;
}

/// Picks the grid point with the best F-score for `strategy` on a labelled calibration set.
inline BaselineParams calibrate_baseline(std::span<const BaselineClip> clips, std::span<const double> s_grid,
                                         std::span<const double> h_grid, std::span<const int> t_grid,
                                         Strategy strategy, double* best_f = nullptr) {
  std::vector<Label> labels;
  for (const auto& c : clips) labels.push_back(c.label);
  BaselineParams best;
  double best_score = -1.0;
  for (int t : t_grid)
    for (double s : s_grid) {
      std::vector<std::vector<double>> ratios;
      for (const auto& c : clips)
        ratios.push_back(running_ratios(c.frames, s, strategy == Strategy::whole ? 0 : t));
      for (double h : h_grid) {
        BaselineParams p{s, h, t, kDefaultMinBuffer, kCanonicalSize};
        std::vector<Label> verdicts;
        for (const auto& r : ratios) verdicts.push_back(baseline_decide_from_ratios(r, p, strategy).verdict);
        const double f = f_score(verdicts, labels).fscore;
        if (f > best_score) {
          best_score = f;
          best = p;
        }
      }
    }
  if (best_f) *best_f = best_score;
  return best;
}

/// Rectifies every frame to the working size and optionally keeps only the model ROI
/// (at working resolution, no resize).
inline BaselineClip prepare_baseline_clip(const ClipRecord& clip, const RoiConfig* rois,
                                          Size working = kCanonicalSize) {
  BaselineClip out{clip.clip_id, clip.label, {}};
  for (const auto& f : clip.frames) {
    auto rect = rectify_frame(f, working);
    if (rois) {
      auto spec = rois->get(clip.document_model);
      if (spec.canonical_size != working) throw Error("ROI config canonical size differs from working size");
      rect = crop(rect, spec.rect);
    }
    out.frames.push_back(std::move(rect));
  }
  return out;
}

}  // namespace holoverify
