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

// Result tables: the baseline AUC grid, the method comparison and the ablation matrix,
// rendered as aligned text, CSV and JSON.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "holoverify/baseline.hpp"
#include "holoverify/metrics.hpp"

namespace holoverify {

struct ReportTable {
  std::string title;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  nlohmann::json meta = nlohmann::json::object();  // seed, config hash, ...
};

/// "90 ± 2" from fractions in [0, 1]; integers only at this point.
inline std::string percent_cell(const MeanStd& m) {
  std::ostringstream s;
  s << std::lround(100.0 * m.mean);
  if (m.n > 1) s << " ± " << std::lround(100.0 * m.stddev);
  return s.str();
}

inline std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string to_text(const ReportTable& t) {
  // Width in code points so the ± sign does not skew alignment.
  auto width = [](const std::string& s) {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
  };
  std::vector<std::size_t> w(t.header.size(), 0);
  auto grow = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size() && i < w.size(); ++i) w[i] = std::max(w[i], width(row[i]));
  };
  grow(t.header);
  for (const auto& r : t.rows) grow(r);
  std::ostringstream out;
  if (!t.title.empty()) out << t.title << '\n';
  auto line = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      const std::string cell = i < row.size() ? row[i] : "";
      out << (i == 0 ? "| " : " | ") << cell << std::string(w[i] - width(cell), ' ');
    }
    out << " |\n";
  };
  line(t.header);
  for (std::size_t i = 0; i < w.size(); ++i) out << (i == 0 ? "|-" : "-|-") << std::string(w[i], '-');
  out << "-|\n";
  for (const auto& r : t.rows) line(r);
  return out.str();
}

inline std::string to_csv(const ReportTable& t) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << quote(row[i]);
    out << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return out.str();
}

inline nlohmann::json to_json(const ReportTable& t) {
  return {{"title", t.title}, {"header", t.header}, {"rows", t.rows}, {"meta", t.meta}};
}

/// Baseline sweep: one row per window T, one column per (S_thresh, h_thresh) pair.
inline ReportTable sweep_report(const SweepTable& sweep) {
  ReportTable t;
  t.title = "Baseline ROC AUC (no tracking)";
  std::set<std::pair<double, double>> cols;
  std::set<int> windows;
  for (const auto& e : sweep.entries) {
    cols.insert({e.s_thresh, e.h_thresh});
    windows.insert(e.window);
  }
  t.header.push_back("T");
  for (const auto& [s, h] : cols) {
    std::ostringstream c;
    c << "S=" << s << " h=" << h;
    t.header.push_back(c.str());
  }
  for (int win : windows) {
    std::vector<std::string> row{win == 0 ? std::string("all") : std::to_string(win)};
    for (const auto& [s, h] : cols) {
      const auto it = std::find_if(sweep.entries.begin(), sweep.entries.end(), [&](const SweepEntry& e) {
        return e.window == win && e.s_thresh == s && e.h_thresh == h;
      });
      row.push_back(it == sweep.entries.end() ? "" : fixed3(it->auc));
    }
    t.rows.push_back(std::move(row));
  }
  if (!sweep.entries.empty()) {
    const auto& b = sweep.entries[sweep.best_auc];
    t.meta["best"] = {{"s_thresh", b.s_thresh}, {"h_thresh", b.h_thresh}, {"window", b.window}, {"auc", b.auc}};
  }
  return t;
}

inline std::string dataset_column(DatasetTag tag) {
  switch (tag) {
    case DatasetTag::holo_vanilla: return "MIDV-Holo Vanilla F (%)";
    case DatasetTag::holo_photo_replacement: return "MIDV-Holo Photo repl. Recall (%)";
    case DatasetTag::midv2020_clips: return "MIDV 2020 Clips Recall (%)";
  }
  return "";
}

inline constexpr DatasetTag kAllDatasetTags[] = {DatasetTag::holo_vanilla, DatasetTag::holo_photo_replacement,
                                                 DatasetTag::midv2020_clips};

/// Method comparison: rows grouped by decision strategy, then the three reference predictors.
/// Datasets with no runs are left blank.
inline ReportTable results_report(std::span<const RunResult> runs, double vanilla_attack_fraction = 0.5) {
  const auto agg = aggregate_runs(runs);
  ReportTable t;
  t.title = "Results (mean ± std over runs)";
  t.header = {"Decision", "Method"};
  for (auto tag : kAllDatasetTags) t.header.push_back(dataset_column(tag));
  std::vector<std::pair<std::string, std::string>> keys;
  for (const auto& r : runs)
    if (std::find(keys.begin(), keys.end(), std::pair{r.strategy, r.method}) == keys.end())
      keys.emplace_back(r.strategy, r.method);
  std::stable_sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
    return (a.first == "whole") > (b.first == "whole");
  });
  for (const auto& [strategy, method] : keys) {
    std::vector<std::string> row{strategy == "whole" ? "Whole video" : "Cumulative", method};
    for (auto tag : kAllDatasetTags) {
      const auto it = agg.find({method, strategy, tag});
      row.push_back(it == agg.end() ? "" : percent_cell(it->second));
    }
    t.rows.push_back(std::move(row));
  }
  const char* names[] = {"Perfectly random", "Always positive (attack)", "Always negative (original)"};
  for (int k = 0; k < 3; ++k) {
    std::vector<std::string> row{"Dummy", names[k]};
    for (auto tag : kAllDatasetTags) {
      const auto d = dummy_metrics(tag, vanilla_attack_fraction);
      const double v = k == 0 ? d.random : k == 1 ? d.always_attack : d.always_original;
      row.push_back(percent_cell({v, 0.0, 1}));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

/// One ablation configuration of the learned pipeline.
struct AblationSetting {
  bool augmentation = true;
  std::string strategy = "triplet";       // "triplet" or "classifier"
  std::string training_data = "full";     // "full" or "originals_only"; "none" for untrained features
  std::string architecture;

  /// Method string stored in RunResult::method for this setting.
  [[nodiscard]] std::string method() const {
    if (training_data == "none") return "pretrained-only " + architecture;
    return std::string(augmentation ? "aug" : "noaug") + "/" + strategy + "/" + training_data + " " + architecture;
  }
};

/// Ablation matrix: one row per setting, whole-video decision.
inline ReportTable ablation_report(std::span<const AblationSetting> settings, std::span<const RunResult> runs) {
  const auto agg = aggregate_runs(runs);
  ReportTable t;
  t.title = "Ablations (whole video, mean ± std over runs)";
  t.header = {"Data aug.", "Train strategy", "Training dataset", "Architecture"};
  for (auto tag : kAllDatasetTags) t.header.push_back(dataset_column(tag));
  for (const auto& s : settings) {
    std::vector<std::string> row;
    if (s.training_data == "none") row = {"", "None (pretrained weights)", "", s.architecture};
    else
      row = {s.augmentation ? "On" : "Off", s.strategy == "classifier" ? "Classifier (softmax)" : "Contrast (triplet loss)",
             s.training_data == "originals_only" ? "Originals only" : "Full train set", s.architecture};
    for (auto tag : kAllDatasetTags) {
      const auto it = agg.find({s.method(), "whole", tag});
      row.push_back(it == agg.end() ? "" : percent_cell(it->second));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline nlohmann::json to_json(const ClipOutcome& c) {
  return {{"clip_id", c.clip_id},
          {"verdict", to_string(c.verdict)},
          {"label", to_string(c.label)},
          {"score", c.score},
          {"stop_index", c.stop_index}};
}

inline nlohmann::json to_json(const RunResult& r) {
  nlohmann::json clips = nlohmann::json::array();
  for (const auto& c : r.clips) clips.push_back(to_json(c));
  return {{"run_id", r.run_id},
          {"dataset_tag", to_string(r.dataset_tag)},
          {"method", r.method},
          {"strategy", r.strategy},
          {"headline", headline_metric(r)},
          {"clips", clips}};
}

inline RunResult run_result_from_json(const nlohmann::json& j) {
  RunResult r;
  r.run_id = j.at("run_id").get<int>();
  r.dataset_tag = parse_dataset_tag(j.at("dataset_tag").get<std::string>());
  r.method = j.at("method").get<std::string>();
  r.strategy = j.at("strategy").get<std::string>();
  for (const auto& c : j.at("clips")) {
    ClipOutcome o;
    o.clip_id = c.at("clip_id").get<std::string>();
    o.verdict = parse_label(c.at("verdict").get<std::string>());
    o.label = parse_label(c.at("label").get<std::string>());
    o.score = c.at("score").get<double>();
    o.stop_index = c.at("stop_index").get<std::size_t>();
    r.clips.push_back(std::move(o));
  }
  return r;
}

}  // namespace holoverify
