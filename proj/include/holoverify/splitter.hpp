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

// Identity-disjoint, model-stratified train/validation/test splits.
//
// Per run and per document model one identity is held out for test; the test identity
// rotates with the run index so every identity is tested once over n_identities runs.
// Validation takes one further identity from round(0.16 * total identities) distinct
// models, which gives the 64/16/20 partition on a 20-model x 5-identity catalog.
// Photo-replacement clips never enter train or validation.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "holoverify/catalog.hpp"
#include "holoverify/rng.hpp"

namespace holoverify {

enum class Subset { train, validation, test };

inline std::string_view to_string(Subset s) {
  switch (s) {
    case Subset::train: return "train";
    case Subset::validation: return "validation";
    case Subset::test: return "test";
  }
  return "train";
}

inline Subset parse_subset(std::string_view s) {
  if (s == "train") return Subset::train;
  if (s == "validation") return Subset::validation;
  if (s == "test") return Subset::test;
  throw Error("unknown subset: " + std::string(s));
}

using ModelIdentity = std::pair<std::string, std::string>;

struct SplitPlan {
  int run_id = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::map<ModelIdentity, Subset> assignment;

  friend bool operator==(const SplitPlan&, const SplitPlan&) = default;

  /// Subset a clip belongs to, or nullopt when it is dropped from this run.
  [[nodiscard]] std::optional<Subset> subset_of(const ClipRecord& clip) const {
    const auto it = assignment.find({clip.document_model, clip.identity});
    if (it == assignment.end()) return std::nullopt;
    if (clip.is_photo_replacement() && it->second != Subset::test) return std::nullopt;
    return it->second;
  }
};

inline constexpr double kValidationFraction = 0.16;

inline std::vector<SplitPlan> generate_splits(const std::vector<ClipRecord>& catalog, int n_runs,
                                              std::uint64_t seed) {
  if (n_runs < 1) throw Error("n_runs must be at least 1");
  std::map<std::string, std::set<std::string>> identities;
  for (const auto& c : catalog) identities[c.document_model].insert(c.identity);
  if (identities.empty()) throw Error("cannot stratify: empty catalog");

  // Seeded but run-independent orderings, so the rotation covers every identity.
  std::mt19937_64 rng(seed);
  std::vector<std::string> models;
  std::map<std::string, std::vector<std::string>> order;
  std::size_t total = 0;
  for (const auto& [model, ids] : identities) {
    if (ids.size() < 2) throw Error("cannot stratify: model '" + model + "' has fewer than 2 identities");
    models.push_back(model);
    auto& v = order[model] = std::vector<std::string>(ids.begin(), ids.end());
    shuffle(v, rng);
    total += v.size();
  }
  shuffle(models, rng);

  // Only models that keep a training identity after donating one to validation qualify.
  std::vector<std::string> donors;
  for (const auto& m : models)
    if (order[m].size() >= 3) donors.push_back(m);
  const auto n_val = std::min<std::size_t>(
      donors.size(), static_cast<std::size_t>(std::llround(kValidationFraction * total)));

  std::vector<SplitPlan> plans;
  for (int run = 0; run < n_runs; ++run) {
    SplitPlan plan{run, seed, {}, {}};
    std::set<std::string> donating;
    for (std::size_t k = 0; k < n_val; ++k)
      donating.insert(donors[(run * n_val + k) % donors.size()]);
    for (std::size_t rank = 0; rank < models.size(); ++rank) {
      const auto& model = models[rank];
      const auto& ids = order[model];
      const std::size_t n = ids.size();
      const std::size_t test_idx = (rank + run) % n;
      const std::size_t val_idx = (test_idx + 1) % n;
      for (std::size_t i = 0; i < n; ++i) {
        Subset s = Subset::train;
        if (i == test_idx) s = Subset::test;
        else if (i == val_idx && donating.count(model)) s = Subset::validation;
        plan.assignment[{model, ids[i]}] = s;
      }
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

/// Clips of one run, grouped by role.
struct SplitClips {
  std::vector<ClipRecord> train;
  std::vector<ClipRecord> validation;
  std::vector<ClipRecord> test_vanilla;
  std::vector<ClipRecord> test_photo_replacement;
  std::size_t dropped = 0;
};

inline SplitClips apply_split(const SplitPlan& plan, const std::vector<ClipRecord>& catalog) {
  SplitClips out;
  for (const auto& c : catalog) {
    const auto s = plan.subset_of(c);
    if (!s) {
      ++out.dropped;
      continue;
    }
    switch (*s) {
      case Subset::train: out.train.push_back(c); break;
      case Subset::validation: out.validation.push_back(c); break;
      case Subset::test:
        (c.is_photo_replacement() ? out.test_photo_replacement : out.test_vanilla).push_back(c);
        break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Plain-text serialization

inline constexpr std::string_view kSplitHeader = "# holoverify split v1";

inline std::string serialize(const SplitPlan& plan) {
  std::ostringstream out;
  out << kSplitHeader << '\n';
  out << "run_id " << plan.run_id << '\n';
  out << "seed " << plan.seed << '\n';
  if (!plan.config_hash.empty()) out << "config_hash " << plan.config_hash << '\n';
  for (const auto& [key, subset] : plan.assignment)
    out << key.first << ' ' << key.second << ' ' << to_string(subset) << '\n';
  return out.str();
}

inline SplitPlan parse_split(std::istream& in, const std::string& origin = "split") {
  SplitPlan plan;
  std::string line;
  if (!std::getline(in, line) || line != kSplitHeader) throw Error(origin + ": not a split file");
  bool have_run = false, have_seed = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string a, b, c;
    ls >> a >> b;
    if (a == "run_id") { plan.run_id = std::stoi(b); have_run = true; continue; }
    if (a == "seed") { plan.seed = std::stoull(b); have_seed = true; continue; }
    if (a == "config_hash") { plan.config_hash = b; continue; }
    if (!(ls >> c)) throw Error(origin + ": malformed line '" + line + "'");
    if (!plan.assignment.emplace(ModelIdentity{a, b}, parse_subset(c)).second)
      throw Error(origin + ": duplicate entry for " + a + "/" + b);
  }
  if (!have_run || !have_seed) throw Error(origin + ": missing run_id or seed");
  return plan;
}

inline void save_split(const SplitPlan& plan, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write split file: " + path.string());
  out << serialize(plan);
}

inline SplitPlan load_split(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open split file: " + path.string());
  return parse_split(in, path.string());
}

}  // namespace holoverify
