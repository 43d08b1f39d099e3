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

// Shared test fixtures.

#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "holoverify/catalog.hpp"

namespace holoverify::testing {

/// Metadata-only catalog shaped like MIDV-Holo: 10 ID-card and 10 passport models, 5
/// identities each, 3 original takes plus one clip per attack kind.
inline std::vector<ClipRecord> simulated_holo_catalog() {
  std::vector<ClipRecord> out;
  const AttackKind attacks[] = {AttackKind::copy_without_holo, AttackKind::pseudo_holo_copy,
                                AttackKind::photo_holo_copy, AttackKind::photo_replacement};
  for (const char* family : {"id", "psp"})
    for (int m = 1; m <= 10; ++m) {
      char model[16];
      std::snprintf(model, sizeof model, "%s%02d", family, m);
      for (int i = 1; i <= 5; ++i) {
        char ident[8];
        std::snprintf(ident, sizeof ident, "%02d", i);
        for (int take = 1; take <= 3; ++take) {
          ClipRecord c;
          c.clip_id = "origins/" + std::string(model) + "/" + model + "_" + ident + "_0" + std::to_string(take);
          c.document_model = model;
          c.identity = ident;
          out.push_back(c);
        }
        for (auto k : attacks) {
          ClipRecord c;
          c.clip_id = "fraud/" + std::string(to_string(k)) + "/" + model + "/" + model + "_" + ident;
          c.document_model = model;
          c.identity = ident;
          c.label = Label::attack;
          c.attack_kind = k;
          out.push_back(c);
        }
      }
    }
  return out;
}

}  // namespace holoverify::testing
