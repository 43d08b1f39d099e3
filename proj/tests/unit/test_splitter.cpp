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

#include <filesystem>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "holoverify/splitter.hpp"

namespace holoverify {
namespace {

std::set<ModelIdentity> identities(const std::vector<ClipRecord>& clips) {
  std::set<ModelIdentity> out;
  for (const auto& c : clips) out.insert({c.document_model, c.identity});
  return out;
}

TEST(Splitter, HoloCatalogCountsPerRun) {
  const auto catalog = testing::simulated_holo_catalog();
  ASSERT_EQ(catalog.size(), 700u);
  for (const auto& plan : generate_splits(catalog, 5, 11)) {
    const auto s = apply_split(plan, catalog);
    EXPECT_EQ(s.train.size(), 384u);
    EXPECT_EQ(s.validation.size(), 96u);
    EXPECT_EQ(s.test_vanilla.size(), 120u);
    EXPECT_EQ(s.test_photo_replacement.size(), 20u);
    for (const auto& c : s.train) EXPECT_FALSE(c.is_photo_replacement());
    for (const auto& c : s.validation) EXPECT_FALSE(c.is_photo_replacement());
    for (const auto& c : s.test_vanilla) EXPECT_FALSE(c.is_photo_replacement());

    const auto tr = identities(s.train), va = identities(s.validation), te = identities(s.test_vanilla);
    for (const auto& k : va) EXPECT_FALSE(tr.count(k));
    for (const auto& k : te) EXPECT_FALSE(tr.count(k) || va.count(k));
    EXPECT_EQ(identities(s.test_photo_replacement), te);
  }
}

TEST(Splitter, EveryIdentityIsTestedOnceOverFiveRuns) {
  const auto catalog = testing::simulated_holo_catalog();
  const auto plans = generate_splits(catalog, 5, 3);
  std::map<ModelIdentity, int> tested;
  for (const auto& p : plans)
    for (const auto& [k, s] : p.assignment)
      if (s == Subset::test) ++tested[k];
  EXPECT_EQ(tested.size(), 100u);
  for (const auto& [k, n] : tested) EXPECT_EQ(n, 1) << k.first << "/" << k.second;
  for (std::size_t a = 0; a < plans.size(); ++a)
    for (std::size_t b = a + 1; b < plans.size(); ++b) EXPECT_NE(plans[a].assignment, plans[b].assignment);
}

TEST(Splitter, SameSeedGivesIdenticalPlans) {
  const auto catalog = testing::simulated_holo_catalog();
  const auto a = generate_splits(catalog, 5, 42), b = generate_splits(catalog, 5, 42);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(serialize(a[i]), serialize(b[i]));
  EXPECT_NE(serialize(generate_splits(catalog, 1, 43)[0]), serialize(a[0]));
}

TEST(Splitter, SmallCatalogKeepsAllRolesFilled) {
  std::vector<ClipRecord> catalog;
  for (const auto& c : testing::simulated_holo_catalog())
    if (c.document_model == "id01" || c.document_model == "id02" || c.document_model == "psp01" ||
        c.document_model == "psp02")
      catalog.push_back(c);
  const auto s = apply_split(generate_splits(catalog, 1, 1)[0], catalog);
  EXPECT_EQ(identities(s.test_vanilla).size(), 4u);
  EXPECT_EQ(identities(s.validation).size(), 3u);  // round(0.16 * 20)
  EXPECT_EQ(identities(s.train).size(), 13u);
}

TEST(Splitter, RejectsDegenerateCatalogs) {
  EXPECT_THROW(generate_splits({}, 5, 1), Error);
  std::vector<ClipRecord> single(1);
  single[0].document_model = "id01";
  single[0].identity = "01";
  EXPECT_THROW(generate_splits(single, 1, 1), Error);
  EXPECT_THROW(generate_splits(testing::simulated_holo_catalog(), 0, 1), Error);
}

TEST(Splitter, SerializationRoundTrips) {
  auto plan = generate_splits(testing::simulated_holo_catalog(), 2, 9)[1];
  plan.config_hash = "00ff00ff00ff00ff";
  const auto path = std::filesystem::temp_directory_path() / "holoverify_split_rt.txt";
  save_split(plan, path);
  EXPECT_EQ(load_split(path), plan);

  std::istringstream bad("# holoverify split v1\nrun_id 0\nseed 1\nid01 01 sideways\n");
  EXPECT_THROW(parse_split(bad), Error);
  std::istringstream headerless("run_id 0\n");
  EXPECT_THROW(parse_split(headerless), Error);
}

TEST(Splitter, UnknownIdentitiesAreDropped) {
  const auto catalog = testing::simulated_holo_catalog();
  const auto plan = generate_splits(catalog, 1, 5)[0];
  ClipRecord stranger;
  stranger.document_model = "id99";
  stranger.identity = "01";
  const auto s = apply_split(plan, std::vector<ClipRecord>{stranger});
  EXPECT_EQ(s.dropped, 1u);
}

}  // namespace
}  // namespace holoverify
