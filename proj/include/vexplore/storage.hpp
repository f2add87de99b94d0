// Copyright 2026 The vexplore Authors.
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

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "vexplore/group_mining.hpp"
#include "vexplore/ingest.hpp"
#include "vexplore/session.hpp"
#include "vexplore/simindex.hpp"

namespace vexplore {

// Dataset directory layout (all text files are UTF-8, one JSON value per
// line for *.jsonl):
//
//   meta.json           format, version, digest, schema, counts, user ids
//                       and the token dictionary in index order
//   transactions.jsonl  {"user": id, "tokens": [token strings]} per user
//   profiles.jsonl      {"user": id, "values": {attr: value}} per user
//   actions.jsonl       {"user": id, "item": id, "value": x} per action
//   groups.meta.json    format, version, dataset digest, minsup, count
//   groups.jsonl        {"id", "descriptor": [tokens], "members": [ids],
//                        "support"} per group
//   simindex.bin        binary neighbor-list cache, see save_index_cache
namespace layout {
inline constexpr const char* kMeta = "meta.json";
inline constexpr const char* kTransactions = "transactions.jsonl";
inline constexpr const char* kProfiles = "profiles.jsonl";
inline constexpr const char* kActions = "actions.jsonl";
inline constexpr const char* kGroupsMeta = "groups.meta.json";
inline constexpr const char* kGroups = "groups.jsonl";
inline constexpr const char* kIndex = "simindex.bin";
}  // namespace layout

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);
// Rebuilds from profiles/actions and checks the digest and token
// dictionary against meta.json (kMalformedInput on mismatch).
Dataset load_dataset(const std::filesystem::path& dir);

void save_groups(const Dataset& dataset, const GroupSet& groups, const std::filesystem::path& dir);
// Returns nullopt when no group store exists. Throws kCacheMismatch when it
// was mined from a different dataset.
std::optional<GroupSet> load_groups(const Dataset& dataset, const std::filesystem::path& dir);

// Binary, little-endian:
//   char[8]  magic "VXSIDX01"
//   u32      version (1)
//   char[16] dataset digest
//   u64      minsup
//   f64      fraction
//   u64      group count
//   per group: u32 length, then length x (u32 neighbor id, u32 overlap)
// Similarities are recomputed from overlaps and group supports on load.
void save_index_cache(const std::filesystem::path& path, const std::string& digest,
                      std::size_t minsup, const SimilarityIndex& index);
// nullopt when the file is missing or keyed by a different
// (digest, minsup, fraction).
std::optional<SimilarityIndex> load_index_cache(const std::filesystem::path& path,
                                                const std::string& digest, std::size_t minsup,
                                                double fraction, const GroupSet& groups);

struct CorpusOptions {
  // Used only when no group store exists yet; default_minsup otherwise.
  std::optional<std::size_t> minsup;
  double fraction = 0.1;
  bool write_back = true;
};

// Loads the dataset and its groups and index, mining and indexing on demand
// (and caching results in `dir` when write_back is set).
std::shared_ptr<const Corpus> prepare_corpus(const std::filesystem::path& dir,
                                             const CorpusOptions& options = {});

}  // namespace vexplore
