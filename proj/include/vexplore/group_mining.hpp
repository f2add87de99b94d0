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

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "vexplore/ingest.hpp"
#include "vexplore/member_set.hpp"

namespace vexplore {

using GroupId = std::uint32_t;

// A closed itemset with its exact support set.
struct Group {
  GroupId id = 0;
  std::vector<TokenIndex> descriptor;  // sorted
  MemberSet members;

  std::size_t support() const { return members.size(); }
};

class GroupSet {
 public:
  GroupSet() = default;
  // Groups must already be in canonical order; ids are reassigned densely.
  GroupSet(std::vector<Group> groups, std::size_t universe, std::size_t minsup);

  std::size_t size() const { return groups_.size(); }
  bool empty() const { return groups_.empty(); }
  std::size_t universe() const { return universe_; }
  std::size_t minsup() const { return minsup_; }

  const std::vector<Group>& groups() const { return groups_; }
  const Group& at(GroupId id) const;
  bool contains(GroupId id) const { return id < groups_.size(); }
  std::optional<GroupId> find(const std::vector<TokenIndex>& sorted_descriptor) const;

  // Ids of groups each user belongs to, ascending.
  std::span<const GroupId> groups_of(UserIndex u) const;

 private:
  std::vector<Group> groups_;
  std::size_t universe_ = 0;
  std::size_t minsup_ = 0;
  std::map<std::vector<TokenIndex>, GroupId> by_descriptor_;
  std::vector<std::vector<GroupId>> user_groups_;
};

struct MiningOptions {
  std::size_t minsup = 2;
  // Abort once more closed groups than this have been found.
  std::size_t max_groups = 5'000'000;
};

// max(2, ceil(0.5% of users)).
std::size_t default_minsup(std::size_t user_count);

// Closed frequent itemsets by depth-first prefix-preserving closure
// extension. Output is sorted by (support desc, descriptor asc). The empty
// descriptor is never emitted. minsup > |users| yields an empty set.
GroupSet mine_closed_groups(const Dataset& dataset, const MiningOptions& options);

// Same contract as mine_closed_groups over explicit transactions; the
// dataset overload forwards here.
GroupSet mine_closed_groups(std::span<const std::vector<TokenIndex>> transactions,
                            std::size_t token_count, const MiningOptions& options);

// Reference enumeration of all 2^T itemsets. Refuses T > 20.
GroupSet brute_force_closed(std::span<const std::vector<TokenIndex>> transactions,
                            std::size_t token_count, std::size_t minsup);
GroupSet brute_force_closed(const Dataset& dataset, std::size_t minsup);

}  // namespace vexplore
