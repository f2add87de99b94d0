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

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "vexplore/ingest.hpp"

namespace vexplore {

// Sorted, duplicate-free list of user indices. Intersection cardinality is
// the hot operation; lists of very different lengths use binary search.
class MemberSet {
 public:
  MemberSet() = default;
  // `sorted_users` must be strictly ascending.
  explicit MemberSet(std::vector<UserIndex> sorted_users) : users_(std::move(sorted_users)) {}

  static MemberSet from_unsorted(std::vector<UserIndex> users) {
    std::sort(users.begin(), users.end());
    users.erase(std::unique(users.begin(), users.end()), users.end());
    return MemberSet(std::move(users));
  }

  std::size_t size() const { return users_.size(); }
  bool empty() const { return users_.empty(); }
  bool contains(UserIndex u) const { return std::binary_search(users_.begin(), users_.end(), u); }
  std::span<const UserIndex> users() const { return users_; }
  auto begin() const { return users_.begin(); }
  auto end() const { return users_.end(); }

  friend bool operator==(const MemberSet&, const MemberSet&) = default;
  friend auto operator<=>(const MemberSet&, const MemberSet&) = default;

 private:
  std::vector<UserIndex> users_;
};

std::size_t intersection_size(std::span<const UserIndex> a, std::span<const UserIndex> b);
inline std::size_t intersection_size(const MemberSet& a, const MemberSet& b) {
  return intersection_size(a.users(), b.users());
}

// |a ∩ b| / |a ∪ b|; 0 when both are empty.
double jaccard(const MemberSet& a, const MemberSet& b);

// Jaccard from precomputed cardinalities. Every similarity stored anywhere in
// the library goes through this so equal inputs give bit-identical values.
inline double jaccard_from_counts(std::size_t inter, std::size_t size_a, std::size_t size_b) {
  const std::size_t uni = size_a + size_b - inter;
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace vexplore
