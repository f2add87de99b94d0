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
#include <span>
#include <vector>

#include "vexplore/group_mining.hpp"

namespace vexplore {

// 16 bytes; lists get long.
struct Neighbor {
  GroupId id = 0;
  // |members(g) ∩ members(id)|; the similarity is derived from it.
  std::uint32_t overlap = 0;
  double similarity = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Per-group neighbor lists over Jaccard similarity of member sets, sorted by
// similarity descending then group id ascending, truncated to
// ceil(fraction * (|G| - 1)) entries. Only overlapping groups are listed.
class SimilarityIndex {
 public:
  SimilarityIndex() = default;
  SimilarityIndex(double fraction, std::vector<std::vector<Neighbor>> lists)
      : fraction_(fraction), lists_(std::move(lists)) {}

  double fraction() const { return fraction_; }
  std::size_t size() const { return lists_.size(); }
  std::span<const Neighbor> list(GroupId g) const;
  const std::vector<std::vector<Neighbor>>& lists() const { return lists_; }

  friend bool operator==(const SimilarityIndex&, const SimilarityIndex&) = default;

 private:
  double fraction_ = 1.0;
  std::vector<std::vector<Neighbor>> lists_;
};

// ceil(fraction * (group_count - 1)), robust to binary rounding of the
// product.
std::size_t truncation_length(double fraction, std::size_t group_count);

// Strict weak order used by every neighbor list.
inline bool neighbor_before(const Neighbor& a, const Neighbor& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  return a.id < b.id;
}

// Counts overlaps only between groups that share a member, walking each
// member's group list. `threads` == 0 picks the hardware concurrency.
SimilarityIndex build_index(const GroupSet& groups, double fraction, unsigned threads = 0);

// All-pairs reference implementation with the same output contract.
SimilarityIndex build_index_naive(const GroupSet& groups, double fraction);

// First min(limit, stored length) entries of gid's list.
std::span<const Neighbor> neighbors(const SimilarityIndex& index, GroupId gid, std::size_t limit);

}  // namespace vexplore
