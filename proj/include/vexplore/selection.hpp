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

#include <chrono>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "vexplore/feedback.hpp"
#include "vexplore/group_mining.hpp"
#include "vexplore/simindex.hpp"

namespace vexplore {

// Mean pairwise Jaccard distance; 1 for a single set. Throws on empty input.
double diversity(std::span<const MemberSet* const> sets);
double diversity(const GroupSet& groups, std::span<const GroupId> ids);

// Fraction of `parent` covered by the union of `sets`. Throws on an empty
// parent.
double coverage(std::span<const MemberSet* const> sets, const MemberSet& parent);
double coverage(const GroupSet& groups, std::span<const GroupId> ids, const MemberSet& parent);

struct Candidate {
  GroupId id = 0;
  double similarity = 0.0;
  // Feedback-weighted similarity; pool order is by this, descending.
  double weight = 0.0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct PoolOptions {
  double min_similarity = 0.05;
  double feedback_weight = 1.0;
  std::size_t pool_cap = 200;
};

// Focus neighbors with similarity >= min_similarity, reweighted by
// sim * (1 + feedback_weight * feedback_score), sorted by weight desc then
// id asc, truncated to pool_cap.
std::vector<Candidate> candidate_pool(const SimilarityIndex& index, const GroupSet& groups,
                                      const FeedbackVector& feedback, GroupId focus,
                                      const PoolOptions& options);

// Wall-clock limit for one exploration step. A count-based variant expires
// after a fixed number of checks, which makes anytime behaviour reproducible
// in tests.
class Deadline {
 public:
  using Clock = std::chrono::steady_clock;

  static Deadline infinite() { return Deadline(std::nullopt, std::nullopt); }
  static Deadline after(std::chrono::duration<double, std::milli> budget) {
    return Deadline(std::chrono::duration_cast<Clock::duration>(budget), std::nullopt);
  }
  static Deadline after_checks(std::size_t checks) { return Deadline(std::nullopt, checks); }

  bool unlimited() const { return !limit_ && !max_checks_; }
  // Counts one check for the count-based variant.
  bool expired();
  double elapsed_ms() const;

 private:
  Deadline(std::optional<Clock::duration> limit, std::optional<std::size_t> max_checks)
      : start_(Clock::now()), limit_(limit), max_checks_(max_checks) {}

  Clock::time_point start_;
  std::optional<Clock::duration> limit_;
  std::optional<std::size_t> max_checks_;
  std::size_t checks_ = 0;
};

struct SelectOptions {
  std::size_t k = 5;
  // Weight of diversity in alpha * diversity + (1 - alpha) * coverage.
  double alpha = 0.5;
};

struct GroupSelection {
  std::vector<GroupId> ids;
  double diversity = 0.0;
  double coverage = 0.0;
  double objective = 0.0;
  double elapsed_ms = 0.0;
  bool budget_exhausted = false;
};

// alpha * diversity + (1 - alpha) * coverage; 0 for an empty set.
double selection_objective(const GroupSet& groups, std::span<const GroupId> ids,
                           const MemberSet& parent, double alpha);

// Anytime greedy. Each round adds the candidate maximizing the objective of
// the grown set (ties keep pool order); the deadline is checked before every
// evaluation. After every completed round the current prefix is topped up
// with the highest-weight unselected candidates, and the best such completed
// set seen is returned. With an unlimited deadline the pure greedy set wins
// all ties. Throws kInvalidArgument unless 1 <= k <= 7.
GroupSelection select_k(const GroupSet& groups, std::span<const Candidate> pool,
                        const SelectOptions& options, const MemberSet& parent,
                        Deadline& deadline);

// Top `pool_cap` groups by support, parent = all users.
std::vector<Candidate> root_pool(const GroupSet& groups, std::size_t pool_cap);

inline constexpr std::size_t kMaxGroupsShown = 7;

}  // namespace vexplore
