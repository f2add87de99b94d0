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

#include "vexplore/selection.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "vexplore/error.hpp"

namespace vexplore {
namespace {

std::vector<const MemberSet*> member_sets(const GroupSet& groups, std::span<const GroupId> ids) {
  std::vector<const MemberSet*> sets;
  sets.reserve(ids.size());
  for (GroupId id : ids) sets.push_back(&groups.at(id).members);
  return sets;
}

}  // namespace

double diversity(std::span<const MemberSet* const> sets) {
  if (sets.empty()) throw Error(ErrorCode::kInvalidArgument, "diversity of an empty selection");
  if (sets.size() == 1) return 1.0;
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      sum += 1.0 - jaccard(*sets[i], *sets[j]);
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

double diversity(const GroupSet& groups, std::span<const GroupId> ids) {
  return diversity(member_sets(groups, ids));
}

double coverage(std::span<const MemberSet* const> sets, const MemberSet& parent) {
  if (parent.empty()) throw Error(ErrorCode::kInvalidArgument, "coverage against an empty parent");
  std::vector<UserIndex> covered;
  for (const MemberSet* s : sets) {
    for (UserIndex u : *s) {
      if (parent.contains(u)) covered.push_back(u);
    }
  }
  std::sort(covered.begin(), covered.end());
  covered.erase(std::unique(covered.begin(), covered.end()), covered.end());
  return static_cast<double>(covered.size()) / static_cast<double>(parent.size());
}

double coverage(const GroupSet& groups, std::span<const GroupId> ids, const MemberSet& parent) {
  return coverage(member_sets(groups, ids), parent);
}

double selection_objective(const GroupSet& groups, std::span<const GroupId> ids,
                           const MemberSet& parent, double alpha) {
  if (ids.empty()) return 0.0;
  const auto sets = member_sets(groups, ids);
  return alpha * diversity(sets) + (1.0 - alpha) * coverage(sets, parent);
}

std::vector<Candidate> candidate_pool(const SimilarityIndex& index, const GroupSet& groups,
                                      const FeedbackVector& feedback, GroupId focus,
                                      const PoolOptions& options) {
  groups.at(focus);
  const auto list = index.list(focus);
  std::vector<Candidate> pool;
  pool.reserve(list.size());
  std::optional<FeedbackScorer> scorer;
  if (!feedback.empty() && options.feedback_weight != 0.0) {
    scorer.emplace(feedback);
  }
  for (const Neighbor& n : list) {
    if (n.similarity < options.min_similarity) continue;
    double weight = n.similarity;
    if (scorer) {
      const double fs = scorer->score(groups.at(n.id));
      weight = n.similarity * (1.0 + options.feedback_weight * fs);
    }
    pool.push_back({n.id, n.similarity, weight});
  }
  std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.id < b.id;
  });
  if (pool.size() > options.pool_cap) pool.resize(options.pool_cap);
  return pool;
}

std::vector<Candidate> root_pool(const GroupSet& groups, std::size_t pool_cap) {
  std::vector<Candidate> pool;
  const std::size_t n = std::min(pool_cap, groups.size());
  pool.reserve(n);
  for (GroupId id = 0; id < n; ++id) {
    const double share =
        static_cast<double>(groups.at(id).support()) / static_cast<double>(groups.universe());
    pool.push_back({id, share, share});
  }
  return pool;
}

bool Deadline::expired() {
  if (max_checks_) return checks_++ >= *max_checks_;
  if (!limit_) return false;
  return Clock::now() - start_ >= *limit_;
}

double Deadline::elapsed_ms() const {
  return std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
}

GroupSelection select_k(const GroupSet& groups, std::span<const Candidate> pool,
                        const SelectOptions& options, const MemberSet& parent,
                        Deadline& deadline) {
  if (options.k < 1 || options.k > kMaxGroupsShown) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("k must lie in [1, {}], got {}", kMaxGroupsShown, options.k),
                {{"k", std::to_string(options.k)}});
  }
  GroupSelection result;
  if (pool.empty()) {
    result.elapsed_ms = deadline.elapsed_ms();
    return result;
  }
  if (parent.empty()) throw Error(ErrorCode::kInvalidArgument, "selection parent is empty");

  const double alpha = options.alpha;
  const std::size_t target = std::min(options.k, pool.size());

  struct Slot {
    const Group* group = nullptr;
    bool chosen = false;
    double dist_sum = 0.0;   // distances to chosen[0 .. dist_upto)
    std::size_t dist_upto = 0;
    bool parent_ready = false;
    std::vector<UserIndex> in_parent;
  };
  std::vector<Slot> slots(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) slots[i].group = &groups.at(pool[i].id);

  // bit 0: in parent, bit 1: covered
  std::vector<std::uint8_t> marks(groups.universe(), 0);
  for (UserIndex u : parent) marks.at(u) = 1;
  std::size_t covered = 0;
  const double parent_size = static_cast<double>(parent.size());

  std::vector<std::size_t> chosen;
  double chosen_pair_sum = 0.0;

  auto completion_of_prefix = [&]() {
    std::vector<GroupId> ids;
    for (std::size_t i : chosen) ids.push_back(pool[i].id);
    for (std::size_t i = 0; i < pool.size() && ids.size() < target; ++i) {
      if (!slots[i].chosen) ids.push_back(pool[i].id);
    }
    return ids;
  };
  auto canonical_objective = [&](std::vector<GroupId> ids) {
    std::sort(ids.begin(), ids.end());
    return selection_objective(groups, ids, parent, alpha);
  };

  std::vector<GroupId> best_ids = completion_of_prefix();
  double best_objective = canonical_objective(best_ids);

  for (std::size_t round = 0; round < target; ++round) {
    std::optional<std::size_t> pick;
    double pick_value = -std::numeric_limits<double>::infinity();
    const double m = static_cast<double>(chosen.size());
    for (std::size_t i = 0; i < slots.size(); ++i) {
      Slot& s = slots[i];
      if (s.chosen) continue;
      if (deadline.expired()) {
        result.budget_exhausted = true;
        break;
      }
      while (s.dist_upto < chosen.size()) {
        s.dist_sum += 1.0 - jaccard(s.group->members, slots[chosen[s.dist_upto]].group->members);
        ++s.dist_upto;
      }
      if (!s.parent_ready) {
        for (UserIndex u : s.group->members) {
          if (u < marks.size() && (marks[u] & 1)) s.in_parent.push_back(u);
        }
        s.parent_ready = true;
      }
      std::size_t gain = 0;
      for (UserIndex u : s.in_parent) gain += (marks[u] & 2) ? 0 : 1;
      const double div =
          chosen.empty() ? 1.0 : (chosen_pair_sum + s.dist_sum) / ((m + 1.0) * m / 2.0);
      const double cov = static_cast<double>(covered + gain) / parent_size;
      const double value = alpha * div + (1.0 - alpha) * cov;
      if (value > pick_value) {
        pick_value = value;
        pick = i;
      }
    }
    if (result.budget_exhausted || !pick) break;

    Slot& s = slots[*pick];
    s.chosen = true;
    chosen_pair_sum += s.dist_sum;
    for (UserIndex u : s.in_parent) {
      if (!(marks[u] & 2)) {
        marks[u] |= 2;
        ++covered;
      }
    }
    chosen.push_back(*pick);

    auto ids = completion_of_prefix();
    const double value = canonical_objective(ids);
    if (value >= best_objective) {
      best_objective = value;
      best_ids = std::move(ids);
    }
  }

  result.ids = std::move(best_ids);
  const auto sets = member_sets(groups, result.ids);
  result.diversity = diversity(sets);
  result.coverage = coverage(sets, parent);
  result.objective = best_objective;
  result.elapsed_ms = deadline.elapsed_ms();
  return result;
}

}  // namespace vexplore
