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

#include "vexplore/group_mining.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "vexplore/error.hpp"

namespace vexplore {

std::size_t intersection_size(std::span<const UserIndex> a, std::span<const UserIndex> b) {
  if (a.size() > b.size()) std::swap(a, b);
  if (a.empty()) return 0;
  std::size_t count = 0;
  if (a.size() * 32 < b.size()) {
    auto lo = b.begin();
    for (UserIndex u : a) {
      lo = std::lower_bound(lo, b.end(), u);
      if (lo == b.end()) break;
      if (*lo == u) ++count;
    }
    return count;
  }
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

double jaccard(const MemberSet& a, const MemberSet& b) {
  return jaccard_from_counts(intersection_size(a, b), a.size(), b.size());
}

GroupSet::GroupSet(std::vector<Group> groups, std::size_t universe, std::size_t minsup)
    : groups_(std::move(groups)), universe_(universe), minsup_(minsup) {
  user_groups_.resize(universe_);
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    auto& g = groups_[i];
    g.id = static_cast<GroupId>(i);
    if (!by_descriptor_.emplace(g.descriptor, g.id).second) {
      throw Error(ErrorCode::kInternal, "duplicate group descriptor");
    }
    for (UserIndex u : g.members) {
      if (u >= universe_) throw Error(ErrorCode::kInternal, "group member outside universe");
      user_groups_[u].push_back(g.id);
    }
  }
}

const Group& GroupSet::at(GroupId id) const {
  if (id >= groups_.size()) {
    throw Error(ErrorCode::kUnknownGroup, fmt::format("unknown group {}", id),
                {{"group", std::to_string(id)}});
  }
  return groups_[id];
}

std::optional<GroupId> GroupSet::find(const std::vector<TokenIndex>& sorted_descriptor) const {
  auto it = by_descriptor_.find(sorted_descriptor);
  if (it == by_descriptor_.end()) return std::nullopt;
  return it->second;
}

std::span<const GroupId> GroupSet::groups_of(UserIndex u) const {
  if (u >= user_groups_.size()) return {};
  return user_groups_[u];
}

std::size_t default_minsup(std::size_t user_count) {
  const auto half_percent =
      static_cast<std::size_t>(std::ceil(0.005 * static_cast<double>(user_count)));
  return std::max<std::size_t>(2, half_percent);
}

namespace {

void canonical_sort(std::vector<Group>& groups) {
  std::sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) {
    if (a.support() != b.support()) return a.support() > b.support();
    return a.descriptor < b.descriptor;
  });
}

// Depth-first closed itemset enumeration with occurrence delivery.
class ClosedMiner {
 public:
  ClosedMiner(std::span<const std::vector<TokenIndex>> tx, std::size_t token_count,
              const MiningOptions& options)
      : tx_(tx), token_count_(token_count), options_(options), counts_(token_count, 0) {}

  std::vector<Group> run() {
    std::vector<UserIndex> all(tx_.size());
    for (std::size_t u = 0; u < all.size(); ++u) all[u] = static_cast<UserIndex>(u);
    if (all.size() < options_.minsup) return {};
    auto root = closure(all);
    if (!root.empty()) emit(root, all);
    expand(root, all, -1, 0);
    return std::move(out_);
  }

 private:
  struct Level {
    std::vector<std::vector<UserIndex>> buckets;
    std::vector<TokenIndex> touched;
  };

  std::vector<TokenIndex> closure(const std::vector<UserIndex>& users) {
    std::vector<TokenIndex> touched;
    for (UserIndex u : users) {
      for (TokenIndex t : tx_[u]) {
        if (counts_[t]++ == 0) touched.push_back(t);
      }
    }
    std::vector<TokenIndex> result;
    for (TokenIndex t : touched) {
      if (counts_[t] == users.size()) result.push_back(t);
      counts_[t] = 0;
    }
    std::sort(result.begin(), result.end());
    return result;
  }

  void emit(const std::vector<TokenIndex>& descriptor, const std::vector<UserIndex>& users) {
    if (out_.size() >= options_.max_groups) {
      throw Error(ErrorCode::kGroupLimitExceeded,
                  fmt::format("closed group count exceeds the cap of {}", options_.max_groups),
                  {{"max_groups", std::to_string(options_.max_groups)}});
    }
    out_.push_back(Group{0, descriptor, MemberSet(users)});
  }

  void expand(const std::vector<TokenIndex>& itemset, const std::vector<UserIndex>& users,
              long core, std::size_t depth) {
    if (levels_.size() <= depth) levels_.emplace_back();
    Level& level = levels_[depth];
    if (level.buckets.size() < token_count_) level.buckets.resize(token_count_);
    level.touched.clear();

    for (UserIndex u : users) {
      for (auto it = std::upper_bound(tx_[u].begin(), tx_[u].end(), core); it != tx_[u].end();
           ++it) {
        auto& bucket = level.buckets[*it];
        if (bucket.empty()) level.touched.push_back(*it);
        bucket.push_back(u);
      }
    }
    std::sort(level.touched.begin(), level.touched.end());
    // Copy out: recursion reuses deeper levels only, but `levels_` may grow.
    std::vector<std::pair<TokenIndex, std::vector<UserIndex>>> candidates;
    candidates.reserve(level.touched.size());
    for (TokenIndex e : level.touched) {
      auto& bucket = level.buckets[e];
      if (bucket.size() >= options_.minsup &&
          !std::binary_search(itemset.begin(), itemset.end(), e)) {
        candidates.emplace_back(e, std::move(bucket));
      }
      bucket.clear();
    }

    for (auto& [e, occ] : candidates) {
      auto q = closure(occ);
      // prefix-preserving: q adds no token smaller than e
      bool preserves = true;
      auto p_it = itemset.begin();
      for (TokenIndex t : q) {
        if (t >= e) break;
        while (p_it != itemset.end() && *p_it < t) ++p_it;
        if (p_it == itemset.end() || *p_it != t) {
          preserves = false;
          break;
        }
      }
      if (!preserves) continue;
      emit(q, occ);
      expand(q, occ, static_cast<long>(e), depth + 1);
    }
  }

  std::span<const std::vector<TokenIndex>> tx_;
  std::size_t token_count_;
  MiningOptions options_;
  std::vector<std::size_t> counts_;
  std::vector<Level> levels_;
  std::vector<Group> out_;
};

}  // namespace

GroupSet mine_closed_groups(std::span<const std::vector<TokenIndex>> transactions,
                            std::size_t token_count, const MiningOptions& options) {
  if (options.minsup == 0) {
    throw Error(ErrorCode::kInvalidArgument, "minsup must be at least 1");
  }
  ClosedMiner miner(transactions, token_count, options);
  auto groups = miner.run();
  canonical_sort(groups);
  return GroupSet(std::move(groups), transactions.size(), options.minsup);
}

GroupSet mine_closed_groups(const Dataset& dataset, const MiningOptions& options) {
  return mine_closed_groups(dataset.transactions(), dataset.token_count(), options);
}

GroupSet brute_force_closed(std::span<const std::vector<TokenIndex>> transactions,
                            std::size_t token_count, std::size_t minsup) {
  if (minsup == 0) throw Error(ErrorCode::kInvalidArgument, "minsup must be at least 1");
  if (token_count > 20) {
    throw Error(ErrorCode::kEnumerationTooLarge,
                fmt::format("brute-force enumeration refuses {} tokens (limit 20)", token_count));
  }
  std::vector<std::uint32_t> masks;
  masks.reserve(transactions.size());
  for (const auto& tx : transactions) {
    std::uint32_t m = 0;
    for (TokenIndex t : tx) m |= (1u << t);
    masks.push_back(m);
  }
  std::vector<Group> groups;
  const std::uint32_t limit = 1u << token_count;
  for (std::uint32_t itemset = 1; itemset < limit; ++itemset) {
    std::vector<UserIndex> members;
    std::uint32_t closure = ~0u;
    for (std::size_t u = 0; u < masks.size(); ++u) {
      if ((masks[u] & itemset) == itemset) {
        members.push_back(static_cast<UserIndex>(u));
        closure &= masks[u];
      }
    }
    if (members.size() < minsup || members.empty() || closure != itemset) continue;
    std::vector<TokenIndex> descriptor;
    for (TokenIndex t = 0; t < token_count; ++t) {
      if (itemset & (1u << t)) descriptor.push_back(t);
    }
    groups.push_back(Group{0, std::move(descriptor), MemberSet(std::move(members))});
  }
  canonical_sort(groups);
  return GroupSet(std::move(groups), transactions.size(), minsup);
}

GroupSet brute_force_closed(const Dataset& dataset, std::size_t minsup) {
  return brute_force_closed(dataset.transactions(), dataset.token_count(), minsup);
}

}  // namespace vexplore
