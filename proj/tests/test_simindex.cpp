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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include <doctest.h>

#include "support.hpp"
#include "vexplore/error.hpp"
#include "vexplore/simindex.hpp"

using namespace vexplore;
using vexplore::testing::groups_from_members;
using vexplore::testing::random_member_lists;

namespace {

// Full similarity-sorted overlap lists by direct pairwise intersection.
std::vector<std::vector<std::pair<GroupId, double>>> full_lists(const GroupSet& gs) {
  std::vector<std::vector<std::pair<GroupId, double>>> out(gs.size());
  for (const auto& a : gs.groups()) {
    for (const auto& b : gs.groups()) {
      if (a.id == b.id) continue;
      std::vector<UserIndex> inter;
      std::set_intersection(a.members.begin(), a.members.end(), b.members.begin(), b.members.end(),
                            std::back_inserter(inter));
      if (inter.empty()) continue;
      const double uni = static_cast<double>(a.support() + b.support() - inter.size());
      out[a.id].emplace_back(b.id, static_cast<double>(inter.size()) / uni);
    }
    std::sort(out[a.id].begin(), out[a.id].end(), [](const auto& x, const auto& y) {
      return x.second != y.second ? x.second > y.second : x.first < y.first;
    });
  }
  return out;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

}  // namespace

TEST_SUITE("simindex") {

TEST_CASE("jaccard basics") {
  const MemberSet a = MemberSet::from_unsorted({1, 2, 3});
  const MemberSet b = MemberSet::from_unsorted({1, 2});
  const MemberSet c = MemberSet::from_unsorted({7, 8});
  CHECK(jaccard(a, b) == doctest::Approx(2.0 / 3.0));
  CHECK(jaccard(a, a) == 1.0);
  CHECK(jaccard(a, c) == 0.0);
  CHECK(jaccard(MemberSet{}, MemberSet{}) == 0.0);
  CHECK(jaccard(a, b) == jaccard(b, a));
}

TEST_CASE("intersection size matches a set intersection for skewed sizes") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    auto lists = random_member_lists(rng, 2, 5000, trial % 2 ? 3000 : 40);
    lists[1].resize(std::min<std::size_t>(lists[1].size(), 1 + rng() % 10));
    const MemberSet a = MemberSet::from_unsorted(lists[0]);
    const MemberSet b = MemberSet::from_unsorted(lists[1]);
    std::vector<UserIndex> inter;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
    CHECK(intersection_size(a, b) == inter.size());
    CHECK(intersection_size(b, a) == inter.size());
  }
}

TEST_CASE("three pairwise overlapping groups, no truncation") {
  const GroupSet gs = groups_from_members({{0, 1, 2, 3}, {2, 3, 4}, {3, 4, 5, 6}}, 7);
  const SimilarityIndex idx = build_index(gs, 1.0);
  for (GroupId g = 0; g < 3; ++g) CHECK(idx.list(g).size() == 2);
  // 0: {1: 2/5, 2: 1/7}; 1: {2: 2/5, 0: 2/5}; 2: {1: 2/5, 0: 1/7}
  CHECK(idx.list(0)[0].id == 1);
  CHECK(idx.list(0)[1].id == 2);
  CHECK(idx.list(1)[0].id == 0);
  CHECK(idx.list(1)[1].id == 2);
  CHECK(idx.list(1)[0].similarity == idx.list(1)[1].similarity);
  CHECK(idx.list(2)[0].id == 1);
  CHECK(idx.list(0)[1].overlap == 1);
}

TEST_CASE("ten percent of 101 groups keeps at most 10 neighbors") {
  CHECK(truncation_length(0.1, 101) == 10);
  CHECK(truncation_length(0.1, 1) == 0);
  CHECK(truncation_length(0.1, 2) == 1);
  CHECK(truncation_length(1.0, 50) == 49);
  std::vector<std::vector<UserIndex>> members;
  for (UserIndex i = 0; i < 101; ++i) members.push_back({0, i + 1});
  const GroupSet gs = groups_from_members(members, 102);
  const SimilarityIndex idx = build_index(gs, 0.1);
  for (GroupId g = 0; g < gs.size(); ++g) CHECK(idx.list(g).size() == 10);
}

TEST_CASE("disjoint groups have empty lists") {
  const GroupSet gs = groups_from_members({{0}, {1, 2}, {3}}, 4);
  for (double f : {0.1, 0.5, 1.0}) {
    const SimilarityIndex idx = build_index(gs, f);
    for (GroupId g = 0; g < 3; ++g) CHECK(idx.list(g).empty());
  }
}

TEST_CASE("neighbors limit semantics and errors") {
  const GroupSet gs = groups_from_members({{0, 1, 2, 3}, {2, 3, 4}, {3, 4, 5, 6}}, 7);
  const SimilarityIndex idx = build_index(gs, 1.0);
  const auto one = neighbors(idx, 0, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].id == 1);
  CHECK(neighbors(idx, 0, 100).size() == 2);
  CHECK(code_of([&] { neighbors(idx, 0, 0); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { neighbors(idx, 9, 1); }) == ErrorCode::kUnknownGroup);
  CHECK(code_of([&] { build_index(gs, 0.0); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { build_index(gs, 1.5); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { build_index(GroupSet{}, 0.1); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("index equals the direct pairwise oracle and is a prefix of the full index") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t count = 2 + rng() % 150;
    const std::size_t universe = 20 + rng() % 200;
    const GroupSet gs = groups_from_members(random_member_lists(rng, count, universe, 30), universe);
    const auto oracle = full_lists(gs);
    const SimilarityIndex full = build_index(gs, 1.0);
    for (double f : {0.05, 0.1, 0.37, 1.0}) {
      const SimilarityIndex idx = build_index(gs, f);
      CHECK(idx == build_index_naive(gs, f));
      const std::size_t cap = truncation_length(f, gs.size());
      for (GroupId g = 0; g < gs.size(); ++g) {
        const auto list = idx.list(g);
        REQUIRE(list.size() == std::min(cap, oracle[g].size()));
        for (std::size_t i = 0; i < list.size(); ++i) {
          CHECK(list[i].id == oracle[g][i].first);
          CHECK(list[i].similarity == oracle[g][i].second);
          CHECK(list[i] == full.list(g)[i]);
          CHECK(list[i].id != g);
          CHECK(list[i].similarity > 0.0);
          CHECK(list[i].similarity <= 1.0);
        }
      }
    }
  }
}

TEST_CASE("thread count does not change the index") {
  std::mt19937_64 rng(6);
  const GroupSet gs = groups_from_members(random_member_lists(rng, 300, 500, 60), 500);
  const SimilarityIndex one = build_index(gs, 0.2, 1);
  CHECK(one == build_index(gs, 0.2, 3));
  CHECK(one == build_index(gs, 0.2, 8));
}

TEST_CASE("inverted build beats the all-pairs scan on sparse groups") {
  std::mt19937_64 rng(7);
  const GroupSet gs = groups_from_members(random_member_lists(rng, 10'000, 200'000, 40), 200'000);
  using Clock = std::chrono::steady_clock;
  auto t0 = Clock::now();
  const SimilarityIndex fast = build_index(gs, 0.1, 1);
  auto t1 = Clock::now();
  const SimilarityIndex slow = build_index_naive(gs, 0.1);
  auto t2 = Clock::now();
  const double fast_s = std::chrono::duration<double>(t1 - t0).count();
  const double slow_s = std::chrono::duration<double>(t2 - t1).count();
  MESSAGE("inverted " << fast_s << " s, naive " << slow_s << " s, speedup " << slow_s / fast_s);
  CHECK(fast == slow);
  CHECK(slow_s >= 5.0 * fast_s);
}

}  // TEST_SUITE
