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

#include "vexplore/simindex.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <fmt/format.h>

#include "vexplore/error.hpp"

namespace vexplore {
namespace {

void check_fraction(double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("index fraction must lie in (0, 1], got {}", fraction),
                {{"fraction", fmt::format("{}", fraction)}});
  }
}

void truncate_sorted(std::vector<Neighbor>& list, std::size_t cap) {
  if (list.size() > cap) {
    std::partial_sort(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(cap), list.end(),
                      neighbor_before);
    list.resize(cap);
  } else {
    std::sort(list.begin(), list.end(), neighbor_before);
  }
  list.shrink_to_fit();
}

}  // namespace

std::span<const Neighbor> SimilarityIndex::list(GroupId g) const {
  if (g >= lists_.size()) {
    throw Error(ErrorCode::kUnknownGroup, fmt::format("unknown group {}", g),
                {{"group", std::to_string(g)}});
  }
  return lists_[g];
}

std::size_t truncation_length(double fraction, std::size_t group_count) {
  if (group_count <= 1) return 0;
  const double raw = fraction * static_cast<double>(group_count - 1);
  return static_cast<std::size_t>(std::ceil(raw - 1e-9));
}

SimilarityIndex build_index(const GroupSet& groups, double fraction, unsigned threads) {
  check_fraction(fraction);
  if (groups.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot index an empty group set");
  const std::size_t n = groups.size();
  const std::size_t cap = truncation_length(fraction, n);
  std::vector<std::vector<Neighbor>> lists(n);

  auto worker = [&](std::size_t first, std::size_t stride) {
    std::vector<std::uint32_t> counts(n, 0);
    std::vector<GroupId> touched;
    for (std::size_t gi = first; gi < n; gi += stride) {
      const Group& g = groups.groups()[gi];
      touched.clear();
      for (UserIndex u : g.members) {
        for (GroupId h : groups.groups_of(u)) {
          if (h == g.id) continue;
          if (counts[h]++ == 0) touched.push_back(h);
        }
      }
      auto& list = lists[gi];
      list.reserve(touched.size());
      for (GroupId h : touched) {
        const auto inter = counts[h];
        counts[h] = 0;
        list.push_back({.id = h,
                        .overlap = inter,
                        .similarity = jaccard_from_counts(inter, g.support(), groups.groups()[h].support())});
      }
      truncate_sorted(list, cap);
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    worker(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t, threads);
  }
  return SimilarityIndex(fraction, std::move(lists));
}

SimilarityIndex build_index_naive(const GroupSet& groups, double fraction) {
  check_fraction(fraction);
  if (groups.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot index an empty group set");
  const std::size_t n = groups.size();
  const std::size_t cap = truncation_length(fraction, n);
  std::vector<std::vector<Neighbor>> lists(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Group& a = groups.groups()[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const Group& b = groups.groups()[j];
      const auto inter = intersection_size(a.members, b.members);
      if (inter == 0) continue;
      lists[i].push_back({.id = b.id,
                          .overlap = static_cast<std::uint32_t>(inter),
                          .similarity = jaccard_from_counts(inter, a.support(), b.support())});
    }
    truncate_sorted(lists[i], cap);
  }
  return SimilarityIndex(fraction, std::move(lists));
}

std::span<const Neighbor> neighbors(const SimilarityIndex& index, GroupId gid, std::size_t limit) {
  if (limit == 0) throw Error(ErrorCode::kInvalidArgument, "neighbor limit must be at least 1");
  auto list = index.list(gid);
  return list.first(std::min(limit, list.size()));
}

}  // namespace vexplore
