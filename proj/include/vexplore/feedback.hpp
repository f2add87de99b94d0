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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vexplore/group_mining.hpp"
#include "vexplore/ingest.hpp"

namespace vexplore {

// A user or a descriptor token, namespaced so the two index spaces never
// collide.
struct Entity {
  enum class Kind : std::uint8_t { kUser, kToken };

  Kind kind = Kind::kUser;
  std::uint32_t index = 0;

  static Entity user(UserIndex u) { return {Kind::kUser, u}; }
  static Entity token(TokenIndex t) { return {Kind::kToken, t}; }

  friend auto operator<=>(const Entity&, const Entity&) = default;
};

// "u:<user_id>" for users, the token string itself for tokens.
std::string entity_name(const Dataset& dataset, Entity e);
std::optional<Entity> parse_entity(const Dataset& dataset, std::string_view name);

// Sparse score distribution. Empty means "no feedback yet"; otherwise every
// score is > 0 and the scores sum to 1.
class FeedbackVector {
 public:
  bool empty() const { return scores_.empty(); }
  std::size_t size() const { return scores_.size(); }
  bool contains(Entity e) const { return scores_.contains(e); }
  double score(Entity e) const;
  double total() const;
  const std::map<Entity, double>& entries() const { return scores_; }

  // Builds a vector from raw masses and renormalizes. Nonpositive masses are
  // dropped.
  static FeedbackVector from_masses(const std::map<Entity, double>& masses);
  // Adopts already-normalized scores verbatim (used when importing a saved
  // session). Throws kMalformedInput if they are not a distribution.
  static FeedbackVector restore(std::map<Entity, double> scores);

  friend bool operator==(const FeedbackVector&, const FeedbackVector&) = default;

 private:
  void normalize();

  std::map<Entity, double> scores_;
};

// Sum of F over the group's members (as users) and descriptor tokens.
double feedback_score(const FeedbackVector& feedback, const Group& group);

// Rewards the group's members and descriptor tokens with delta/|E| each,
// then renormalizes. Throws kInvalidArgument when delta <= 0.
FeedbackVector apply_feedback(const FeedbackVector& feedback, const Group& group, double delta);

struct UnlearnResult {
  FeedbackVector feedback;
  // False when the entity was absent; the vector is then unchanged.
  bool removed = false;
};

UnlearnResult unlearn(const FeedbackVector& feedback, Entity entity);

// Dense lookup tables for scoring many groups against one vector. Produces
// the same values as feedback_score.
class FeedbackScorer {
 public:
  explicit FeedbackScorer(const FeedbackVector& feedback);

  bool empty() const { return empty_; }
  double score(const Group& group) const;

 private:
  bool empty_ = true;
  std::vector<double> users_;
  std::vector<double> tokens_;
};

}  // namespace vexplore
