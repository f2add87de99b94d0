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

#include "vexplore/feedback.hpp"

#include <cmath>

#include "vexplore/error.hpp"

namespace vexplore {

std::string entity_name(const Dataset& dataset, Entity e) {
  if (e.kind == Entity::Kind::kUser) return "u:" + dataset.user_id(e.index);
  return dataset.token(e.index);
}

std::optional<Entity> parse_entity(const Dataset& dataset, std::string_view name) {
  if (name.starts_with("u:")) {
    if (auto u = dataset.find_user(name.substr(2))) return Entity::user(*u);
    return std::nullopt;
  }
  if (auto t = dataset.find_token(name)) return Entity::token(*t);
  return std::nullopt;
}

double FeedbackVector::score(Entity e) const {
  auto it = scores_.find(e);
  return it == scores_.end() ? 0.0 : it->second;
}

double FeedbackVector::total() const {
  double sum = 0.0;
  for (const auto& [e, s] : scores_) sum += s;
  return sum;
}

void FeedbackVector::normalize() {
  const double sum = total();
  if (sum <= 0.0) {
    scores_.clear();
    return;
  }
  for (auto it = scores_.begin(); it != scores_.end();) {
    it->second /= sum;
    // Entities that decayed below the normal range count as forgotten.
    if (!std::isnormal(it->second)) {
      it = scores_.erase(it);
    } else {
      ++it;
    }
  }
}

FeedbackVector FeedbackVector::from_masses(const std::map<Entity, double>& masses) {
  FeedbackVector out;
  for (const auto& [e, m] : masses) {
    if (m > 0.0 && std::isfinite(m)) out.scores_.emplace(e, m);
  }
  out.normalize();
  return out;
}

FeedbackVector FeedbackVector::restore(std::map<Entity, double> scores) {
  FeedbackVector out;
  out.scores_ = std::move(scores);
  for (const auto& [e, s] : out.scores_) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw Error(ErrorCode::kMalformedInput, "feedback scores must be positive");
    }
  }
  if (!out.scores_.empty() && std::abs(out.total() - 1.0) > 1e-9) {
    throw Error(ErrorCode::kMalformedInput, "feedback scores must sum to 1");
  }
  return out;
}

double feedback_score(const FeedbackVector& feedback, const Group& group) {
  if (feedback.empty()) return 0.0;
  double sum = 0.0;
  for (UserIndex u : group.members) sum += feedback.score(Entity::user(u));
  for (TokenIndex t : group.descriptor) sum += feedback.score(Entity::token(t));
  return sum;
}

FeedbackVector apply_feedback(const FeedbackVector& feedback, const Group& group, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw Error(ErrorCode::kInvalidArgument, "feedback reward must be positive");
  }
  const std::size_t entities = group.members.size() + group.descriptor.size();
  if (entities == 0) throw Error(ErrorCode::kInvalidArgument, "group has no entities to reward");
  const double share = delta / static_cast<double>(entities);
  std::map<Entity, double> masses = feedback.entries();
  for (UserIndex u : group.members) masses[Entity::user(u)] += share;
  for (TokenIndex t : group.descriptor) masses[Entity::token(t)] += share;
  return FeedbackVector::from_masses(masses);
}

UnlearnResult unlearn(const FeedbackVector& feedback, Entity entity) {
  if (!feedback.contains(entity)) return {feedback, false};
  std::map<Entity, double> masses = feedback.entries();
  masses.erase(entity);
  return {FeedbackVector::from_masses(masses), true};
}

FeedbackScorer::FeedbackScorer(const FeedbackVector& feedback) : empty_(feedback.empty()) {
  for (const auto& [e, s] : feedback.entries()) {
    auto& table = e.kind == Entity::Kind::kUser ? users_ : tokens_;
    if (e.index >= table.size()) table.resize(e.index + 1, 0.0);
    table[e.index] = s;
  }
}

double FeedbackScorer::score(const Group& group) const {
  if (empty_) return 0.0;
  double sum = 0.0;
  for (UserIndex u : group.members) sum += u < users_.size() ? users_[u] : 0.0;
  for (TokenIndex t : group.descriptor) sum += t < tokens_.size() ? tokens_[t] : 0.0;
  return sum;
}

}  // namespace vexplore
