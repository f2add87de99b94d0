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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vexplore/feedback.hpp"
#include "vexplore/group_mining.hpp"
#include "vexplore/ingest.hpp"
#include "vexplore/selection.hpp"
#include "vexplore/simindex.hpp"

namespace vexplore {

// Everything a session reads: the dataset, its groups and their index.
struct Corpus {
  Dataset dataset;
  GroupSet groups;
  SimilarityIndex index;
};

struct SessionParams {
  std::size_t k = 5;
  double alpha = 0.5;
  double theta = 0.05;
  double lambda = 1.0;
  double delta = 0.1;
  // nullopt: unlimited.
  std::optional<double> budget_ms = 100.0;
  std::size_t pool_cap = 200;

  // Throws kInvalidArgument on any out-of-range field.
  void validate() const;
};

nlohmann::json params_to_json(const SessionParams& params);
SessionParams params_from_json(const nlohmann::json& doc, SessionParams defaults = {});

struct ExplorationStep {
  // nullopt marks the root screen.
  std::optional<GroupId> focus;
  std::vector<GroupId> shown;
  std::optional<GroupId> chosen;
  double diversity = 0.0;
  double coverage = 0.0;
  double objective = 0.0;
  double elapsed_ms = 0.0;
  bool budget_exhausted = false;
  // Feedback right after this step's focus was rewarded.
  FeedbackVector feedback;
};

struct MemoEntry {
  enum class Kind { kGroup, kUser };
  Kind kind = Kind::kGroup;
  std::uint32_t id = 0;

  static MemoEntry group(GroupId g) { return {Kind::kGroup, g}; }
  static MemoEntry user(UserIndex u) { return {Kind::kUser, u}; }

  friend bool operator==(const MemoEntry&, const MemoEntry&) = default;
};

// One explorer's state. Not thread-safe; callers serialize mutations.
//
// History holds one step per selection: step i was produced by clicking
// its focus group and lists the groups it showed. The root screen is kept
// outside the history, so backtracking can only return to screens reached
// by a click.
class Session {
 public:
  // Deterministic sessions ignore the time budget and record zero latency.
  Session(std::shared_ptr<const Corpus> corpus, SessionParams params, bool deterministic = false);

  const Corpus& corpus() const { return *corpus_; }
  std::shared_ptr<const Corpus> corpus_handle() const { return corpus_; }
  const SessionParams& params() const { return params_; }
  bool deterministic() const { return deterministic_; }

  const FeedbackVector& feedback() const { return feedback_; }
  const std::vector<ExplorationStep>& history() const { return history_; }
  const std::optional<ExplorationStep>& root() const { return root_; }
  const std::vector<MemoEntry>& memo() const { return memo_; }
  // Directives applied so far, in order, replayable by apply_directive.
  const std::vector<nlohmann::json>& log() const { return log_; }

  // The screen the explorer is looking at: the last history step, or the
  // root screen before any click.
  const ExplorationStep* current() const;

  // Shows the highest-support groups against the whole user universe.
  // Clears history and feedback; the memo is kept. Throws kNotReady on an
  // empty group set.
  GroupSelection root_selection();

  // Throws kIneligibleGroup unless gid is on the current screen or in memo.
  GroupSelection select(GroupId gid);

  // Truncates history to steps [0, step] and restores that step's feedback.
  void backtrack(std::size_t step);

  // Returns false (no-op) when the entity has no feedback mass.
  bool unlearn(Entity entity);

  // Appends if absent. Throws kUnknownGroup / kUnknownUser on bad ids.
  void memo_add(MemoEntry entry);
  // Returns false when the entry was absent.
  bool memo_remove(MemoEntry entry);

  // Applies a replay directive: {"root": true}, {"select": gid or [tokens]},
  // {"backtrack": i}, {"memo": {"group": gid} | {"user": "id"}},
  // {"memo_remove": ...}, {"unlearn": "entity"}.
  void apply_directive(const nlohmann::json& directive);

  nlohmann::json export_json() const;
  // Restores a session exported over the same dataset. Throws
  // kCacheMismatch when the dataset digest differs.
  static Session import_json(std::shared_ptr<const Corpus> corpus, const nlohmann::json& doc);

 private:
  Deadline make_deadline() const;
  GroupSelection explore_from(GroupId focus, Deadline& deadline);
  ExplorationStep record(std::optional<GroupId> focus, const GroupSelection& selection) const;

  std::shared_ptr<const Corpus> corpus_;
  SessionParams params_;
  bool deterministic_ = false;
  FeedbackVector feedback_;
  std::optional<ExplorationStep> root_;
  std::vector<ExplorationStep> history_;
  std::vector<MemoEntry> memo_;
  std::vector<nlohmann::json> log_;
};

// JSON views shared by the CLI and the server.
nlohmann::json group_to_json(const Corpus& corpus, GroupId gid, bool with_members);
nlohmann::json selection_to_json(const Corpus& corpus, const GroupSelection& selection);
nlohmann::json step_to_json(const Corpus& corpus, const ExplorationStep& step);
nlohmann::json history_to_json(const Corpus& corpus, const std::vector<ExplorationStep>& history);
nlohmann::json feedback_to_json(const Dataset& dataset, const FeedbackVector& feedback);
nlohmann::json memo_to_json(const Corpus& corpus, const std::vector<MemoEntry>& memo);
std::vector<std::string> decode_descriptor(const Dataset& dataset,
                                           const std::vector<TokenIndex>& descriptor);

}  // namespace vexplore
