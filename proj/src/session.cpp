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

#include "vexplore/session.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "vexplore/error.hpp"

namespace vexplore {

using nlohmann::json;

void SessionParams::validate() const {
  auto fail = [](const std::string& what, const std::string& field) {
    throw Error(ErrorCode::kInvalidArgument, what, {{"field", field}});
  };
  if (k < 1 || k > kMaxGroupsShown) fail(fmt::format("k must lie in [1, {}]", kMaxGroupsShown), "k");
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha must lie in [0, 1]", "alpha");
  if (!(theta >= 0.0 && theta <= 1.0)) fail("theta must lie in [0, 1]", "theta");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail("lambda must be >= 0", "lambda");
  if (!(delta > 0.0) || !std::isfinite(delta)) fail("delta must be > 0", "delta");
  if (budget_ms && !(*budget_ms > 0.0)) fail("budget_ms must be > 0", "budget_ms");
  if (pool_cap < 1) fail("pool_cap must be >= 1", "pool_cap");
}

json params_to_json(const SessionParams& p) {
  return json{{"k", p.k},
              {"alpha", p.alpha},
              {"theta", p.theta},
              {"lambda", p.lambda},
              {"delta", p.delta},
              {"budget_ms", p.budget_ms ? json(*p.budget_ms) : json(nullptr)},
              {"pool_cap", p.pool_cap}};
}

SessionParams params_from_json(const json& doc, SessionParams p) {
  if (doc.is_null()) return p;
  if (!doc.is_object()) throw Error(ErrorCode::kInvalidArgument, "params must be an object");
  try {
    if (doc.contains("k")) p.k = doc.at("k").get<std::size_t>();
    if (doc.contains("alpha")) p.alpha = doc.at("alpha").get<double>();
    if (doc.contains("theta")) p.theta = doc.at("theta").get<double>();
    if (doc.contains("lambda")) p.lambda = doc.at("lambda").get<double>();
    if (doc.contains("delta")) p.delta = doc.at("delta").get<double>();
    if (doc.contains("budget_ms")) {
      const auto& b = doc.at("budget_ms");
      p.budget_ms = b.is_null() ? std::nullopt : std::optional<double>(b.get<double>());
    }
    if (doc.contains("pool_cap")) p.pool_cap = doc.at("pool_cap").get<std::size_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad params: ") + e.what());
  }
  p.validate();
  return p;
}

std::vector<std::string> decode_descriptor(const Dataset& dataset,
                                           const std::vector<TokenIndex>& descriptor) {
  std::vector<std::string> out;
  out.reserve(descriptor.size());
  for (TokenIndex t : descriptor) out.push_back(dataset.token(t));
  return out;
}

json group_to_json(const Corpus& corpus, GroupId gid, bool with_members) {
  const Group& g = corpus.groups.at(gid);
  json j{{"id", g.id},
         {"descriptor", decode_descriptor(corpus.dataset, g.descriptor)},
         {"support", g.support()}};
  if (with_members) {
    json members = json::array();
    for (UserIndex u : g.members) members.push_back(corpus.dataset.user_id(u));
    j["members"] = std::move(members);
  }
  return j;
}

json selection_to_json(const Corpus& corpus, const GroupSelection& s) {
  json groups = json::array();
  for (GroupId id : s.ids) groups.push_back(group_to_json(corpus, id, false));
  return json{{"groups", groups},
              {"diversity", s.diversity},
              {"coverage", s.coverage},
              {"objective", s.objective},
              {"elapsed_ms", s.elapsed_ms},
              {"budget_exhausted", s.budget_exhausted}};
}

json feedback_to_json(const Dataset& dataset, const FeedbackVector& feedback) {
  json entries = json::array();
  for (const auto& [e, s] : feedback.entries()) {
    entries.push_back(json{{"entity", entity_name(dataset, e)}, {"score", s}});
  }
  return entries;
}

namespace {

FeedbackVector feedback_from_json(const Dataset& dataset, const json& entries) {
  std::map<Entity, double> scores;
  for (const auto& item : entries) {
    const auto name = item.at("entity").get<std::string>();
    auto e = parse_entity(dataset, name);
    if (!e) throw Error(ErrorCode::kUnknownEntity, "unknown entity '" + name + "'");
    scores[*e] = item.at("score").get<double>();
  }
  return FeedbackVector::restore(std::move(scores));
}

json optional_id(const std::optional<GroupId>& id) { return id ? json(*id) : json(nullptr); }

ExplorationStep step_from_json(const Dataset& dataset, const json& j) {
  ExplorationStep s;
  if (!j.at("focus").is_null()) s.focus = j.at("focus").get<GroupId>();
  s.shown = j.at("shown").get<std::vector<GroupId>>();
  if (!j.at("chosen").is_null()) s.chosen = j.at("chosen").get<GroupId>();
  s.diversity = j.at("diversity").get<double>();
  s.coverage = j.at("coverage").get<double>();
  s.objective = j.at("objective").get<double>();
  s.elapsed_ms = j.at("elapsed_ms").get<double>();
  s.budget_exhausted = j.at("budget_exhausted").get<bool>();
  s.feedback = feedback_from_json(dataset, j.at("feedback"));
  return s;
}

MemoEntry memo_entry_from_json(const Dataset& dataset, const json& j) {
  if (j.contains("group")) return MemoEntry::group(j.at("group").get<GroupId>());
  if (j.contains("user")) {
    const auto id = j.at("user").get<std::string>();
    auto u = dataset.find_user(id);
    if (!u) throw Error(ErrorCode::kUnknownUser, "unknown user '" + id + "'", {{"user", id}});
    return MemoEntry::user(*u);
  }
  throw Error(ErrorCode::kInvalidArgument, "memo entry needs a 'group' or 'user' key");
}

json memo_entry_to_directive(const Dataset& dataset, const MemoEntry& e) {
  if (e.kind == MemoEntry::Kind::kGroup) return json{{"group", e.id}};
  return json{{"user", dataset.user_id(e.id)}};
}

}  // namespace

json step_to_json(const Corpus& corpus, const ExplorationStep& s) {
  return json{{"focus", optional_id(s.focus)},
              {"shown", s.shown},
              {"chosen", optional_id(s.chosen)},
              {"diversity", s.diversity},
              {"coverage", s.coverage},
              {"objective", s.objective},
              {"elapsed_ms", s.elapsed_ms},
              {"budget_exhausted", s.budget_exhausted},
              {"feedback", feedback_to_json(corpus.dataset, s.feedback)}};
}

json history_to_json(const Corpus& corpus, const std::vector<ExplorationStep>& history) {
  json out = json::array();
  for (const auto& s : history) out.push_back(step_to_json(corpus, s));
  return out;
}

json memo_to_json(const Corpus& corpus, const std::vector<MemoEntry>& memo) {
  json out = json::array();
  for (const auto& e : memo) {
    if (e.kind == MemoEntry::Kind::kGroup) {
      json g = group_to_json(corpus, e.id, true);
      out.push_back(json{{"kind", "group"},
                         {"group", e.id},
                         {"descriptor", g["descriptor"]},
                         {"support", g["support"]},
                         {"members", g["members"]}});
    } else {
      out.push_back(json{{"kind", "user"}, {"user", corpus.dataset.user_id(e.id)}});
    }
  }
  return out;
}

Session::Session(std::shared_ptr<const Corpus> corpus, SessionParams params, bool deterministic)
    : corpus_(std::move(corpus)), params_(params), deterministic_(deterministic) {
  if (!corpus_) throw Error(ErrorCode::kInvalidArgument, "session needs a corpus");
  params_.validate();
}

const ExplorationStep* Session::current() const {
  if (!history_.empty()) return &history_.back();
  if (root_) return &*root_;
  return nullptr;
}

Deadline Session::make_deadline() const {
  if (deterministic_ || !params_.budget_ms) return Deadline::infinite();
  return Deadline::after(std::chrono::duration<double, std::milli>(*params_.budget_ms));
}

ExplorationStep Session::record(std::optional<GroupId> focus,
                                const GroupSelection& selection) const {
  ExplorationStep step;
  step.focus = focus;
  step.shown = selection.ids;
  step.diversity = selection.diversity;
  step.coverage = selection.coverage;
  step.objective = selection.objective;
  step.elapsed_ms = selection.elapsed_ms;
  step.budget_exhausted = selection.budget_exhausted;
  step.feedback = feedback_;
  return step;
}

GroupSelection Session::root_selection() {
  const auto& groups = corpus_->groups;
  if (groups.empty()) throw Error(ErrorCode::kNotReady, "no groups to explore");
  Deadline deadline = make_deadline();
  feedback_ = FeedbackVector{};
  history_.clear();
  std::vector<UserIndex> everyone(groups.universe());
  for (std::size_t u = 0; u < everyone.size(); ++u) everyone[u] = static_cast<UserIndex>(u);
  const auto pool = root_pool(groups, params_.pool_cap);
  auto selection = select_k(groups, pool, {params_.k, params_.alpha},
                            MemberSet(std::move(everyone)), deadline);
  if (deterministic_) selection.elapsed_ms = 0.0;
  root_ = record(std::nullopt, selection);
  log_.push_back(json{{"root", true}});
  return selection;
}

GroupSelection Session::explore_from(GroupId focus, Deadline& deadline) {
  const auto& groups = corpus_->groups;
  const auto pool = candidate_pool(corpus_->index, groups, feedback_, focus,
                                   {params_.theta, params_.lambda, params_.pool_cap});
  auto selection =
      select_k(groups, pool, {params_.k, params_.alpha}, groups.at(focus).members, deadline);
  if (deterministic_) selection.elapsed_ms = 0.0;
  return selection;
}

GroupSelection Session::select(GroupId gid) {
  const Group& group = corpus_->groups.at(gid);
  Deadline deadline = make_deadline();
  const ExplorationStep* screen = current();
  const bool on_screen =
      screen && std::find(screen->shown.begin(), screen->shown.end(), gid) != screen->shown.end();
  const bool bookmarked =
      std::find(memo_.begin(), memo_.end(), MemoEntry::group(gid)) != memo_.end();
  if (!on_screen && !bookmarked) {
    throw Error(ErrorCode::kIneligibleGroup,
                fmt::format("group {} is neither shown nor bookmarked", gid),
                {{"group", std::to_string(gid)}});
  }
  feedback_ = apply_feedback(feedback_, group, params_.delta);
  if (on_screen) {
    (history_.empty() ? *root_ : history_.back()).chosen = gid;
  }
  auto selection = explore_from(gid, deadline);
  history_.push_back(record(gid, selection));
  log_.push_back(json{{"select", gid}});
  return selection;
}

void Session::backtrack(std::size_t step) {
  if (step >= history_.size()) {
    throw Error(ErrorCode::kOutOfRange,
                fmt::format("step {} outside history of length {}", step, history_.size()),
                {{"step", std::to_string(step)}, {"length", std::to_string(history_.size())}});
  }
  history_.resize(step + 1);
  history_.back().chosen.reset();
  feedback_ = history_.back().feedback;
  log_.push_back(json{{"backtrack", step}});
}

bool Session::unlearn(Entity entity) {
  auto result = vexplore::unlearn(feedback_, entity);
  if (!result.removed) return false;
  feedback_ = std::move(result.feedback);
  log_.push_back(json{{"unlearn", entity_name(corpus_->dataset, entity)}});
  return true;
}

void Session::memo_add(MemoEntry entry) {
  if (entry.kind == MemoEntry::Kind::kGroup) {
    corpus_->groups.at(entry.id);
  } else if (entry.id >= corpus_->dataset.user_count()) {
    throw Error(ErrorCode::kUnknownUser, fmt::format("unknown user index {}", entry.id));
  }
  if (std::find(memo_.begin(), memo_.end(), entry) == memo_.end()) memo_.push_back(entry);
  log_.push_back(json{{"memo", memo_entry_to_directive(corpus_->dataset, entry)}});
}

bool Session::memo_remove(MemoEntry entry) {
  auto it = std::find(memo_.begin(), memo_.end(), entry);
  if (it == memo_.end()) return false;
  memo_.erase(it);
  log_.push_back(json{{"memo_remove", memo_entry_to_directive(corpus_->dataset, entry)}});
  return true;
}

void Session::apply_directive(const json& d) {
  if (!d.is_object() || d.size() != 1) {
    throw Error(ErrorCode::kMalformedInput, "directive must be an object with one key: " + d.dump());
  }
  const auto& [key, value] = *d.items().begin();
  try {
    if (key == "root") {
      root_selection();
    } else if (key == "select") {
      GroupId gid = 0;
      if (value.is_array()) {
        std::vector<TokenIndex> descriptor;
        for (const auto& t : value) {
          const auto name = t.get<std::string>();
          auto idx = corpus_->dataset.find_token(name);
          if (!idx) throw Error(ErrorCode::kUnknownGroup, "unknown token '" + name + "'");
          descriptor.push_back(*idx);
        }
        std::sort(descriptor.begin(), descriptor.end());
        auto found = corpus_->groups.find(descriptor);
        if (!found) throw Error(ErrorCode::kUnknownGroup, "no group with descriptor " + value.dump());
        gid = *found;
      } else {
        gid = value.get<GroupId>();
      }
      select(gid);
    } else if (key == "backtrack") {
      backtrack(value.get<std::size_t>());
    } else if (key == "memo") {
      memo_add(memo_entry_from_json(corpus_->dataset, value));
    } else if (key == "memo_remove") {
      memo_remove(memo_entry_from_json(corpus_->dataset, value));
    } else if (key == "unlearn") {
      const auto name = value.get<std::string>();
      auto e = parse_entity(corpus_->dataset, name);
      if (e) unlearn(*e);
    } else {
      throw Error(ErrorCode::kMalformedInput, "unknown directive '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedInput, "bad directive " + d.dump() + ": " + e.what());
  }
}

json Session::export_json() const {
  json memo = json::array();
  for (const auto& e : memo_) memo.push_back(memo_entry_to_directive(corpus_->dataset, e));
  return json{{"format", "vexplore-session"},
              {"version", 1},
              {"dataset_digest", corpus_->dataset.digest()},
              {"deterministic", deterministic_},
              {"params", params_to_json(params_)},
              {"feedback", feedback_to_json(corpus_->dataset, feedback_)},
              {"root", root_ ? step_to_json(*corpus_, *root_) : json(nullptr)},
              {"history", history_to_json(*corpus_, history_)},
              {"memo", memo},
              {"log", log_}};
}

Session Session::import_json(std::shared_ptr<const Corpus> corpus, const json& doc) {
  try {
    if (doc.at("format").get<std::string>() != "vexplore-session" ||
        doc.at("version").get<int>() != 1) {
      throw Error(ErrorCode::kMalformedInput, "not a version-1 session document");
    }
    const auto digest = doc.at("dataset_digest").get<std::string>();
    if (digest != corpus->dataset.digest()) {
      throw Error(ErrorCode::kCacheMismatch, "session was exported from a different dataset",
                  {{"expected", corpus->dataset.digest()}, {"got", digest}});
    }
    Session s(corpus, params_from_json(doc.at("params")), doc.at("deterministic").get<bool>());
    const Dataset& ds = corpus->dataset;
    s.feedback_ = feedback_from_json(ds, doc.at("feedback"));
    if (!doc.at("root").is_null()) s.root_ = step_from_json(ds, doc.at("root"));
    for (const auto& step : doc.at("history")) s.history_.push_back(step_from_json(ds, step));
    for (const auto& m : doc.at("memo")) s.memo_.push_back(memo_entry_from_json(ds, m));
    for (const auto& d : doc.at("log")) s.log_.push_back(d);
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedInput, std::string("bad session document: ") + e.what());
  }
}

}  // namespace vexplore
