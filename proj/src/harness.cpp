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

#include "vexplore/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "vexplore/error.hpp"
#include "vexplore/storage.hpp"

namespace vexplore {

using nlohmann::json;
namespace fs = std::filesystem;

IngestReport ingest_files(const fs::path& actions_csv, const fs::path& demographics_csv,
                          const fs::path& schema_json, const fs::path& out_dir) {
  const SchemaFile schema = load_schema(schema_json);
  const ActionLoad actions = load_actions(actions_csv, schema.value_range);
  const ProfileLoad profiles = load_demographics(demographics_csv, schema.demographics);
  const Dataset ds = build_dataset(actions.records, profiles.profiles, schema);
  save_dataset(ds, out_dir);
  return {ds.user_count(),   ds.token_count(),     ds.actions().size(),     actions.dropped,
          actions.duplicates, profiles.unparsed_cells, ds.digest()};
}

MineReport mine_dir(const fs::path& dir, std::optional<std::size_t> minsup, std::size_t max_groups) {
  const Dataset ds = load_dataset(dir);
  const std::size_t s = minsup.value_or(default_minsup(ds.user_count()));
  const GroupSet groups = mine_closed_groups(ds, {s, max_groups});
  save_groups(ds, groups, dir);
  fs::remove(dir / layout::kIndex);
  return {groups.size(), s, ds.user_count()};
}

IndexReport index_dir(const fs::path& dir, double fraction) {
  const Dataset ds = load_dataset(dir);
  auto groups = load_groups(ds, dir);
  if (!groups) throw Error(ErrorCode::kNotReady, "no group store in " + dir.string() + "; run mine first");
  if (groups->empty()) throw Error(ErrorCode::kNotReady, "the group store is empty; nothing to index");
  const SimilarityIndex index = build_index(*groups, fraction);
  save_index_cache(dir / layout::kIndex, ds.digest(), groups->minsup(), index);
  std::size_t entries = 0;
  for (const auto& l : index.lists()) entries += l.size();
  return {groups->size(), entries, fraction};
}

json IngestReport::to_json() const {
  return json{{"users", users},
              {"tokens", tokens},
              {"actions", actions},
              {"dropped_actions", dropped_actions},
              {"duplicate_actions", duplicate_actions},
              {"unparsed_cells", unparsed_cells},
              {"digest", digest}};
}

json MineReport::to_json() const { return json{{"groups", groups}, {"minsup", minsup}, {"users", users}}; }

json IndexReport::to_json() const { return json{{"groups", groups}, {"entries", entries}, {"fraction", fraction}}; }

Session replay_script(std::shared_ptr<const Corpus> corpus, const json& script,
                      const SessionParams& defaults, bool deterministic) {
  SessionParams params = defaults;
  json directives;
  if (script.is_array()) {
    directives = script;
  } else if (script.is_object() && script.contains("log")) {
    params = params_from_json(script.at("params"), defaults);
    directives = script.at("log");
  } else if (script.is_object() && script.contains("directives")) {
    if (script.contains("params")) params = params_from_json(script.at("params"), defaults);
    directives = script.at("directives");
  } else {
    throw Error(ErrorCode::kMalformedInput,
                "replay script must be a directive list, {\"directives\": [...]} or a session export");
  }
  Session session(std::move(corpus), params, deterministic);
  if (directives.empty() || !directives.front().contains("root")) session.root_selection();
  for (const auto& d : directives) session.apply_directive(d);
  return session;
}

json replay_report(const Session& session) {
  const Corpus& corpus = session.corpus();
  auto metrics = [&](const ExplorationStep& st) {
    json shown = json::array();
    for (GroupId g : st.shown) shown.push_back(g);
    return json{{"focus", st.focus ? json(*st.focus) : json(nullptr)},
                {"shown", std::move(shown)},
                {"chosen", st.chosen ? json(*st.chosen) : json(nullptr)},
                {"diversity", st.diversity},
                {"coverage", st.coverage},
                {"objective", st.objective},
                {"elapsed_ms", st.elapsed_ms},
                {"budget_exhausted", st.budget_exhausted}};
  };
  json steps = json::array();
  for (const auto& st : session.history()) steps.push_back(metrics(st));
  return json{{"digest", corpus.dataset.digest()},
              {"root", session.root() ? metrics(*session.root()) : json(nullptr)},
              {"steps", std::move(steps)},
              {"memo", memo_to_json(corpus, session.memo())}};
}

json BenchReport::to_json() const {
  return json{{"steps", steps},
              {"full_steps", full_steps},
              {"exhausted_steps", exhausted_steps},
              {"restarts", restarts},
              {"p50_ms", p50_ms},
              {"p95_ms", p95_ms},
              {"p99_ms", p99_ms},
              {"max_ms", max_ms},
              {"mean_diversity", mean_diversity},
              {"mean_coverage", mean_coverage}};
}

namespace {

double percentile(std::vector<double> sorted_values, double q) {
  if (sorted_values.empty()) return 0.0;
  std::sort(sorted_values.begin(), sorted_values.end());
  // nearest-rank
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted_values.size())));
  return sorted_values[std::clamp<std::size_t>(rank, 1, sorted_values.size()) - 1];
}

}  // namespace

BenchReport run_bench(std::shared_ptr<const Corpus> corpus, const BenchOptions& options) {
  Session session(std::move(corpus), options.params, false);
  std::mt19937_64 rng(options.seed);
  BenchReport report;
  std::vector<double> latencies;
  double div_sum = 0.0;
  double cov_sum = 0.0;
  session.root_selection();
  while (report.steps < options.steps) {
    const ExplorationStep* screen = session.current();
    if (!screen || screen->shown.empty()) {
      session.root_selection();
      ++report.restarts;
      if (session.current()->shown.empty()) break;
      continue;
    }
    std::uniform_int_distribution<std::size_t> pick(0, screen->shown.size() - 1);
    const GroupId gid = screen->shown[pick(rng)];
    const auto start = std::chrono::steady_clock::now();
    const GroupSelection sel = session.select(gid);
    const auto end = std::chrono::steady_clock::now();
    latencies.push_back(std::chrono::duration<double, std::milli>(end - start).count());
    ++report.steps;
    if (sel.ids.size() == options.params.k) ++report.full_steps;
    if (sel.budget_exhausted) ++report.exhausted_steps;
    if (!sel.ids.empty()) {
      div_sum += sel.diversity;
      cov_sum += sel.coverage;
    }
  }
  report.p50_ms = percentile(latencies, 0.50);
  report.p95_ms = percentile(latencies, 0.95);
  report.p99_ms = percentile(latencies, 0.99);
  report.max_ms = latencies.empty() ? 0.0 : *std::max_element(latencies.begin(), latencies.end());
  if (report.steps > 0) {
    report.mean_diversity = div_sum / static_cast<double>(report.steps);
    report.mean_coverage = cov_sum / static_cast<double>(report.steps);
  }
  return report;
}

std::optional<std::size_t> clicks_to_target(std::shared_ptr<const Corpus> corpus, GroupId target,
                                            const SessionParams& params, std::size_t max_clicks) {
  const MemberSet& goal = corpus->groups.at(target).members;
  Session session(corpus, params, true);
  session.root_selection();
  for (std::size_t click = 1; click <= max_clicks; ++click) {
    const ExplorationStep* screen = session.current();
    if (screen->shown.empty()) return std::nullopt;
    if (std::find(screen->shown.begin(), screen->shown.end(), target) != screen->shown.end()) {
      session.select(target);
      return click;
    }
    GroupId best = screen->shown.front();
    std::size_t best_overlap = 0;
    bool first = true;
    for (GroupId gid : screen->shown) {
      const std::size_t overlap = intersection_size(corpus->groups.at(gid).members, goal);
      if (first || overlap > best_overlap || (overlap == best_overlap && gid < best)) {
        best = gid;
        best_overlap = overlap;
        first = false;
      }
    }
    session.select(best);
  }
  return std::nullopt;
}

}  // namespace vexplore
