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
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vexplore/session.hpp"

namespace vexplore {

// --- pipeline steps behind the CLI -----------------------------------------

struct IngestReport {
  std::size_t users = 0;
  std::size_t tokens = 0;
  std::size_t actions = 0;
  std::size_t dropped_actions = 0;
  std::size_t duplicate_actions = 0;
  std::size_t unparsed_cells = 0;
  std::string digest;

  nlohmann::json to_json() const;
};

IngestReport ingest_files(const std::filesystem::path& actions_csv,
                          const std::filesystem::path& demographics_csv,
                          const std::filesystem::path& schema_json,
                          const std::filesystem::path& out_dir);

struct MineReport {
  std::size_t groups = 0;
  std::size_t minsup = 0;
  std::size_t users = 0;

  nlohmann::json to_json() const;
};

// Mines the dataset in `dir` and writes its group store; a stale index
// cache is removed. minsup defaults to default_minsup(users).
MineReport mine_dir(const std::filesystem::path& dir, std::optional<std::size_t> minsup,
                    std::size_t max_groups = 5'000'000);

struct IndexReport {
  std::size_t groups = 0;
  std::size_t entries = 0;
  double fraction = 0.0;

  nlohmann::json to_json() const;
};

IndexReport index_dir(const std::filesystem::path& dir, double fraction);

// --- replay ------------------------------------------------------------------

// Accepts a directive array, {"directives": [...]} or an exported session
// (whose params and log are reused). A leading root directive is implied
// when the script has none.
Session replay_script(std::shared_ptr<const Corpus> corpus, const nlohmann::json& script,
                      const SessionParams& defaults, bool deterministic);

// Per-step metrics and the final memo: {"digest", "root", "steps": [...],
// "memo": [...]}. Each step lists focus, shown, chosen, diversity,
// coverage, objective, elapsed_ms and budget_exhausted.
nlohmann::json replay_report(const Session& session);

// --- latency bench -----------------------------------------------------------

struct BenchOptions {
  SessionParams params;
  std::size_t steps = 200;
  std::uint64_t seed = 1;
};

struct BenchReport {
  std::size_t steps = 0;
  std::size_t full_steps = 0;       // steps that returned k groups
  std::size_t exhausted_steps = 0;  // steps cut by the budget
  std::size_t restarts = 0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
  double p99_ms = 0.0;
  double max_ms = 0.0;
  double mean_diversity = 0.0;
  double mean_coverage = 0.0;

  nlohmann::json to_json() const;
};

// Random walk: root screen, then repeatedly click a uniformly chosen shown
// group, restarting at the root on a dead end. Latency is wall time of each
// click, end to end.
BenchReport run_bench(std::shared_ptr<const Corpus> corpus, const BenchOptions& options);

// --- scripted explorer ---------------------------------------------------------

// Starting from the root screen, clicks the shown group sharing the most
// members with `target` (lowest id on ties) until the target itself is on
// screen, which is then clicked. Returns the number of clicks including the
// final one, or nullopt if the target is not clicked within `max_clicks`.
std::optional<std::size_t> clicks_to_target(std::shared_ptr<const Corpus> corpus, GroupId target,
                                            const SessionParams& params, std::size_t max_clicks);

}  // namespace vexplore
