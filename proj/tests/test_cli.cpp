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

#include <sys/wait.h>

#include <cstdio>
#include <string>
#include <vector>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "support.hpp"
#include "vexplore/harness.hpp"
#include "vexplore/storage.hpp"

using namespace vexplore;
using namespace vexplore::testing;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

Run run(const TempDir& dir, const std::vector<std::string>& args) {
  std::string cmd = quote(VEXPLORE_CLI);
  for (const auto& a : args) cmd += " " + quote(a);
  const auto err_file = dir / "stderr.txt";
  cmd += " 2>" + quote(err_file.string());
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = read_file(err_file);
  return r;
}

json run_json(const TempDir& dir, const std::vector<std::string>& args) {
  const Run r = run(dir, args);
  INFO(r.err);
  REQUIRE(r.code == 0);
  return json::parse(r.out);
}

constexpr SynthParams kParams{.users = 300, .seed = 17};

// synth -> ingest -> mine -> index in `dir`, returning the dataset path.
std::string pipeline(const TempDir& dir) {
  run_json(dir, {"synth", "--out", (dir / "raw").string(), "--users", "300", "--seed", "17"});
  run_json(dir, {"ingest", "--actions", (dir / "raw/actions.csv").string(), "--demographics",
                 (dir / "raw/demographics.csv").string(), "--schema", (dir / "raw/schema.json").string(), "--out",
                 (dir / "ds").string()});
  run_json(dir, {"mine", "--dataset", (dir / "ds").string(), "--minsup", "10"});
  run_json(dir, {"index", "--dataset", (dir / "ds").string(), "--fraction", "0.2"});
  return (dir / "ds").string();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("pipeline output matches the library") {
  TempDir dir;
  json j = run_json(dir, {"synth", "--out", (dir / "raw").string(), "--users", "300", "--seed", "17"});
  CHECK(j["cohorts"] == 3);
  const SynthOutput direct = synthesize(kParams);
  CHECK(read_file(dir / "raw/actions.csv") == direct.actions_csv);
  CHECK(read_file(dir / "raw/demographics.csv") == direct.demographics_csv);

  j = run_json(dir, {"ingest", "--actions", (dir / "raw/actions.csv").string(), "--demographics",
                     (dir / "raw/demographics.csv").string(), "--schema", (dir / "raw/schema.json").string(), "--out",
                     (dir / "ds").string()});
  const auto corpus = synth_corpus(kParams, 10, 0.2);
  CHECK(j["digest"] == corpus->dataset.digest());
  CHECK(j["users"] == 300);

  j = run_json(dir, {"mine", "--dataset", (dir / "ds").string(), "--minsup", "10"});
  CHECK(j["groups"] == corpus->groups.size());
  CHECK(j["minsup"] == 10);

  j = run_json(dir, {"index", "--dataset", (dir / "ds").string(), "--fraction", "0.2"});
  std::size_t entries = 0;
  for (const auto& l : corpus->index.lists()) entries += l.size();
  CHECK(j["entries"] == entries);

  const auto loaded = load_index_cache(dir / "ds" / layout::kIndex, corpus->dataset.digest(), 10, 0.2, corpus->groups);
  REQUIRE(loaded);
  CHECK(*loaded == corpus->index);
}

TEST_CASE("replay and bench") {
  TempDir dir;
  const std::string ds = pipeline(dir);
  const auto corpus = synth_corpus(kParams, 10, 0.2);
  Session local(corpus, SessionParams{}, true);
  local.root_selection();
  const GroupId a = local.root()->shown[1];
  local.select(a);
  const GroupId b = local.current()->shown[0];
  local.select(b);
  local.memo_add(MemoEntry::group(a));

  const json script = json::array({json{{"root", true}}, json{{"select", a}}, json{{"select", b}},
                                   json{{"memo", {{"group", a}}}}});
  write_file(dir / "script.json", script.dump());
  const auto exp = (dir / "export.json").string();
  const Run first = run(dir, {"replay", "--dataset", ds, "--script", (dir / "script.json").string(),
                              "--deterministic", "--export", exp});
  INFO(first.err);
  REQUIRE(first.code == 0);
  CHECK(json::parse(first.out) == replay_report(local));
  CHECK(json::parse(read_file(exp)) == local.export_json());

  // Replaying the export reproduces the same bytes.
  const auto exp2 = (dir / "export2.json").string();
  const Run second = run(dir, {"replay", "--dataset", ds, "--script", exp, "--deterministic", "--export", exp2});
  REQUIRE(second.code == 0);
  CHECK(second.out == first.out);
  CHECK(read_file(exp2) == read_file(exp));

  const json bench = run_json(dir, {"bench", "--dataset", ds, "--steps", "30", "--budget-ms", "100"});
  CHECK(bench["steps"] == 30);
  CHECK(bench["p95_ms"].get<double>() >= 0.0);
}

TEST_CASE("mine with minsup above the user count") {
  TempDir dir;
  const std::string ds = pipeline(dir);
  const Run r = run(dir, {"mine", "--dataset", ds, "--minsup", "301"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["groups"] == 0);
  CHECK(r.err.find("no group reaches minsup") != std::string::npos);
  const Dataset d = load_dataset(ds);
  const auto groups = load_groups(d, ds);
  REQUIRE(groups);
  CHECK(groups->empty());
  CHECK(run(dir, {"index", "--dataset", ds}).code == 3);
}

TEST_CASE("exit codes") {
  TempDir dir;
  CHECK(run(dir, {}).code == 2);
  CHECK(run(dir, {"mine"}).code == 2);
  CHECK(run(dir, {"mine", "--dataset", (dir / "x").string(), "--bogus"}).code == 2);
  Run r = run(dir, {"mine", "--dataset", (dir / "missing").string()});
  CHECK(r.code == 3);
  CHECK(r.err.find("dataset_not_found") != std::string::npos);
  write_file(dir / "schema.json", "{not json");
  write_file(dir / "a.csv", "user_id,item_id,value\n");
  write_file(dir / "d.csv", "user_id\n");
  r = run(dir, {"ingest", "--actions", (dir / "a.csv").string(), "--demographics", (dir / "d.csv").string(),
                "--schema", (dir / "schema.json").string(), "--out", (dir / "o").string()});
  CHECK(r.code == 3);
  const std::string ds = pipeline(dir);
  write_file(dir / "bad.json", R"([{"root": true}, {"select": 99999}])");
  CHECK(run(dir, {"replay", "--dataset", ds, "--script", (dir / "bad.json").string(), "--deterministic"}).code == 3);
  CHECK(run(dir, {"replay", "--dataset", ds, "--script", (dir / "bad.json").string(), "--k", "0"}).code == 2);
  CHECK(run(dir, {"synth", "--out", (dir / "s").string(), "--users", "0"}).code == 2);
}

}  // TEST_SUITE
