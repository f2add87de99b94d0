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

// vexplore command line: build pipelines, serve, replay and bench.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "vexplore/error.hpp"
#include "vexplore/harness.hpp"
#include "vexplore/server.hpp"
#include "vexplore/storage.hpp"
#include "vexplore/synth.hpp"

namespace {

using json = nlohmann::json;
using vexplore::ErrorCode;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitRuntime = 4;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return kExitUsage;
    case ErrorCode::kIoError:
    case ErrorCode::kMalformedInput:
    case ErrorCode::kEmptyDataset:
    case ErrorCode::kDatasetNotFound:
    case ErrorCode::kCacheMismatch:
    case ErrorCode::kNotReady:
    case ErrorCode::kUnknownGroup:
    case ErrorCode::kUnknownUser:
    case ErrorCode::kUnknownEntity:
    case ErrorCode::kIneligibleGroup:
    case ErrorCode::kOutOfRange:
      return kExitData;
    default:
      return kExitRuntime;
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw vexplore::Error(ErrorCode::kIoError, "cannot open " + path, {{"path", path}});
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw vexplore::Error(ErrorCode::kMalformedInput, path + " is not valid JSON", {{"reason", e.what()}});
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw vexplore::Error(ErrorCode::kIoError, "cannot write " + path, {{"path", path}});
}

struct ParamFlags {
  std::optional<std::size_t> k;
  std::optional<double> alpha;
  std::optional<double> theta;
  std::optional<double> lambda;
  std::optional<double> delta;
  std::optional<std::size_t> pool_cap;

  void add(CLI::App* app) {
    app->add_option("--k", k, "groups shown per step (1-7)");
    app->add_option("--alpha", alpha, "diversity/coverage trade-off");
    app->add_option("--theta", theta, "minimum neighbor similarity");
    app->add_option("--lambda", lambda, "feedback weight");
    app->add_option("--delta", delta, "feedback reward per click");
    app->add_option("--pool-cap", pool_cap, "candidate pool size");
  }

  vexplore::SessionParams apply(vexplore::SessionParams p) const {
    if (k) p.k = *k;
    if (alpha) p.alpha = *alpha;
    if (theta) p.theta = *theta;
    if (lambda) p.lambda = *lambda;
    if (delta) p.delta = *delta;
    if (pool_cap) p.pool_cap = *pool_cap;
    return p;
  }
};

}  // namespace

int main(int argc, char** argv) {
  // stdout carries the JSON reports; logs go to stderr.
  spdlog::set_default_logger(spdlog::stderr_color_mt("vexplore"));
  if (const char* level = std::getenv("VEXPLORE_LOG")) {
    spdlog::set_level(spdlog::level::from_str(level));
  } else {
    spdlog::set_level(spdlog::level::warn);
  }

  CLI::App app{"vexplore: interactive user-group exploration"};
  app.require_subcommand(1);

  // ingest
  std::string actions, demographics, schema, out_dir;
  auto* ingest = app.add_subcommand("ingest", "parse CSV inputs into a dataset directory");
  ingest->add_option("--actions", actions, "actions CSV (user_id,item_id,value)")->required();
  ingest->add_option("--demographics", demographics, "demographics CSV")->required();
  ingest->add_option("--schema", schema, "schema JSON")->required();
  ingest->add_option("--out", out_dir, "output dataset directory")->required();

  // mine
  std::string dataset;
  std::optional<std::size_t> minsup;
  std::size_t max_groups = 5'000'000;
  auto* mine = app.add_subcommand("mine", "mine closed frequent groups");
  mine->add_option("--dataset", dataset, "dataset directory")->required();
  mine->add_option("--minsup", minsup, "minimum support (default: max(2, 0.5% of users))");
  mine->add_option("--max-groups", max_groups, "abort above this many groups");

  // index
  double fraction = 0.1;
  auto* index = app.add_subcommand("index", "build the group similarity index");
  index->add_option("--dataset", dataset, "dataset directory")->required();
  index->add_option("--fraction", fraction, "neighbor list length as a fraction of groups");

  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string data_dir = "vexplore-data";
  std::string dataset_id;
  bool deterministic = false;
  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  serve->add_option("--dataset", dataset, "dataset directory to preload");
  serve->add_option("--id", dataset_id, "id of the preloaded dataset (default: directory name)");
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "port (0 picks a free one)");
  serve->add_option("--data-dir", data_dir, "where uploaded datasets are stored");
  serve->add_flag("--deterministic", deterministic, "sessions default to unlimited budget");

  // replay
  std::string script;
  std::string export_path;
  std::optional<double> budget_ms;
  ParamFlags param_flags;
  auto* replay = app.add_subcommand("replay", "replay a directive script or exported session");
  replay->add_option("--dataset", dataset, "dataset directory")->required();
  replay->add_option("--script", script, "script JSON")->required();
  replay->add_flag("--deterministic", deterministic, "unlimited budget, zero recorded latency");
  replay->add_option("--export", export_path, "write the resulting session export here");
  replay->add_option("--budget-ms", budget_ms, "time budget per step");
  param_flags.add(replay);

  // bench
  vexplore::BenchOptions bench_opts;
  double bench_budget = 100.0;
  auto* bench = app.add_subcommand("bench", "random-walk latency benchmark");
  bench->add_option("--dataset", dataset, "dataset directory")->required();
  bench->add_option("--budget-ms", bench_budget, "time budget per step");
  bench->add_option("--steps", bench_opts.steps, "clicks to simulate");
  bench->add_option("--seed", bench_opts.seed, "walk seed");
  param_flags.add(bench);

  // synth
  vexplore::SynthParams sp;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset with planted cohorts");
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--users", sp.users);
  synth->add_option("--attributes", sp.attributes);
  synth->add_option("--values", sp.values_per_attribute, "values per attribute");
  synth->add_option("--with-age", sp.with_age);
  synth->add_option("--items", sp.items);
  synth->add_option("--actions-per-user", sp.actions_per_user);
  synth->add_option("--zipf", sp.zipf);
  synth->add_option("--cohorts", sp.cohorts);
  synth->add_option("--cohort-size", sp.cohort_size);
  synth->add_option("--cohort-tokens", sp.cohort_tokens);
  synth->add_option("--seed", sp.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*ingest) {
      std::cout << vexplore::ingest_files(actions, demographics, schema, out_dir).to_json().dump(2) << "\n";
    } else if (*mine) {
      const auto report = vexplore::mine_dir(dataset, minsup, max_groups);
      if (report.groups == 0) spdlog::warn("no group reaches minsup {}; the group store is empty", report.minsup);
      std::cout << report.to_json().dump(2) << "\n";
    } else if (*index) {
      std::cout << vexplore::index_dir(dataset, fraction).to_json().dump(2) << "\n";
    } else if (*serve) {
      vexplore::ServerConfig config;
      config.host = host;
      config.port = port;
      config.data_dir = data_dir;
      config.deterministic = deterministic;
      vexplore::Server server(config);
      if (!dataset.empty()) {
        const std::string id =
            dataset_id.empty() ? std::filesystem::path(dataset).lexically_normal().filename().string() : dataset_id;
        server.preload(dataset, id.empty() ? "default" : id);
      }
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      const int bound = server.start();
      std::cout << "listening on " << host << ":" << bound << std::endl;
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      server.stop();
    } else if (*replay) {
      auto corpus = vexplore::prepare_corpus(dataset);
      vexplore::SessionParams defaults = param_flags.apply({});
      if (budget_ms) defaults.budget_ms = *budget_ms;
      const auto session = vexplore::replay_script(corpus, read_json_file(script), defaults, deterministic);
      if (!export_path.empty()) write_text(export_path, session.export_json().dump(2) + "\n");
      std::cout << vexplore::replay_report(session).dump(2) << "\n";
    } else if (*bench) {
      bench_opts.params = param_flags.apply({});
      bench_opts.params.budget_ms = bench_budget;
      std::cout << vexplore::run_bench(vexplore::prepare_corpus(dataset), bench_opts).to_json().dump(2) << "\n";
    } else if (*synth) {
      const auto output = vexplore::synthesize(sp);
      vexplore::write_synth(output, synth_out);
      std::cout << json{{"out", synth_out}, {"cohorts", output.cohorts.size()}}.dump(2) << "\n";
    }
  } catch (const vexplore::Error& e) {
    std::cerr << "error: " << vexplore::error_code_name(e.code()) << ": " << e.what() << "\n";
    for (const auto& [k, v] : e.detail()) std::cerr << "  " << k << ": " << v << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
