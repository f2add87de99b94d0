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

#include "vexplore/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "vexplore/error.hpp"

namespace vexplore {
namespace {

class ZipfSampler {
 public:
  ZipfSampler(std::size_t n, double s) {
    std::vector<double> w(n);
    for (std::size_t r = 0; r < n; ++r) w[r] = 1.0 / std::pow(static_cast<double>(r + 1), s);
    dist_ = std::discrete_distribution<std::size_t>(w.begin(), w.end());
  }
  std::size_t operator()(std::mt19937_64& rng) { return dist_(rng); }

 private:
  std::discrete_distribution<std::size_t> dist_;
};

std::vector<std::size_t> sample_distinct(std::mt19937_64& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(all[i], all[pick(rng)]);
  }
  all.resize(k);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

SynthOutput synthesize(const SynthParams& p) {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (p.users == 0) bad("synth needs at least one user");
  if (p.attributes > 0 && p.values_per_attribute == 0) bad("values_per_attribute must be >= 1");
  if (!(p.zipf >= 0.0) || !std::isfinite(p.zipf)) bad("zipf exponent must be >= 0");
  if (p.cohorts > 0) {
    if (p.cohort_size == 0 || p.cohort_size > p.users) bad("cohort_size must lie in [1, users]");
    const std::size_t pool = p.items > 0 ? p.items : p.attributes;
    if (p.cohort_tokens == 0 || p.cohort_tokens > pool) {
      bad(fmt::format("cohort_tokens must lie in [1, {}]", pool));
    }
  }
  if (p.items > 0 && p.actions_per_user > p.items) bad("actions_per_user exceeds the item count");

  std::mt19937_64 rng(p.seed);
  const std::size_t width = std::to_string(std::max<std::size_t>(p.users, 1) - 1).size();
  auto user_id = [&](std::size_t u) { return fmt::format("u{:0{}}", u, width); };
  const std::size_t item_width = std::to_string(std::max<std::size_t>(p.items, 1) - 1).size();
  auto item_id = [&](std::size_t i) { return fmt::format("i{:0{}}", i, item_width); };

  std::vector<std::vector<std::size_t>> demo(p.users, std::vector<std::size_t>(p.attributes));
  std::vector<double> ages(p.users);
  if (p.attributes > 0) {
    ZipfSampler values(p.values_per_attribute, p.zipf);
    for (auto& row : demo) {
      for (auto& v : row) v = values(rng);
    }
  }
  std::uniform_int_distribution<int> age_dist(18, 80);
  for (auto& a : ages) a = age_dist(rng);

  std::vector<std::set<std::size_t>> acted(p.users);
  std::vector<std::vector<std::pair<std::size_t, int>>> ratings(p.users);
  std::uniform_int_distribution<int> rating(1, 5);
  auto rate = [&](std::size_t u, std::size_t item) {
    if (acted[u].insert(item).second) ratings[u].emplace_back(item, rating(rng));
  };
  if (p.items > 0) {
    ZipfSampler popularity(p.items, p.zipf);
    for (std::size_t u = 0; u < p.users; ++u) {
      while (acted[u].size() < p.actions_per_user) rate(u, popularity(rng));
    }
  }

  SynthOutput out;
  for (std::size_t c = 0; c < p.cohorts; ++c) {
    PlantedCohort cohort;
    const auto members = sample_distinct(rng, p.users, p.cohort_size);
    if (p.items > 0) {
      const auto items = sample_distinct(rng, p.items, p.cohort_tokens);
      for (auto i : items) cohort.tokens.push_back("a:" + item_id(i));
      for (auto u : members) {
        for (auto i : items) rate(u, i);
      }
    } else {
      const auto attrs = sample_distinct(rng, p.attributes, p.cohort_tokens);
      std::uniform_int_distribution<std::size_t> value(0, p.values_per_attribute - 1);
      for (auto a : attrs) {
        const auto v = value(rng);
        cohort.tokens.push_back(fmt::format("d:a{}=v{}", a, v));
        for (auto u : members) demo[u][a] = v;
      }
    }
    for (auto u : members) cohort.members.push_back(user_id(u));
    out.cohorts.push_back(std::move(cohort));
  }

  std::ostringstream demographics;
  demographics << "user_id";
  for (std::size_t a = 0; a < p.attributes; ++a) demographics << ",a" << a;
  if (p.with_age) demographics << ",age";
  demographics << '\n';
  for (std::size_t u = 0; u < p.users; ++u) {
    demographics << user_id(u);
    for (auto v : demo[u]) demographics << ",v" << v;
    if (p.with_age) demographics << ',' << ages[u];
    demographics << '\n';
  }
  out.demographics_csv = demographics.str();

  std::ostringstream actions;
  actions << "user_id,item_id,value\n";
  for (std::size_t u = 0; u < p.users; ++u) {
    for (const auto& [item, value] : ratings[u]) {
      actions << user_id(u) << ',' << item_id(item) << ',' << value << '\n';
    }
  }
  out.actions_csv = actions.str();

  nlohmann::json attrs = nlohmann::json::array();
  for (std::size_t a = 0; a < p.attributes; ++a) {
    attrs.push_back({{"name", fmt::format("a{}", a)}, {"kind", "categorical"}});
  }
  if (p.with_age) {
    attrs.push_back({{"name", "age"}, {"kind", "numeric"}, {"edges", {18, 25, 35, 50, 65, 81}}});
  }
  out.schema_json = nlohmann::json{{"attributes", attrs}, {"value_range", {1, 5}}}.dump(1) + "\n";
  return out;
}

void write_synth(const SynthOutput& output, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::kIoError, "cannot write " + (dir / name).string());
    f << text;
  };
  write("actions.csv", output.actions_csv);
  write("demographics.csv", output.demographics_csv);
  write("schema.json", output.schema_json);
  nlohmann::json cohorts = nlohmann::json::array();
  for (const auto& c : output.cohorts) {
    cohorts.push_back({{"tokens", c.tokens}, {"members", c.members}});
  }
  write("cohorts.json", cohorts.dump(1) + "\n");
}

}  // namespace vexplore
