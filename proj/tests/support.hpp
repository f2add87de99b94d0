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

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "vexplore/group_mining.hpp"
#include "vexplore/ingest.hpp"
#include "vexplore/session.hpp"
#include "vexplore/simindex.hpp"
#include "vexplore/synth.hpp"

namespace vexplore::testing {

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("vexplore-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline SchemaFile gender_city_schema() {
  return parse_schema(R"({"attributes": [{"name": "gender", "kind": "categorical"},
                                          {"name": "city", "kind": "categorical"}]})");
}

// u1{M,P,b1} u2{M,P,b1} u3{F,P,b2} u4{F,L,b2}
inline Dataset four_user_dataset() {
  const std::vector<UserProfile> profiles = {
      {"u1", {{"gender", std::string("M")}, {"city", std::string("P")}}},
      {"u2", {{"gender", std::string("M")}, {"city", std::string("P")}}},
      {"u3", {{"gender", std::string("F")}, {"city", std::string("P")}}},
      {"u4", {{"gender", std::string("F")}, {"city", std::string("L")}}},
  };
  const std::vector<ActionRecord> actions = {
      {"u1", "b1", 4.0}, {"u2", "b1", 5.0}, {"u3", "b2", 3.0}, {"u4", "b2", 2.0}};
  return build_dataset(actions, profiles, gender_city_schema());
}

inline std::vector<std::vector<TokenIndex>> random_transactions(std::mt19937_64& rng, std::size_t users,
                                                                std::size_t tokens, double density) {
  std::bernoulli_distribution keep(density);
  std::vector<std::vector<TokenIndex>> out(users);
  for (auto& t : out)
    for (TokenIndex i = 0; i < tokens; ++i)
      if (keep(rng)) t.push_back(i);
  return out;
}

// Groups with given member lists; descriptor {i} keeps them distinct.
inline GroupSet groups_from_members(const std::vector<std::vector<UserIndex>>& members, std::size_t universe) {
  std::vector<Group> groups;
  for (std::size_t i = 0; i < members.size(); ++i) {
    Group g;
    g.descriptor = {static_cast<TokenIndex>(i)};
    g.members = MemberSet::from_unsorted(members[i]);
    groups.push_back(std::move(g));
  }
  return GroupSet(std::move(groups), universe, 1);
}

inline std::vector<std::vector<UserIndex>> random_member_lists(std::mt19937_64& rng, std::size_t count,
                                                               std::size_t universe, std::size_t max_size) {
  std::uniform_int_distribution<std::size_t> size_dist(1, max_size);
  std::uniform_int_distribution<UserIndex> user_dist(0, static_cast<UserIndex>(universe - 1));
  std::vector<std::vector<UserIndex>> out(count);
  for (auto& m : out) {
    const std::size_t n = size_dist(rng);
    for (std::size_t j = 0; j < n; ++j) m.push_back(user_dist(rng));
  }
  return out;
}

Dataset synth_dataset(const SynthParams& params);
// Synthesizes, mines at `minsup` and indexes at `fraction`, all in memory.
std::shared_ptr<const Corpus> synth_corpus(const SynthParams& params, std::size_t minsup, double fraction = 0.1);

}  // namespace vexplore::testing
