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
#include <string>
#include <vector>

namespace vexplore {

struct SynthParams {
  std::size_t users = 1000;
  // Categorical attributes a0..a{n-1}.
  std::size_t attributes = 4;
  std::size_t values_per_attribute = 5;
  // Adds a numeric "age" attribute bucketed at 18/25/35/50/65/81.
  bool with_age = true;
  std::size_t items = 200;
  std::size_t actions_per_user = 8;
  // Zipf exponent for attribute values and item popularity; 0 is uniform.
  double zipf = 1.0;
  std::size_t cohorts = 3;
  std::size_t cohort_size = 100;
  // Tokens shared by every cohort member: items when items > 0, otherwise
  // attribute values.
  std::size_t cohort_tokens = 3;
  std::uint64_t seed = 42;
};

struct PlantedCohort {
  std::vector<std::string> tokens;  // token strings, e.g. "a:i0042"
  std::vector<std::string> members;
};

struct SynthOutput {
  std::string actions_csv;
  std::string demographics_csv;
  std::string schema_json;
  std::vector<PlantedCohort> cohorts;
};

// Fully determined by the params (seed included). Throws kInvalidArgument
// on degenerate params.
SynthOutput synthesize(const SynthParams& params);

// Writes actions.csv, demographics.csv, schema.json and cohorts.json.
void write_synth(const SynthOutput& output, const std::filesystem::path& dir);

}  // namespace vexplore
