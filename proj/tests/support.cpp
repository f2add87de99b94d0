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

#include "support.hpp"

#include <sstream>

namespace vexplore::testing {

Dataset synth_dataset(const SynthParams& params) {
  const SynthOutput out = synthesize(params);
  const SchemaFile schema = parse_schema(out.schema_json);
  std::istringstream actions(out.actions_csv);
  std::istringstream demographics(out.demographics_csv);
  return build_dataset(parse_actions(actions, schema.value_range).records,
                       parse_demographics(demographics, schema.demographics).profiles, schema);
}

std::shared_ptr<const Corpus> synth_corpus(const SynthParams& params, std::size_t minsup, double fraction) {
  Dataset ds = synth_dataset(params);
  GroupSet groups = mine_closed_groups(ds, {minsup, 5'000'000});
  SimilarityIndex index = build_index(groups, fraction);
  return std::make_shared<const Corpus>(Corpus{std::move(ds), std::move(groups), std::move(index)});
}

}  // namespace vexplore::testing
