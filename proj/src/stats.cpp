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

#include <algorithm>
#include <cmath>

#include "vexplore/stats.hpp"

namespace vexplore {

using nlohmann::json;

std::vector<DimensionSummary> summary_stats(const Dataset& dataset, const MemberSet& members) {
  std::vector<DimensionSummary> out;
  for (const auto& dim : stats_dimensions(dataset)) {
    DimensionSummary s{dim.name, dim.kind, 0, {}, std::nullopt, std::nullopt, std::nullopt};
    if (dim.kind == DimensionKind::kCategorical) {
      std::map<std::string, std::size_t> counts;
      for (UserIndex u : members) {
        const auto& demo = dataset.demographics(u);
        auto it = demo.find(dim.name);
        if (it == demo.end()) continue;
        ++counts[std::get<std::string>(it->second)];
        ++s.present;
      }
      for (const auto& [value, c] : counts) {
        s.shares[value] = static_cast<double>(c) / static_cast<double>(s.present);
      }
    } else {
      double sum = 0.0;
      for (UserIndex u : members) {
        std::optional<double> v;
        if (dim.source == DimensionSource::kActionCount) {
          v = static_cast<double>(dataset.action_count(u));
        } else if (dim.source == DimensionSource::kMeanValue) {
          v = dataset.mean_value(u);
        } else {
          const auto& demo = dataset.demographics(u);
          if (auto it = demo.find(dim.name); it != demo.end()) v = std::get<double>(it->second);
        }
        if (!v) continue;
        ++s.present;
        sum += *v;
        s.min = s.min ? std::min(*s.min, *v) : *v;
        s.max = s.max ? std::max(*s.max, *v) : *v;
      }
      if (s.present > 0) s.mean = sum / static_cast<double>(s.present);
    }
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

json value_to_json(const AttributeValue& v) {
  return std::visit([](const auto& x) { return json(x); }, v);
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json histogram_to_json(const Histogram& h) {
  json bins = json::array();
  for (const auto& b : h.bins) {
    json j{{"label", b.label}, {"count", b.count}};
    if (b.lo) j["lo"] = *b.lo;
    if (b.hi) j["hi"] = *b.hi;
    bins.push_back(std::move(j));
  }
  return json{{"dimension", h.dimension}, {"bins", bins}};
}

json rows_to_json(const std::vector<MemberRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    json demo = json::object();
    for (const auto& [k, v] : r.demographics) demo[k] = value_to_json(v);
    out.push_back(json{{"user_id", r.user_id},
                       {"demographics", demo},
                       {"action_count", r.action_count},
                       {"mean_value", optional_number(r.mean_value)}});
  }
  return out;
}

json projection_to_json(const Projection& p) {
  json points = json::array();
  for (const auto& pt : p.points) {
    points.push_back(json{{"user_id", pt.user_id}, {"x", pt.x}, {"y", pt.y}, {"label", pt.label}});
  }
  return json{{"label_dimension", p.label_dimension},
              {"features", p.features},
              {"axis1", p.axis1},
              {"axis2", p.axis2},
              {"points", points},
              {"excluded", p.excluded}};
}

json summary_to_json(const std::vector<DimensionSummary>& summary) {
  json out = json::array();
  for (const auto& s : summary) {
    json j{{"dimension", s.dimension},
           {"kind", s.kind == DimensionKind::kNumeric ? "numeric" : "categorical"},
           {"present", s.present}};
    if (s.kind == DimensionKind::kCategorical) {
      j["shares"] = s.shares;
    } else {
      j["min"] = optional_number(s.min);
      j["max"] = optional_number(s.max);
      j["mean"] = optional_number(s.mean);
    }
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace vexplore
