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

#include <fmt/format.h>

#include "vexplore/error.hpp"
#include "vexplore/stats.hpp"

namespace vexplore {

using nlohmann::json;

std::vector<Dimension> stats_dimensions(const Dataset& dataset) {
  std::vector<Dimension> dims;
  for (const auto& a : dataset.schema().demographics.attributes()) {
    dims.push_back({a.name, a.numeric() ? DimensionKind::kNumeric : DimensionKind::kCategorical,
                    DimensionSource::kAttribute});
  }
  dims.push_back({std::string(kActionCountDimension), DimensionKind::kNumeric,
                  DimensionSource::kActionCount});
  dims.push_back({std::string(kMeanValueDimension), DimensionKind::kNumeric,
                  DimensionSource::kMeanValue});
  return dims;
}

void FilterState::set(const std::string& dimension, Predicate predicate) {
  if (auto* iv = std::get_if<Interval>(&predicate)) {
    if (!(iv->lo <= iv->hi)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("interval on '{}' needs lo <= hi", dimension),
                  {{"dimension", dimension}});
    }
  }
  predicates_[dimension] = std::move(predicate);
}

const Predicate* FilterState::find(const std::string& dimension) const {
  auto it = predicates_.find(dimension);
  return it == predicates_.end() ? nullptr : &it->second;
}

json FilterState::to_json() const {
  json out = json::object();
  for (const auto& [dim, pred] : predicates_) {
    if (auto* vs = std::get_if<ValueSet>(&pred)) {
      out[dim] = json{{"values", vs->values}};
    } else {
      const auto& iv = std::get<Interval>(pred);
      out[dim] = json{{"range", {iv.lo, iv.hi}}};
    }
  }
  return out;
}

FilterState FilterState::from_json(const json& doc) {
  FilterState out;
  if (doc.is_null()) return out;
  if (!doc.is_object()) throw Error(ErrorCode::kInvalidArgument, "filters must be an object");
  try {
    for (const auto& [dim, pred] : doc.items()) {
      if (pred.contains("values")) {
        out.set(dim, ValueSet{pred.at("values").get<std::set<std::string>>()});
      } else if (pred.contains("range")) {
        const auto r = pred.at("range").get<std::vector<double>>();
        if (r.size() != 2) throw Error(ErrorCode::kInvalidArgument, "range needs [lo, hi]");
        out.set(dim, Interval{r[0], r[1]});
      } else {
        throw Error(ErrorCode::kInvalidArgument,
                    "filter on '" + dim + "' needs 'values' or 'range'", {{"dimension", dim}});
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad filters: ") + e.what());
  }
  return out;
}

std::size_t Histogram::total() const {
  std::size_t sum = 0;
  for (const auto& b : bins) sum += b.count;
  return sum;
}

MemberRow member_row(const Dataset& dataset, UserIndex u) {
  return {dataset.user_id(u), dataset.demographics(u), dataset.action_count(u),
          dataset.mean_value(u)};
}

namespace {

std::optional<double> numeric_value(const Dataset& ds, const Dimension& dim, UserIndex u) {
  switch (dim.source) {
    case DimensionSource::kActionCount:
      return static_cast<double>(ds.action_count(u));
    case DimensionSource::kMeanValue:
      return ds.mean_value(u);
    case DimensionSource::kAttribute: {
      const auto& demo = ds.demographics(u);
      auto it = demo.find(dim.name);
      if (it == demo.end()) return std::nullopt;
      if (auto* d = std::get_if<double>(&it->second)) return *d;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::optional<std::string> categorical_value(const Dataset& ds, const Dimension& dim,
                                             UserIndex u) {
  const auto& demo = ds.demographics(u);
  auto it = demo.find(dim.name);
  if (it == demo.end()) return std::nullopt;
  if (auto* s = std::get_if<std::string>(&it->second)) return *s;
  return std::nullopt;
}

}  // namespace

FacetIndex::FacetIndex(const Dataset& dataset, const MemberSet& members)
    : dataset_(&dataset),
      members_(members.begin(), members.end()),
      dimensions_(stats_dimensions(dataset)) {
  if (dimensions_.size() > 64) {
    throw Error(ErrorCode::kInvalidArgument, "at most 64 stats dimensions are supported");
  }
  const auto n = static_cast<std::uint32_t>(members_.size());
  for (const auto& dim : dimensions_) {
    Facet f;
    f.dim = dim;
    f.bin_of.resize(n);
    if (dim.kind == DimensionKind::kCategorical) {
      std::vector<std::optional<std::string>> raw(n);
      for (std::uint32_t p = 0; p < n; ++p) {
        raw[p] = categorical_value(dataset, dim, members_[p]);
        if (raw[p]) f.categories.push_back(*raw[p]);
      }
      std::sort(f.categories.begin(), f.categories.end());
      f.categories.erase(std::unique(f.categories.begin(), f.categories.end()), f.categories.end());
      f.members_of_category.resize(f.categories.size());
      f.category_of.assign(n, -1);
      for (const auto& c : f.categories) f.bins.push_back({c, std::nullopt, std::nullopt, 0});
      for (std::uint32_t p = 0; p < n; ++p) {
        if (!raw[p]) {
          f.missing.push_back(p);
          continue;
        }
        auto it = std::lower_bound(f.categories.begin(), f.categories.end(), *raw[p]);
        const auto c = static_cast<std::int32_t>(it - f.categories.begin());
        f.category_of[p] = c;
        f.members_of_category[c].push_back(p);
        f.bin_of[p] = static_cast<std::uint32_t>(c);
      }
    } else {
      f.value_of.assign(n, std::numeric_limits<double>::quiet_NaN());
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::uint32_t p = 0; p < n; ++p) {
        if (auto v = numeric_value(dataset, dim, members_[p])) {
          f.value_of[p] = *v;
          f.sorted.push_back(p);
          lo = std::min(lo, *v);
          hi = std::max(hi, *v);
        } else {
          f.missing.push_back(p);
        }
      }
      std::stable_sort(f.sorted.begin(), f.sorted.end(),
                       [&](std::uint32_t a, std::uint32_t b) { return f.value_of[a] < f.value_of[b]; });
      if (!f.sorted.empty()) {
        if (lo == hi) {
          f.bins.push_back({fmt::format("[{},{}]", lo, hi), lo, hi, 0});
          for (auto p : f.sorted) f.bin_of[p] = 0;
        } else {
          const double width = (hi - lo) / static_cast<double>(kNumericBins);
          for (std::size_t b = 0; b < kNumericBins; ++b) {
            const double blo = lo + width * static_cast<double>(b);
            const double bhi = b + 1 == kNumericBins ? hi : lo + width * static_cast<double>(b + 1);
            const bool last = b + 1 == kNumericBins;
            f.bins.push_back({fmt::format("[{},{}{}", blo, bhi, last ? "]" : ")"), blo, bhi, 0});
          }
          for (auto p : f.sorted) {
            const double v = f.value_of[p];
            auto b = static_cast<std::size_t>(std::floor((v - lo) / width));
            b = std::min(b, kNumericBins - 1);
            // guard against rounding at bin edges
            while (b > 0 && v < *f.bins[b].lo) --b;
            while (b + 1 < kNumericBins && v >= *f.bins[b + 1].lo) ++b;
            f.bin_of[p] = static_cast<std::uint32_t>(b);
          }
        }
      }
    }
    const auto missing_bin = static_cast<std::uint32_t>(f.bins.size());
    f.bins.push_back({std::string(kMissingBin), std::nullopt, std::nullopt, 0});
    for (auto p : f.missing) f.bin_of[p] = missing_bin;
    facets_.push_back(std::move(f));
  }
}

std::size_t FacetIndex::dimension_index(std::string_view name) const {
  for (std::size_t d = 0; d < dimensions_.size(); ++d) {
    if (dimensions_[d].name == name) return d;
  }
  throw Error(ErrorCode::kUnknownDimension, fmt::format("unknown dimension '{}'", name),
              {{"dimension", std::string(name)}});
}

CrossFilter::CrossFilter(std::shared_ptr<const FacetIndex> index)
    : index_(std::move(index)), fail_mask_(index_->members().size(), 0) {
  counts_.resize(index_->facets_.size());
  for (std::size_t d = 0; d < index_->facets_.size(); ++d) {
    const auto& f = index_->facets_[d];
    counts_[d].assign(f.bins.size(), 0);
    for (auto b : f.bin_of) ++counts_[d][b];
  }
}

void CrossFilter::set_filter(const std::string& dimension, const Predicate& predicate) {
  const std::size_t d = index_->dimension_index(dimension);
  const auto& f = index_->facets_[d];
  const bool numeric = f.dim.kind == DimensionKind::kNumeric;
  if (numeric != std::holds_alternative<Interval>(predicate)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("dimension '{}' takes a {} predicate", dimension,
                            numeric ? "range" : "value-set"),
                {{"dimension", dimension}});
  }
  FilterState next = filters_;
  next.set(dimension, predicate);
  const Predicate* before = filters_.find(dimension);
  const Predicate* after = next.find(dimension);

  std::vector<std::uint32_t> changed;
  if (numeric) {
    // Passing present members form a contiguous run of the sorted order.
    auto run = [&](const Predicate* p) -> std::pair<std::size_t, std::size_t> {
      if (!p) return {0, f.sorted.size()};
      const auto& iv = std::get<Interval>(*p);
      auto first = std::lower_bound(f.sorted.begin(), f.sorted.end(), iv.lo,
                                    [&](std::uint32_t pos, double x) { return f.value_of[pos] < x; });
      auto last = std::upper_bound(f.sorted.begin(), f.sorted.end(), iv.hi,
                                   [&](double x, std::uint32_t pos) { return x < f.value_of[pos]; });
      return {static_cast<std::size_t>(first - f.sorted.begin()),
              static_cast<std::size_t>(std::max(first, last) - f.sorted.begin())};
    };
    const auto [a0, b0] = run(before);
    const auto [a1, b1] = run(after);
    auto take = [&](std::size_t from, std::size_t to) {
      for (std::size_t i = from; i < to; ++i) changed.push_back(f.sorted[i]);
    };
    if (b0 <= a1 || b1 <= a0) {
      take(a0, b0);
      take(a1, b1);
    } else {
      take(std::min(a0, a1), std::max(a0, a1));
      take(std::min(b0, b1), std::max(b0, b1));
    }
    if (!before) changed.insert(changed.end(), f.missing.begin(), f.missing.end());
  } else {
    const auto& next_values = std::get<ValueSet>(*after).values;
    for (std::size_t c = 0; c < f.categories.size(); ++c) {
      const bool was = !before || std::get<ValueSet>(*before).values.contains(f.categories[c]);
      const bool now = next_values.contains(f.categories[c]);
      if (was != now) {
        changed.insert(changed.end(), f.members_of_category[c].begin(),
                       f.members_of_category[c].end());
      }
    }
    if (!before) changed.insert(changed.end(), f.missing.begin(), f.missing.end());
  }
  filters_ = std::move(next);
  update(d, changed);
}

void CrossFilter::clear_filter(const std::string& dimension) {
  const std::size_t d = index_->dimension_index(dimension);
  const Predicate* before = filters_.find(dimension);
  if (!before) return;
  std::vector<std::uint32_t> changed;
  const auto n = static_cast<std::uint32_t>(fail_mask_.size());
  for (std::uint32_t p = 0; p < n; ++p) {
    if (fail_mask_[p] >> d & 1u) changed.push_back(p);
  }
  filters_.clear(dimension);
  update(d, changed);
}

void CrossFilter::apply(const FilterState& filters) {
  std::vector<std::string> stale;
  for (const auto& [dim, pred] : filters_.predicates()) {
    if (!filters.find(dim)) stale.push_back(dim);
  }
  for (const auto& dim : stale) clear_filter(dim);
  for (const auto& [dim, pred] : filters.predicates()) {
    const Predicate* current = filters_.find(dim);
    if (!current || !(*current == pred)) set_filter(dim, pred);
  }
}

void CrossFilter::update(std::size_t dim, const std::vector<std::uint32_t>& changed) {
  const std::uint64_t bit = std::uint64_t{1} << dim;
  const std::size_t dims = counts_.size();
  for (auto pos : changed) {
    const std::uint64_t old_mask = fail_mask_[pos];
    const std::uint64_t new_mask = old_mask ^ bit;
    fail_mask_[pos] = new_mask;
    for (std::size_t e = 0; e < dims; ++e) {
      const std::uint64_t others = ~(std::uint64_t{1} << e);
      const bool was = (old_mask & others) == 0;
      const bool now = (new_mask & others) == 0;
      if (was == now) continue;
      auto& slot = counts_[e][index_->facets_[e].bin_of[pos]];
      if (now) {
        ++slot;
      } else {
        --slot;
      }
    }
  }
}

Histogram CrossFilter::histogram(std::string_view dimension) const {
  const std::size_t d = index_->dimension_index(dimension);
  Histogram h{std::string(dimension), index_->facets_[d].bins};
  for (std::size_t b = 0; b < h.bins.size(); ++b) h.bins[b].count = counts_[d][b];
  return h;
}

std::vector<UserIndex> CrossFilter::passing() const {
  std::vector<UserIndex> out;
  for (std::size_t p = 0; p < fail_mask_.size(); ++p) {
    if (fail_mask_[p] == 0) out.push_back(index_->members()[p]);
  }
  return out;
}

std::vector<MemberRow> CrossFilter::rows() const {
  std::vector<MemberRow> out;
  for (UserIndex u : passing()) out.push_back(member_row(index_->dataset(), u));
  std::sort(out.begin(), out.end(),
            [](const MemberRow& a, const MemberRow& b) { return a.user_id < b.user_id; });
  return out;
}

Histogram histogram(const Dataset& dataset, const MemberSet& members, std::string_view dimension,
                    const FilterState& filters) {
  CrossFilter cf(std::make_shared<FacetIndex>(dataset, members));
  cf.apply(filters);
  return cf.histogram(dimension);
}

std::vector<MemberRow> filtered_members(const Dataset& dataset, const MemberSet& members,
                                        const FilterState& filters) {
  CrossFilter cf(std::make_shared<FacetIndex>(dataset, members));
  cf.apply(filters);
  return cf.rows();
}

}  // namespace vexplore
