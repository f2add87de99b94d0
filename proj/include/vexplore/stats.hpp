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
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "vexplore/ingest.hpp"
#include "vexplore/member_set.hpp"

namespace vexplore {

enum class DimensionKind { kCategorical, kNumeric };
enum class DimensionSource { kAttribute, kActionCount, kMeanValue };

struct Dimension {
  std::string name;
  DimensionKind kind = DimensionKind::kCategorical;
  DimensionSource source = DimensionSource::kAttribute;
};

inline constexpr std::string_view kActionCountDimension = "action_count";
inline constexpr std::string_view kMeanValueDimension = "mean_value";
inline constexpr std::string_view kMissingBin = "(missing)";
inline constexpr std::size_t kNumericBins = 10;

// Schema attributes in order, then action_count and mean_value.
std::vector<Dimension> stats_dimensions(const Dataset& dataset);

struct ValueSet {
  std::set<std::string> values;
  friend bool operator==(const ValueSet&, const ValueSet&) = default;
};

// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

using Predicate = std::variant<ValueSet, Interval>;

// At most one predicate per dimension.
class FilterState {
 public:
  // Throws kInvalidArgument for an interval with lo > hi.
  void set(const std::string& dimension, Predicate predicate);
  void clear(const std::string& dimension) { predicates_.erase(dimension); }
  bool empty() const { return predicates_.empty(); }
  const std::map<std::string, Predicate>& predicates() const { return predicates_; }
  const Predicate* find(const std::string& dimension) const;

  // {"gender": {"values": ["F"]}, "age": {"range": [30, 45]}}
  nlohmann::json to_json() const;
  static FilterState from_json(const nlohmann::json& doc);

  friend bool operator==(const FilterState&, const FilterState&) = default;

 private:
  std::map<std::string, Predicate> predicates_;
};

struct HistogramBin {
  std::string label;
  // Numeric bins only; the last bin is closed on the right.
  std::optional<double> lo;
  std::optional<double> hi;
  std::size_t count = 0;

  friend bool operator==(const HistogramBin&, const HistogramBin&) = default;
};

struct Histogram {
  std::string dimension;
  std::vector<HistogramBin> bins;

  std::size_t total() const;
  friend bool operator==(const Histogram&, const Histogram&) = default;
};

struct MemberRow {
  std::string user_id;
  std::map<std::string, AttributeValue> demographics;
  std::size_t action_count = 0;
  std::optional<double> mean_value;

  friend bool operator==(const MemberRow&, const MemberRow&) = default;
};

// Immutable per-group facet layout: bins and per-dimension sorted orders.
// Built once per group and shared by every CrossFilter over it.
class FacetIndex {
 public:
  FacetIndex(const Dataset& dataset, const MemberSet& members);

  const Dataset& dataset() const { return *dataset_; }
  const std::vector<UserIndex>& members() const { return members_; }
  const std::vector<Dimension>& dimensions() const { return dimensions_; }
  // Throws kUnknownDimension.
  std::size_t dimension_index(std::string_view name) const;

 private:
  friend class CrossFilter;

  struct Facet {
    Dimension dim;
    std::vector<HistogramBin> bins;  // counts unused; last bin is "(missing)"
    std::vector<std::uint32_t> bin_of;  // per member position
    // Categorical: category id per member (-1 missing), category names sorted.
    std::vector<std::int32_t> category_of;
    std::vector<std::string> categories;
    std::vector<std::vector<std::uint32_t>> members_of_category;
    // Numeric: value per member, and present members sorted by value.
    std::vector<double> value_of;
    std::vector<std::uint32_t> sorted;
    std::vector<std::uint32_t> missing;
  };

  const Dataset* dataset_;
  std::vector<UserIndex> members_;
  std::vector<Dimension> dimensions_;
  std::vector<Facet> facets_;
};

// Coordinated-views filter engine. Brushing one dimension touches only the
// members whose pass state on that dimension changes, and every histogram
// count is maintained incrementally.
class CrossFilter {
 public:
  explicit CrossFilter(std::shared_ptr<const FacetIndex> index);

  // Throws kUnknownDimension, or kInvalidArgument when the predicate kind
  // does not match the dimension kind.
  void set_filter(const std::string& dimension, const Predicate& predicate);
  void clear_filter(const std::string& dimension);
  void apply(const FilterState& filters);
  const FilterState& filters() const { return filters_; }

  // Counts over members passing every filter except this dimension's own.
  Histogram histogram(std::string_view dimension) const;
  // Members passing every filter, ordered by user id.
  std::vector<MemberRow> rows() const;
  std::vector<UserIndex> passing() const;

 private:
  void update(std::size_t dim, const std::vector<std::uint32_t>& changed);

  std::shared_ptr<const FacetIndex> index_;
  FilterState filters_;
  std::vector<std::uint64_t> fail_mask_;
  std::vector<std::vector<std::size_t>> counts_;
};

MemberRow member_row(const Dataset& dataset, UserIndex u);

// Stateless wrappers: build the facet layout, apply `filters`, read.
Histogram histogram(const Dataset& dataset, const MemberSet& members, std::string_view dimension,
                    const FilterState& filters);
std::vector<MemberRow> filtered_members(const Dataset& dataset, const MemberSet& members,
                                        const FilterState& filters);

struct DimensionSummary {
  std::string dimension;
  DimensionKind kind = DimensionKind::kCategorical;
  std::size_t present = 0;
  // Categorical: share of each present value among members having one.
  std::map<std::string, double> shares;
  // Numeric: over members having a value.
  std::optional<double> min;
  std::optional<double> max;
  std::optional<double> mean;
};

std::vector<DimensionSummary> summary_stats(const Dataset& dataset, const MemberSet& members);

struct ProjectionPoint {
  std::string user_id;
  double x = 0.0;
  double y = 0.0;
  std::string label;
};

struct Projection {
  std::string label_dimension;
  std::vector<std::string> features;
  // Unit axes in feature space; the first nonzero component is positive.
  std::vector<double> axis1;
  std::vector<double> axis2;
  std::vector<ProjectionPoint> points;
  // Members without a value for the label dimension.
  std::vector<std::string> excluded;
};

struct LdaOptions {
  // Ridge added to the within-class scatter.
  double ridge = 1e-6;
};

// First categorical schema attribute, if any.
std::optional<std::string> default_label_dimension(const Dataset& dataset);

// Linear discriminant projection of the members onto two axes. Features are
// z-scored numeric attributes (population std, missing imputed as the mean),
// one-hot categorical attributes other than the label, and z-scored
// action_count / mean_value; constant columns are dropped. With two classes
// the second axis is the leading principal direction of the within-class
// residuals. Throws kUnknownDimension, kInsufficientClasses or
// kDegenerateFeatures.
Projection lda_project(const Dataset& dataset, const MemberSet& members,
                       const std::string& label_dimension, const LdaOptions& options = {});

nlohmann::json histogram_to_json(const Histogram& histogram);
nlohmann::json rows_to_json(const std::vector<MemberRow>& rows);
nlohmann::json projection_to_json(const Projection& projection);
nlohmann::json summary_to_json(const std::vector<DimensionSummary>& summary);

}  // namespace vexplore
