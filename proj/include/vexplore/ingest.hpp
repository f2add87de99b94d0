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

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace vexplore {

using UserIndex = std::uint32_t;
using TokenIndex = std::uint32_t;

struct ValueRange {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const { return v >= lo && v <= hi; }
};

enum class AttributeKind { kCategorical, kNumeric };

struct Attribute {
  std::string name;
  AttributeKind kind = AttributeKind::kCategorical;
  // Bucket edges for numeric attributes, strictly ascending, >= 2 entries.
  // Bucket i is the half-open interval [edges[i], edges[i+1]).
  std::vector<double> edges;

  bool numeric() const { return kind == AttributeKind::kNumeric; }

  // Index of the bucket holding `v`, or nullopt when v lies outside
  // [edges.front(), edges.back()).
  std::optional<std::size_t> bucket_of(double v) const;
  std::string bucket_label(std::size_t bucket) const;
};

class DemographicSchema {
 public:
  DemographicSchema() = default;
  // Throws kInvalidArgument on duplicate names or bad bucket edges.
  explicit DemographicSchema(std::vector<Attribute> attributes);

  const std::vector<Attribute>& attributes() const { return attributes_; }
  std::size_t size() const { return attributes_.size(); }
  // Position of `name` in the schema, or nullopt.
  std::optional<std::size_t> find(std::string_view name) const;

 private:
  std::vector<Attribute> attributes_;
};

// Contents of a schema file: the demographic schema plus the declared range
// of action values.
struct SchemaFile {
  DemographicSchema demographics;
  ValueRange value_range{1.0, 5.0};
};

SchemaFile load_schema(const std::filesystem::path& path);
SchemaFile parse_schema(std::string_view json_text);
std::string schema_to_json(const SchemaFile& schema);

struct ActionRecord {
  std::string user_id;
  std::string item_id;
  double value = 0.0;

  friend bool operator==(const ActionRecord&, const ActionRecord&) = default;
};

struct ActionLoad {
  std::vector<ActionRecord> records;
  // Rows rejected for a non-numeric or out-of-range value, empty ids, or a
  // wrong field count.
  std::size_t dropped = 0;
  // Exact (user, item, value) repeats collapsed into their first occurrence.
  std::size_t duplicates = 0;
};

ActionLoad load_actions(const std::filesystem::path& path, ValueRange range);
ActionLoad parse_actions(std::istream& in, ValueRange range);

using AttributeValue = std::variant<std::string, double>;

struct UserProfile {
  std::string user_id;
  std::map<std::string, AttributeValue> values;

  friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

struct ProfileLoad {
  // One profile per distinct user id, in order of first appearance.
  std::vector<UserProfile> profiles;
  // Numeric cells that failed to parse and were treated as missing.
  std::size_t unparsed_cells = 0;
};

ProfileLoad load_demographics(const std::filesystem::path& path,
                              const DemographicSchema& schema);
ProfileLoad parse_demographics(std::istream& in,
                               const DemographicSchema& schema);

enum class TokenKind { kDemographic, kAction };

struct TokenInfo {
  TokenKind kind;
  // Attribute name for demographic tokens, empty for actions.
  std::string attribute;
  // Categorical value or bucket label; item id for actions.
  std::string value;
};

// Decodes "d:<attr>=<val>" and "a:<item>" token strings.
std::optional<TokenInfo> decode_token(std::string_view token);
std::string demographic_token(std::string_view attribute, std::string_view value);
std::string action_token(std::string_view item_id);

// Binarized corpus. Immutable once built; safe for concurrent reads.
class Dataset {
 public:
  std::size_t user_count() const { return user_ids_.size(); }
  std::size_t token_count() const { return tokens_.size(); }

  const std::vector<std::string>& user_ids() const { return user_ids_; }
  const std::string& user_id(UserIndex u) const { return user_ids_.at(u); }
  std::optional<UserIndex> find_user(std::string_view user_id) const;

  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::string& token(TokenIndex t) const { return tokens_.at(t); }
  std::optional<TokenIndex> find_token(std::string_view token) const;

  // Sorted, duplicate-free token indices per user.
  const std::vector<std::vector<TokenIndex>>& transactions() const {
    return transactions_;
  }
  const std::vector<TokenIndex>& transaction(UserIndex u) const {
    return transactions_.at(u);
  }

  const std::vector<ActionRecord>& actions() const { return actions_; }
  // Raw demographic values per user (numeric values unbucketed).
  const std::map<std::string, AttributeValue>& demographics(UserIndex u) const {
    return demographics_.at(u);
  }
  std::size_t action_count(UserIndex u) const { return action_counts_.at(u); }
  // Mean action value, nullopt for users without actions.
  std::optional<double> mean_value(UserIndex u) const;

  const SchemaFile& schema() const { return schema_; }

  // Stable 64-bit FNV-1a digest over users, tokens, transactions, actions
  // and demographics, rendered as 16 hex digits.
  const std::string& digest() const { return digest_; }

 private:
  friend Dataset build_dataset(const std::vector<ActionRecord>&,
                               const std::vector<UserProfile>&,
                               const SchemaFile&);

  std::vector<std::string> user_ids_;
  std::unordered_map<std::string, UserIndex> user_lookup_;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenIndex> token_lookup_;
  std::vector<std::vector<TokenIndex>> transactions_;
  std::vector<ActionRecord> actions_;
  std::vector<std::map<std::string, AttributeValue>> demographics_;
  std::vector<std::size_t> action_counts_;
  std::vector<double> value_sums_;
  SchemaFile schema_;
  std::string digest_;
};

// Users are indexed in order of first appearance in `profiles`, then in
// `actions`. Tokens are indexed in first-seen order while walking users in
// index order: demographic tokens in schema order, then action tokens in
// action order. Throws kEmptyDataset when there are no users.
Dataset build_dataset(const std::vector<ActionRecord>& actions,
                      const std::vector<UserProfile>& profiles,
                      const SchemaFile& schema);

}  // namespace vexplore
