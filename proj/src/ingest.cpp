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

#include "vexplore/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "vexplore/csv.hpp"
#include "vexplore/error.hpp"

namespace vexplore {
namespace {

std::optional<double> parse_number(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string(),
                {{"path", path.string()}});
  }
  return in;
}

void expect_header(const std::optional<std::vector<std::string>>& header,
                   const std::vector<std::string>& expected, std::size_t line) {
  if (!header) {
    throw Error(ErrorCode::kMalformedInput, "missing header row",
                {{"row", "1"}, {"expected", fmt::format("{}", fmt::join(expected, ","))}});
  }
  const auto& got = *header;
  for (std::size_t col = 0; col < std::max(got.size(), expected.size()); ++col) {
    const std::string have = col < got.size() ? got[col] : "";
    const std::string want = col < expected.size() ? expected[col] : "";
    // A UTF-8 byte order mark may precede the first header cell.
    std::string_view h = have;
    if (col == 0 && h.starts_with("\xEF\xBB\xBF")) h.remove_prefix(3);
    if (h != want) {
      throw Error(ErrorCode::kMalformedInput,
                  fmt::format("header mismatch at row {}, column {}: expected '{}', got '{}'",
                              line, col + 1, want, h),
                  {{"row", std::to_string(line)},
                   {"column", std::to_string(col + 1)},
                   {"expected", want},
                   {"got", std::string(h)}});
    }
  }
}

std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::optional<std::size_t> Attribute::bucket_of(double v) const {
  if (edges.size() < 2 || v < edges.front() || v >= edges.back()) return std::nullopt;
  auto it = std::upper_bound(edges.begin(), edges.end(), v);
  return static_cast<std::size_t>(it - edges.begin()) - 1;
}

std::string Attribute::bucket_label(std::size_t bucket) const {
  return fmt::format("[{},{})", edges.at(bucket), edges.at(bucket + 1));
}

DemographicSchema::DemographicSchema(std::vector<Attribute> attributes)
    : attributes_(std::move(attributes)) {
  std::set<std::string> seen;
  for (const auto& a : attributes_) {
    if (a.name.empty() || a.name == "user_id") {
      throw Error(ErrorCode::kInvalidArgument, "invalid attribute name '" + a.name + "'");
    }
    if (!seen.insert(a.name).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate attribute '" + a.name + "'");
    }
    if (a.numeric()) {
      if (a.edges.size() < 2) {
        throw Error(ErrorCode::kInvalidArgument,
                    "numeric attribute '" + a.name + "' needs at least 2 bucket edges");
      }
      for (std::size_t i = 1; i < a.edges.size(); ++i) {
        if (!(a.edges[i - 1] < a.edges[i])) {
          throw Error(ErrorCode::kInvalidArgument,
                      "bucket edges of '" + a.name + "' must be strictly ascending");
        }
      }
    }
  }
}

std::optional<std::size_t> DemographicSchema::find(std::string_view name) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].name == name) return i;
  }
  return std::nullopt;
}

SchemaFile parse_schema(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedInput, std::string("schema is not valid JSON: ") + e.what());
  }
  try {
    SchemaFile out;
    std::vector<Attribute> attrs;
    for (const auto& a : doc.value("attributes", nlohmann::json::array())) {
      Attribute attr;
      attr.name = a.at("name").get<std::string>();
      const auto kind = a.value("kind", std::string("categorical"));
      if (kind == "numeric") {
        attr.kind = AttributeKind::kNumeric;
        attr.edges = a.at("edges").get<std::vector<double>>();
      } else if (kind != "categorical") {
        throw Error(ErrorCode::kInvalidArgument, "unknown attribute kind '" + kind + "'");
      }
      attrs.push_back(std::move(attr));
    }
    out.demographics = DemographicSchema(std::move(attrs));
    if (doc.contains("value_range")) {
      const auto r = doc.at("value_range").get<std::vector<double>>();
      if (r.size() != 2 || !(r[0] <= r[1])) {
        throw Error(ErrorCode::kInvalidArgument, "value_range must be [lo, hi] with lo <= hi");
      }
      out.value_range = {r[0], r[1]};
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedInput, std::string("bad schema document: ") + e.what());
  } catch (const Error& e) {
    // A bad schema file is bad input, whatever the constructor calls it.
    if (e.code() != ErrorCode::kInvalidArgument) throw;
    throw Error(ErrorCode::kMalformedInput, e.what(), e.detail());
  }
}

SchemaFile load_schema(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_schema(buf.str());
}

std::string schema_to_json(const SchemaFile& schema) {
  nlohmann::json attrs = nlohmann::json::array();
  for (const auto& a : schema.demographics.attributes()) {
    nlohmann::json j{{"name", a.name}, {"kind", a.numeric() ? "numeric" : "categorical"}};
    if (a.numeric()) j["edges"] = a.edges;
    attrs.push_back(std::move(j));
  }
  nlohmann::json doc{{"attributes", attrs},
                     {"value_range", {schema.value_range.lo, schema.value_range.hi}}};
  return doc.dump();
}

ActionLoad parse_actions(std::istream& in, ValueRange range) {
  CsvReader reader(in);
  auto header = reader.next();
  expect_header(header, {"user_id", "item_id", "value"}, reader.line());

  ActionLoad out;
  std::set<std::tuple<std::string, std::string, double>> seen;
  while (auto row = reader.next()) {
    if (row->size() != 3 || (*row)[0].empty() || (*row)[1].empty()) {
      ++out.dropped;
      continue;
    }
    auto value = parse_number((*row)[2]);
    if (!value || !range.contains(*value)) {
      ++out.dropped;
      continue;
    }
    if (!seen.emplace((*row)[0], (*row)[1], *value).second) {
      ++out.duplicates;
      continue;
    }
    out.records.push_back({std::move((*row)[0]), std::move((*row)[1]), *value});
  }
  return out;
}

ActionLoad load_actions(const std::filesystem::path& path, ValueRange range) {
  auto in = open_input(path);
  return parse_actions(in, range);
}

ProfileLoad parse_demographics(std::istream& in, const DemographicSchema& schema) {
  CsvReader reader(in);
  auto header = reader.next();
  std::vector<std::string> expected{"user_id"};
  for (const auto& a : schema.attributes()) expected.push_back(a.name);
  expect_header(header, expected, reader.line());

  ProfileLoad out;
  std::unordered_map<std::string, std::size_t> position;
  while (auto row = reader.next()) {
    if (row->empty() || (*row)[0].empty()) continue;
    UserProfile profile{(*row)[0], {}};
    for (std::size_t i = 0; i < schema.size(); ++i) {
      if (i + 1 >= row->size()) break;
      const std::string& cell = (*row)[i + 1];
      if (cell.empty()) continue;
      const Attribute& attr = schema.attributes()[i];
      if (attr.numeric()) {
        if (auto v = parse_number(cell)) {
          profile.values.emplace(attr.name, *v);
        } else {
          ++out.unparsed_cells;
        }
      } else {
        profile.values.emplace(attr.name, cell);
      }
    }
    auto [it, inserted] = position.emplace(profile.user_id, out.profiles.size());
    if (inserted) {
      out.profiles.push_back(std::move(profile));
    } else {
      out.profiles[it->second] = std::move(profile);
    }
  }
  return out;
}

ProfileLoad load_demographics(const std::filesystem::path& path,
                              const DemographicSchema& schema) {
  auto in = open_input(path);
  return parse_demographics(in, schema);
}

std::string demographic_token(std::string_view attribute, std::string_view value) {
  return fmt::format("d:{}={}", attribute, value);
}

std::string action_token(std::string_view item_id) { return fmt::format("a:{}", item_id); }

std::optional<TokenInfo> decode_token(std::string_view token) {
  if (token.starts_with("a:") && token.size() > 2) {
    return TokenInfo{TokenKind::kAction, "", std::string(token.substr(2))};
  }
  if (token.starts_with("d:")) {
    auto body = token.substr(2);
    auto eq = body.find('=');
    if (eq == std::string_view::npos || eq == 0) return std::nullopt;
    return TokenInfo{TokenKind::kDemographic, std::string(body.substr(0, eq)),
                     std::string(body.substr(eq + 1))};
  }
  return std::nullopt;
}

std::optional<UserIndex> Dataset::find_user(std::string_view user_id) const {
  auto it = user_lookup_.find(std::string(user_id));
  if (it == user_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<TokenIndex> Dataset::find_token(std::string_view token) const {
  auto it = token_lookup_.find(std::string(token));
  if (it == token_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> Dataset::mean_value(UserIndex u) const {
  const auto n = action_counts_.at(u);
  if (n == 0) return std::nullopt;
  return value_sums_[u] / static_cast<double>(n);
}

Dataset build_dataset(const std::vector<ActionRecord>& actions,
                      const std::vector<UserProfile>& profiles,
                      const SchemaFile& schema) {
  Dataset ds;
  ds.schema_ = schema;

  auto intern_user = [&](const std::string& id) {
    auto [it, inserted] =
        ds.user_lookup_.emplace(id, static_cast<UserIndex>(ds.user_ids_.size()));
    if (inserted) ds.user_ids_.push_back(id);
    return it->second;
  };
  for (const auto& p : profiles) intern_user(p.user_id);
  for (const auto& a : actions) intern_user(a.user_id);
  if (ds.user_ids_.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "dataset has no users; nothing to mine");
  }

  const std::size_t n = ds.user_ids_.size();
  ds.demographics_.resize(n);
  ds.action_counts_.assign(n, 0);
  ds.value_sums_.assign(n, 0.0);
  ds.transactions_.resize(n);
  for (const auto& p : profiles) {
    auto& dst = ds.demographics_[ds.user_lookup_.at(p.user_id)];
    for (const auto& [name, value] : p.values) {
      if (!schema.demographics.find(name)) {
        throw Error(ErrorCode::kMalformedInput,
                    "profile of '" + p.user_id + "' has attribute '" + name + "' outside the schema");
      }
      dst[name] = value;
    }
  }

  std::vector<std::vector<std::size_t>> actions_by_user(n);
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const auto u = ds.user_lookup_.at(actions[i].user_id);
    actions_by_user[u].push_back(i);
    ds.action_counts_[u] += 1;
    ds.value_sums_[u] += actions[i].value;
  }
  ds.actions_ = actions;

  auto intern_token = [&](std::string token) {
    auto [it, inserted] =
        ds.token_lookup_.emplace(token, static_cast<TokenIndex>(ds.tokens_.size()));
    if (inserted) ds.tokens_.push_back(std::move(token));
    return it->second;
  };
  for (UserIndex u = 0; u < n; ++u) {
    auto& tx = ds.transactions_[u];
    for (const auto& attr : schema.demographics.attributes()) {
      auto it = ds.demographics_[u].find(attr.name);
      if (it == ds.demographics_[u].end()) continue;
      if (attr.numeric()) {
        auto bucket = attr.bucket_of(std::get<double>(it->second));
        if (!bucket) continue;
        tx.push_back(intern_token(demographic_token(attr.name, attr.bucket_label(*bucket))));
      } else {
        tx.push_back(intern_token(demographic_token(attr.name, std::get<std::string>(it->second))));
      }
    }
    for (auto i : actions_by_user[u]) tx.push_back(intern_token(action_token(actions[i].item_id)));
    std::sort(tx.begin(), tx.end());
    tx.erase(std::unique(tx.begin(), tx.end()), tx.end());
  }

  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a(h, schema_to_json(schema));
  for (const auto& id : ds.user_ids_) h = fnv1a(fnv1a(h, id), "\x1f");
  for (const auto& t : ds.tokens_) h = fnv1a(fnv1a(h, t), "\x1f");
  for (const auto& tx : ds.transactions_) {
    for (auto t : tx) h = fnv1a(h, fmt::format("{},", t));
    h = fnv1a(h, "\n");
  }
  for (const auto& a : ds.actions_) {
    h = fnv1a(h, fmt::format("{}\x1f{}\x1f{}\n", a.user_id, a.item_id, a.value));
  }
  for (const auto& demo : ds.demographics_) {
    for (const auto& [name, value] : demo) {
      h = fnv1a(h, name);
      h = std::visit([&](const auto& v) { return fnv1a(h, fmt::format("={}\x1f", v)); }, value);
    }
    h = fnv1a(h, "\n");
  }
  ds.digest_ = fmt::format("{:016x}", h);
  return ds;
}

}  // namespace vexplore
