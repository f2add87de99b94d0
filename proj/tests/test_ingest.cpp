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

#include <set>
#include <sstream>

#include <doctest.h>

#include "support.hpp"
#include "vexplore/csv.hpp"
#include "vexplore/error.hpp"
#include "vexplore/ingest.hpp"

using namespace vexplore;
using vexplore::testing::four_user_dataset;
using vexplore::testing::gender_city_schema;

namespace {

ActionLoad actions_from(const std::string& text, ValueRange range = {1.0, 5.0}) {
  std::istringstream in(text);
  return parse_actions(in, range);
}

ProfileLoad profiles_from(const std::string& text, const DemographicSchema& schema) {
  std::istringstream in(text);
  return parse_demographics(in, schema);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kInternal;
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("csv reader handles quotes and CRLF") {
  std::istringstream in("a,\"b,c\",\"say \"\"hi\"\"\"\r\n\r\nx,,z\n");
  CsvReader reader(in);
  auto r1 = reader.next();
  REQUIRE(r1);
  CHECK(*r1 == std::vector<std::string>{"a", "b,c", "say \"hi\""});
  auto r2 = reader.next();
  REQUIRE(r2);
  CHECK(*r2 == std::vector<std::string>{"x", "", "z"});
  CHECK_FALSE(reader.next());

  std::istringstream bad("a,\"open\n");
  CsvReader bad_reader(bad);
  CHECK(code_of([&] { bad_reader.next(); }) == ErrorCode::kMalformedInput);
}

TEST_CASE("rating row parses into an action record") {
  const auto load = actions_from("user_id,item_id,value\nMary,Mr Miracle,4\n");
  REQUIRE(load.records.size() == 1);
  CHECK(load.records[0] == ActionRecord{"Mary", "Mr Miracle", 4.0});
  CHECK(load.dropped == 0);
}

TEST_CASE("empty body gives no records") {
  const auto load = actions_from("user_id,item_id,value\n");
  CHECK(load.records.empty());
  CHECK(load.dropped == 0);
}

TEST_CASE("out of range and non numeric values are dropped") {
  const auto load = actions_from("user_id,item_id,value\nu1,b1,9\nu1,b2,abc\nu1,b3,\nu1,b4,5\n");
  CHECK(load.dropped == 3);
  REQUIRE(load.records.size() == 1);
  CHECK(load.records[0].item_id == "b4");
}

TEST_CASE("duplicate actions collapse") {
  const auto load = actions_from("user_id,item_id,value\nu1,b1,4\nu1,b1,4\nu1,b1,3\n");
  CHECK(load.records.size() == 2);
  CHECK(load.duplicates == 1);
}

TEST_CASE("bad header is rejected with a diagnostic") {
  try {
    actions_from("user,item_id,value\nu1,b1,4\n");
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMalformedInput);
    CHECK(e.detail().count("row") == 1);
    CHECK(e.detail().count("column") == 1);
  }
  CHECK(code_of([] { load_actions("/nonexistent/actions.csv", {1, 5}); }) == ErrorCode::kIoError);
}

TEST_CASE("demographics parse, dedupe and missing cells") {
  const auto schema = gender_city_schema().demographics;
  const auto load = profiles_from("user_id,gender,city\nu1,M,Paris\nu2,F,\nu1,M,Lyon\n", schema);
  REQUIRE(load.profiles.size() == 2);
  CHECK(load.profiles[0].user_id == "u1");
  CHECK(std::get<std::string>(load.profiles[0].values.at("city")) == "Lyon");
  CHECK(load.profiles[1].values.size() == 1);
  CHECK(std::get<std::string>(load.profiles[1].values.at("gender")) == "F");

  CHECK(code_of([&] { profiles_from("user_id,city,gender\n", schema); }) == ErrorCode::kMalformedInput);
}

TEST_CASE("unparseable numeric cell is treated as missing") {
  const auto schema = parse_schema(R"({"attributes": [{"name": "g", "kind": "categorical"},
      {"name": "age", "kind": "numeric", "edges": [18, 30, 45, 99]}]})");
  const auto load = profiles_from("user_id,g,age\nu1,M,old\nu2,F,34\n", schema.demographics);
  CHECK(load.unparsed_cells == 1);
  CHECK(load.profiles[0].values.count("age") == 0);
  CHECK(load.profiles[0].values.count("g") == 1);
  CHECK(std::get<double>(load.profiles[1].values.at("age")) == 34.0);
}

TEST_CASE("schema validation") {
  CHECK(code_of([] { parse_schema(R"({"attributes": [{"name": "a", "kind": "numeric", "edges": [1]}]})"); }) ==
        ErrorCode::kMalformedInput);
  CHECK(code_of([] { parse_schema(R"({"attributes": [{"name": "a", "kind": "numeric", "edges": [3, 2]}]})"); }) ==
        ErrorCode::kMalformedInput);
  CHECK(code_of([] {
          parse_schema(R"({"attributes": [{"name": "a", "kind": "categorical"}, {"name": "a", "kind": "categorical"}]})");
        }) == ErrorCode::kMalformedInput);
  const auto s = parse_schema(schema_to_json(gender_city_schema()));
  CHECK(s.demographics.size() == 2);
  CHECK(s.value_range.lo == 1.0);
  CHECK(s.value_range.hi == 5.0);
}

TEST_CASE("binarization of demographics and actions") {
  const Dataset ds = four_user_dataset();
  CHECK(ds.user_count() == 4);
  const auto u1 = *ds.find_user("u1");
  std::vector<std::string> tokens;
  for (TokenIndex t : ds.transaction(u1)) tokens.push_back(ds.token(t));
  std::sort(tokens.begin(), tokens.end());
  CHECK(tokens == std::vector<std::string>{"a:b1", "d:city=P", "d:gender=M"});
  CHECK(ds.action_count(u1) == 1);
  CHECK(*ds.mean_value(u1) == 4.0);
}

TEST_CASE("numeric attribute maps to its bucket token") {
  const auto schema = parse_schema(R"({"attributes": [{"name": "age", "kind": "numeric", "edges": [18, 30, 45, 99]}]})");
  const Dataset ds = build_dataset({}, {{"u1", {{"age", 34.0}}}, {"u2", {{"age", 120.0}}}}, schema);
  REQUIRE(ds.transaction(0).size() == 1);
  CHECK(ds.token(ds.transaction(0)[0]) == "d:age=[30,45)");
  CHECK(ds.transaction(1).empty());
  const auto info = decode_token("d:age=[30,45)");
  REQUIRE(info);
  CHECK(info->kind == TokenKind::kDemographic);
  CHECK(info->attribute == "age");
  CHECK(info->value == "[30,45)");
}

TEST_CASE("users without data are still indexed") {
  const auto schema = gender_city_schema();
  const Dataset ds = build_dataset({{"u2", "b1", 3.0}}, {{"u1", {}}}, schema);
  CHECK(ds.user_count() == 2);
  CHECK(ds.transaction(*ds.find_user("u1")).empty());
  CHECK(ds.transaction(*ds.find_user("u2")).size() == 1);
  CHECK(code_of([&] { build_dataset({}, {}, schema); }) == ErrorCode::kEmptyDataset);
}

TEST_CASE("transactions are sorted, duplicate free and decodable") {
  const Dataset ds = vexplore::testing::synth_dataset({.users = 300, .seed = 5});
  for (const auto& t : ds.transactions()) {
    CHECK(std::is_sorted(t.begin(), t.end()));
    CHECK(std::adjacent_find(t.begin(), t.end()) == t.end());
    for (TokenIndex i : t) {
      REQUIRE(i < ds.token_count());
      CHECK(decode_token(ds.token(i)).has_value());
    }
  }
  // Action tokens carry the item only, never the rating.
  std::set<std::string> items;
  for (const auto& a : ds.actions()) items.insert(a.item_id);
  for (const auto& tok : ds.tokens()) {
    const auto info = decode_token(tok);
    if (info->kind == TokenKind::kAction) CHECK(items.count(info->value) == 1);
  }
}

TEST_CASE("same input gives an identical dataset") {
  const SynthParams p{.users = 200, .seed = 9};
  const Dataset a = vexplore::testing::synth_dataset(p);
  const Dataset b = vexplore::testing::synth_dataset(p);
  CHECK(a.digest() == b.digest());
  CHECK(a.tokens() == b.tokens());
  CHECK(a.transactions() == b.transactions());
  const Dataset c = vexplore::testing::synth_dataset({.users = 200, .seed = 10});
  CHECK(a.digest() != c.digest());
}

}  // TEST_SUITE
