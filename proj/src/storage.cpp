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

#include "vexplore/storage.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "vexplore/error.hpp"

namespace vexplore {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string(), {{"path", path.string()}});
  return out;
}

std::ifstream open_input(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string(), {{"path", path.string()}});
  return in;
}

json read_json(const fs::path& path) {
  auto in = open_input(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedInput, fmt::format("{}: {}", path.string(), e.what()),
                {{"path", path.string()}});
  }
}

template <typename Fn>
void for_each_line(const fs::path& path, Fn&& fn) {
  auto in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformedInput,
                  fmt::format("{}:{}: {}", path.string(), lineno, e.what()),
                  {{"path", path.string()}, {"row", std::to_string(lineno)}});
    }
  }
}

json attribute_value_json(const AttributeValue& v) {
  return std::visit([](const auto& x) { return json(x); }, v);
}

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
bool get(std::istream& in, T& value) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&value), sizeof(T)));
}

constexpr char kIndexMagic[8] = {'V', 'X', 'S', 'I', 'D', 'X', '0', '1'};
constexpr std::uint32_t kIndexVersion = 1;

}  // namespace

void save_dataset(const Dataset& ds, const fs::path& dir) {
  fs::create_directories(dir);
  json meta{{"format", "vexplore-dataset"},
            {"version", 1},
            {"digest", ds.digest()},
            {"schema", json::parse(schema_to_json(ds.schema()))},
            {"counts",
             {{"users", ds.user_count()}, {"tokens", ds.token_count()}, {"actions", ds.actions().size()}}},
            {"users", ds.user_ids()},
            {"tokens", ds.tokens()}};
  open_output(dir / layout::kMeta) << meta.dump(1) << '\n';

  auto tx = open_output(dir / layout::kTransactions);
  auto profiles = open_output(dir / layout::kProfiles);
  for (UserIndex u = 0; u < ds.user_count(); ++u) {
    json tokens = json::array();
    for (TokenIndex t : ds.transaction(u)) tokens.push_back(ds.token(t));
    tx << json{{"user", ds.user_id(u)}, {"tokens", tokens}}.dump() << '\n';
    json values = json::object();
    for (const auto& [k, v] : ds.demographics(u)) values[k] = attribute_value_json(v);
    profiles << json{{"user", ds.user_id(u)}, {"values", values}}.dump() << '\n';
  }
  auto actions = open_output(dir / layout::kActions);
  for (const auto& a : ds.actions()) {
    actions << json{{"user", a.user_id}, {"item", a.item_id}, {"value", a.value}}.dump() << '\n';
  }
}

Dataset load_dataset(const fs::path& dir) {
  if (!fs::exists(dir / layout::kMeta)) {
    throw Error(ErrorCode::kDatasetNotFound, "no dataset at " + dir.string(), {{"path", dir.string()}});
  }
  const json meta = read_json(dir / layout::kMeta);
  if (meta.value("format", "") != "vexplore-dataset" || meta.value("version", 0) != 1) {
    throw Error(ErrorCode::kMalformedInput, "unsupported dataset metadata in " + dir.string());
  }
  const SchemaFile schema = parse_schema(meta.at("schema").dump());

  std::vector<UserProfile> profiles;
  for_each_line(dir / layout::kProfiles, [&](const json& j) {
    UserProfile p{j.at("user").get<std::string>(), {}};
    for (const auto& [k, v] : j.at("values").items()) {
      if (v.is_number()) {
        p.values.emplace(k, v.get<double>());
      } else {
        p.values.emplace(k, v.get<std::string>());
      }
    }
    profiles.push_back(std::move(p));
  });
  std::vector<ActionRecord> actions;
  for_each_line(dir / layout::kActions, [&](const json& j) {
    actions.push_back({j.at("user").get<std::string>(), j.at("item").get<std::string>(),
                       j.at("value").get<double>()});
  });
  Dataset ds = build_dataset(actions, profiles, schema);
  if (ds.digest() != meta.at("digest").get<std::string>() ||
      ds.tokens() != meta.at("tokens").get<std::vector<std::string>>()) {
    throw Error(ErrorCode::kMalformedInput, "dataset files disagree with meta.json in " + dir.string(),
                {{"expected", meta.at("digest").get<std::string>()}, {"got", ds.digest()}});
  }
  return ds;
}

void save_groups(const Dataset& ds, const GroupSet& groups, const fs::path& dir) {
  fs::create_directories(dir);
  auto out = open_output(dir / layout::kGroups);
  for (const auto& g : groups.groups()) {
    json members = json::array();
    for (UserIndex u : g.members) members.push_back(ds.user_id(u));
    json descriptor = json::array();
    for (TokenIndex t : g.descriptor) descriptor.push_back(ds.token(t));
    out << json{{"id", g.id}, {"descriptor", descriptor}, {"members", members}, {"support", g.support()}}
               .dump()
        << '\n';
  }
  out.close();
  json meta{{"format", "vexplore-groups"},
            {"version", 1},
            {"dataset_digest", ds.digest()},
            {"minsup", groups.minsup()},
            {"count", groups.size()}};
  open_output(dir / layout::kGroupsMeta) << meta.dump(1) << '\n';
}

std::optional<GroupSet> load_groups(const Dataset& ds, const fs::path& dir) {
  if (!fs::exists(dir / layout::kGroupsMeta) || !fs::exists(dir / layout::kGroups)) return std::nullopt;
  const json meta = read_json(dir / layout::kGroupsMeta);
  if (meta.value("format", "") != "vexplore-groups" || meta.value("version", 0) != 1) {
    throw Error(ErrorCode::kMalformedInput, "unsupported group store in " + dir.string());
  }
  if (meta.at("dataset_digest").get<std::string>() != ds.digest()) {
    throw Error(ErrorCode::kCacheMismatch, "group store was mined from a different dataset");
  }
  std::vector<Group> groups;
  for_each_line(dir / layout::kGroups, [&](const json& j) {
    Group g;
    g.id = j.at("id").get<GroupId>();
    for (const auto& t : j.at("descriptor")) {
      auto idx = ds.find_token(t.get<std::string>());
      if (!idx) throw Error(ErrorCode::kMalformedInput, "group store names unknown token " + t.dump());
      g.descriptor.push_back(*idx);
    }
    std::sort(g.descriptor.begin(), g.descriptor.end());
    std::vector<UserIndex> members;
    for (const auto& m : j.at("members")) {
      auto u = ds.find_user(m.get<std::string>());
      if (!u) throw Error(ErrorCode::kMalformedInput, "group store names unknown user " + m.dump());
      members.push_back(*u);
    }
    g.members = MemberSet::from_unsorted(std::move(members));
    if (g.id != groups.size()) throw Error(ErrorCode::kMalformedInput, "group ids are not dense");
    groups.push_back(std::move(g));
  });
  return GroupSet(std::move(groups), ds.user_count(), meta.at("minsup").get<std::size_t>());
}

void save_index_cache(const fs::path& path, const std::string& digest, std::size_t minsup,
                      const SimilarityIndex& index) {
  auto out = open_output(path, std::ios::binary);
  out.write(kIndexMagic, sizeof(kIndexMagic));
  put<std::uint32_t>(out, kIndexVersion);
  char key[16] = {};
  std::memcpy(key, digest.data(), std::min<std::size_t>(digest.size(), sizeof(key)));
  out.write(key, sizeof(key));
  put<std::uint64_t>(out, minsup);
  put<double>(out, index.fraction());
  put<std::uint64_t>(out, index.size());
  for (const auto& list : index.lists()) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(list.size()));
    for (const auto& n : list) {
      put<std::uint32_t>(out, n.id);
      put<std::uint32_t>(out, n.overlap);
    }
  }
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

std::optional<SimilarityIndex> load_index_cache(const fs::path& path, const std::string& digest,
                                                std::size_t minsup, double fraction,
                                                const GroupSet& groups) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  std::uint32_t version = 0;
  char key[16];
  std::uint64_t stored_minsup = 0;
  double stored_fraction = 0.0;
  std::uint64_t count = 0;
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kIndexMagic, sizeof(magic)) != 0 ||
      !get(in, version) || version != kIndexVersion || !in.read(key, sizeof(key)) ||
      !get(in, stored_minsup) || !get(in, stored_fraction) || !get(in, count)) {
    return std::nullopt;
  }
  char want[16] = {};
  std::memcpy(want, digest.data(), std::min<std::size_t>(digest.size(), sizeof(want)));
  if (std::memcmp(key, want, sizeof(key)) != 0 || stored_minsup != minsup ||
      stored_fraction != fraction || count != groups.size()) {
    return std::nullopt;
  }
  std::vector<std::vector<Neighbor>> lists(count);
  for (std::uint64_t g = 0; g < count; ++g) {
    std::uint32_t len = 0;
    if (!get(in, len)) return std::nullopt;
    auto& list = lists[g];
    list.reserve(len);
    const auto support_g = groups.at(static_cast<GroupId>(g)).support();
    for (std::uint32_t i = 0; i < len; ++i) {
      std::uint32_t id = 0;
      std::uint32_t overlap = 0;
      if (!get(in, id) || !get(in, overlap) || id >= groups.size()) return std::nullopt;
      list.push_back({.id = id, .overlap = overlap,
                      .similarity = jaccard_from_counts(overlap, support_g, groups.at(id).support())});
    }
  }
  return SimilarityIndex(fraction, std::move(lists));
}

std::shared_ptr<const Corpus> prepare_corpus(const fs::path& dir, const CorpusOptions& options) {
  Dataset ds = load_dataset(dir);
  auto groups = load_groups(ds, dir);
  if (!groups) {
    MiningOptions mining;
    mining.minsup = options.minsup.value_or(default_minsup(ds.user_count()));
    groups = mine_closed_groups(ds, mining);
    if (options.write_back) save_groups(ds, *groups, dir);
  }
  if (groups->empty()) {
    throw Error(ErrorCode::kNotReady, "the group store is empty; lower minsup and mine again");
  }
  auto index = load_index_cache(dir / layout::kIndex, ds.digest(), groups->minsup(),
                                options.fraction, *groups);
  if (!index) {
    index = build_index(*groups, options.fraction);
    if (options.write_back) save_index_cache(dir / layout::kIndex, ds.digest(), groups->minsup(), *index);
  }
  return std::make_shared<const Corpus>(Corpus{std::move(ds), std::move(*groups), std::move(*index)});
}

}  // namespace vexplore
