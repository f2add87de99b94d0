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

#include "vexplore/server.hpp"

#include <atomic>
#include <charconv>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "httplib.h"
#include "vexplore/group_mining.hpp"
#include "vexplore/ingest.hpp"
#include "vexplore/simindex.hpp"
#include "vexplore/stats.hpp"
#include "vexplore/storage.hpp"

namespace vexplore {

using json = nlohmann::json;
namespace fs = std::filesystem;

json api_error_json(const Error& error) {
  json detail = json::object();
  for (const auto& [k, v] : error.detail()) detail[k] = v;
  return json{{"error",
               {{"code", std::string(error_code_name(error.code()))},
                {"message", error.what()},
                {"detail", std::move(detail)}}}};
}

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kMalformedInput:
    case ErrorCode::kOutOfRange:
    case ErrorCode::kUnknownDimension:
    case ErrorCode::kUnknownEntity:
      return 400;
    case ErrorCode::kUnknownGroup:
    case ErrorCode::kUnknownUser:
    case ErrorCode::kDatasetNotFound:
    case ErrorCode::kSessionNotFound:
    case ErrorCode::kJobNotFound:
      return 404;
    case ErrorCode::kIneligibleGroup:
    case ErrorCode::kNotReady:
    case ErrorCode::kJobInProgress:
    case ErrorCode::kCacheMismatch:
      return 409;
    case ErrorCode::kEmptyDataset:
    case ErrorCode::kGroupLimitExceeded:
    case ErrorCode::kEnumerationTooLarge:
    case ErrorCode::kInsufficientClasses:
    case ErrorCode::kDegenerateFeatures:
      return 422;
    case ErrorCode::kIoError:
    case ErrorCode::kInternal:
      return 500;
  }
  return 500;
}

namespace {

struct DatasetEntry {
  std::string id;
  fs::path dir;
  std::shared_ptr<const Dataset> dataset;

  std::mutex mu;
  std::shared_ptr<const GroupSet> groups;
  std::shared_ptr<const Corpus> corpus;
  std::optional<std::string> active_job;
  std::map<GroupId, std::shared_ptr<const FacetIndex>> facets;
};

struct Job {
  std::string id;
  std::string kind;
  std::string dataset;
  std::string digest;
  std::string state = "queued";
  double progress = 0.0;
  json result;
  json error;
};

struct SessionEntry {
  SessionEntry(std::string sid, std::string did, Session s)
      : id(std::move(sid)), dataset(std::move(did)), session(std::move(s)) {}
  std::string id;
  std::string dataset;
  std::mutex mu;
  Session session;
};

std::uint64_t parse_u64(const std::string& text, const char* what) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end)
    throw Error(ErrorCode::kInvalidArgument, fmt::format("{} must be a non-negative integer", what),
                {{what, text}});
  return v;
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    json doc = json::parse(req.body);
    if (!doc.is_object()) throw Error(ErrorCode::kMalformedInput, "request body must be a JSON object");
    return doc;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kMalformedInput, "request body is not valid JSON", {{"reason", e.what()}});
  }
}

FilterState parse_filters(const httplib::Request& req) {
  if (!req.has_param("filters")) return {};
  const std::string text = req.get_param_value("filters");
  if (text.empty()) return {};
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kMalformedInput, "filters is not valid JSON", {{"reason", e.what()}});
  }
  return FilterState::from_json(doc);
}

json group_json(const Dataset& ds, const Group& g, bool with_members) {
  json j{{"id", g.id}, {"descriptor", decode_descriptor(ds, g.descriptor)}, {"support", g.support()}};
  if (with_members) {
    json members = json::array();
    for (UserIndex u : g.members) members.push_back(ds.user_id(u));
    j["members"] = std::move(members);
  }
  return j;
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

struct Server::State {
  ServerConfig config;
  httplib::Server http;
  std::thread listener;
  int bound_port = -1;

  std::shared_mutex datasets_mu;
  std::map<std::string, std::shared_ptr<DatasetEntry>> datasets;

  std::mutex jobs_mu;
  std::map<std::string, Job> jobs;
  std::vector<std::jthread> workers;
  std::uint64_t next_job = 1;

  std::mutex sessions_mu;
  std::map<std::string, std::shared_ptr<SessionEntry>> sessions;
  std::uint64_t next_session = 1;

  explicit State(ServerConfig c) : config(std::move(c)) {}

  // --- lookup ------------------------------------------------------------

  std::shared_ptr<DatasetEntry> dataset(const std::string& id) {
    std::shared_lock lock(datasets_mu);
    auto it = datasets.find(id);
    if (it == datasets.end())
      throw Error(ErrorCode::kDatasetNotFound, "no dataset with id " + id, {{"dataset", id}});
    return it->second;
  }

  std::shared_ptr<SessionEntry> session(const std::string& id) {
    std::lock_guard lock(sessions_mu);
    auto it = sessions.find(id);
    if (it == sessions.end())
      throw Error(ErrorCode::kSessionNotFound, "no session with id " + id, {{"session", id}});
    return it->second;
  }

  static std::shared_ptr<const GroupSet> groups_of(DatasetEntry& e) {
    std::lock_guard lock(e.mu);
    if (!e.groups) throw Error(ErrorCode::kNotReady, "dataset " + e.id + " has not been mined", {{"dataset", e.id}});
    return e.groups;
  }

  static std::shared_ptr<const Corpus> corpus_of(DatasetEntry& e) {
    std::lock_guard lock(e.mu);
    if (!e.corpus)
      throw Error(ErrorCode::kNotReady, "dataset " + e.id + " has not been mined and indexed", {{"dataset", e.id}});
    return e.corpus;
  }

  static std::shared_ptr<const FacetIndex> facets_of(DatasetEntry& e, GroupId gid) {
    std::shared_ptr<const GroupSet> groups;
    {
      std::lock_guard lock(e.mu);
      auto it = e.facets.find(gid);
      if (it != e.facets.end()) return it->second;
      groups = e.groups;
    }
    if (!groups) throw Error(ErrorCode::kNotReady, "dataset " + e.id + " has not been mined", {{"dataset", e.id}});
    auto facet = std::make_shared<const FacetIndex>(*e.dataset, groups->at(gid).members);
    std::lock_guard lock(e.mu);
    // Drop the result if a re-mine replaced the groups meanwhile.
    if (e.groups == groups) e.facets.emplace(gid, facet);
    return facet;
  }

  std::shared_ptr<DatasetEntry> register_dataset(const std::string& id, fs::path dir,
                                                 std::shared_ptr<const Dataset> ds,
                                                 std::shared_ptr<const GroupSet> groups,
                                                 std::shared_ptr<const Corpus> corpus) {
    auto e = std::make_shared<DatasetEntry>();
    e->id = id;
    e->dir = std::move(dir);
    e->dataset = std::move(ds);
    e->groups = std::move(groups);
    e->corpus = std::move(corpus);
    std::unique_lock lock(datasets_mu);
    datasets[id] = e;
    return e;
  }

  // --- jobs --------------------------------------------------------------

  std::string submit(const std::shared_ptr<DatasetEntry>& e, const std::string& kind,
                     std::function<json()> work) {
    std::string jid;
    {
      std::lock_guard lock(e->mu);
      if (e->active_job)
        throw Error(ErrorCode::kJobInProgress, "dataset " + e->id + " already has a job running",
                    {{"dataset", e->id}, {"job", *e->active_job}});
      std::lock_guard jlock(jobs_mu);
      jid = fmt::format("j{}", next_job++);
      Job job;
      job.id = jid;
      job.kind = kind;
      job.dataset = e->id;
      job.digest = e->dataset->digest();
      jobs.emplace(jid, std::move(job));
      e->active_job = jid;
    }
    std::lock_guard jlock(jobs_mu);
    workers.emplace_back([this, e, jid, work = std::move(work)] {
      set_job(jid, [](Job& j) { j.state = "running"; });
      json result;
      std::optional<json> error;
      try {
        result = work();
      } catch (const Error& err) {
        error = api_error_json(err)["error"];
      } catch (const std::exception& ex) {
        error = api_error_json(Error(ErrorCode::kInternal, ex.what()))["error"];
      }
      {
        std::lock_guard lock(e->mu);
        e->active_job.reset();
      }
      set_job(jid, [&](Job& j) {
        j.progress = 1.0;
        if (error) {
          j.state = "failed";
          j.error = *error;
          spdlog::warn("job {} ({}) failed: {}", j.id, j.kind, j.error.dump());
        } else {
          j.state = "done";
          j.result = result;
          spdlog::info("job {} ({}) done", j.id, j.kind);
        }
      });
    });
    return jid;
  }

  template <typename F>
  void set_job(const std::string& jid, F&& f) {
    std::lock_guard lock(jobs_mu);
    f(jobs.at(jid));
  }

  json job_json(const std::string& jid) {
    std::lock_guard lock(jobs_mu);
    auto it = jobs.find(jid);
    if (it == jobs.end()) throw Error(ErrorCode::kJobNotFound, "no job with id " + jid, {{"job", jid}});
    const Job& j = it->second;
    json out{{"job", j.id},     {"kind", j.kind},         {"dataset", j.dataset},
             {"digest", j.digest}, {"state", j.state}, {"progress", j.progress}};
    if (!j.result.is_null()) out["result"] = j.result;
    if (!j.error.is_null()) out["error"] = j.error;
    return out;
  }

  // --- handlers ------------------------------------------------------------

  json create_dataset(const httplib::Request& req) {
    std::string actions_csv;
    std::string demographics_csv;
    std::string schema_text;
    std::string id;
    if (req.is_multipart_form_data()) {
      auto field = [&](const char* name, bool required) -> std::string {
        if (!req.has_file(name)) {
          if (required)
            throw Error(ErrorCode::kInvalidArgument, fmt::format("missing multipart field '{}'", name),
                        {{"field", name}});
          return {};
        }
        return req.get_file_value(name).content;
      };
      actions_csv = field("actions", true);
      demographics_csv = field("demographics", true);
      schema_text = field("schema", true);
      id = field("id", false);
    } else {
      const json body = parse_body(req);
      for (const char* key : {"actions", "demographics", "schema"})
        if (!body.contains(key))
          throw Error(ErrorCode::kInvalidArgument, fmt::format("missing field '{}'", key), {{"field", key}});
      actions_csv = body.at("actions").get<std::string>();
      demographics_csv = body.at("demographics").get<std::string>();
      schema_text = body.at("schema").is_string() ? body.at("schema").get<std::string>() : body.at("schema").dump();
      id = body.value("id", std::string());
    }

    const SchemaFile schema = parse_schema(schema_text);
    std::istringstream actions_in(actions_csv);
    const ActionLoad actions = parse_actions(actions_in, schema.value_range);
    std::istringstream demo_in(demographics_csv);
    const ProfileLoad profiles = parse_demographics(demo_in, schema.demographics);
    auto ds = std::make_shared<const Dataset>(build_dataset(actions.records, profiles.profiles, schema));

    if (id.empty()) id = "ds-" + ds->digest();
    if (id.find_first_of("/\\") != std::string::npos || id == "." || id == "..")
      throw Error(ErrorCode::kInvalidArgument, "dataset id must not contain path separators", {{"id", id}});
    bool known = false;
    {
      std::shared_lock lock(datasets_mu);
      auto it = datasets.find(id);
      if (it != datasets.end() && it->second->dataset->digest() != ds->digest())
        throw Error(ErrorCode::kInvalidArgument, "dataset id already in use by different data", {{"id", id}});
      known = it != datasets.end();
    }
    // Same data again: keep the existing entry with its groups and index.
    if (!known) {
      const fs::path dir = config.data_dir / id;
      save_dataset(*ds, dir);
      register_dataset(id, dir, ds, nullptr, nullptr);
      spdlog::info("dataset {} ingested: {} users, {} tokens", id, ds->user_count(), ds->tokens().size());
    }
    return json{{"dataset", id},
                {"digest", ds->digest()},
                {"users", ds->user_count()},
                {"tokens", ds->tokens().size()},
                {"actions", actions.records.size() - actions.duplicates},
                {"dropped_actions", actions.dropped},
                {"duplicate_actions", actions.duplicates},
                {"unparsed_cells", profiles.unparsed_cells}};
  }

  json dataset_info(DatasetEntry& e) {
    std::lock_guard lock(e.mu);
    json out{{"dataset", e.id},
             {"digest", e.dataset->digest()},
             {"users", e.dataset->user_count()},
             {"tokens", e.dataset->tokens().size()},
             {"mined", static_cast<bool>(e.groups)},
             {"indexed", static_cast<bool>(e.corpus)}};
    if (e.groups) {
      out["groups"] = e.groups->size();
      out["minsup"] = e.groups->minsup();
    }
    out["job"] = e.active_job ? json(*e.active_job) : json(nullptr);
    return out;
  }

  json start_mine(const std::shared_ptr<DatasetEntry>& e, const json& body) {
    MiningOptions opts;
    opts.minsup = body.contains("minsup") ? body.at("minsup").get<std::size_t>()
                                          : default_minsup(e->dataset->user_count());
    if (body.contains("max_groups")) opts.max_groups = body.at("max_groups").get<std::size_t>();
    if (opts.minsup == 0) throw Error(ErrorCode::kInvalidArgument, "minsup must be at least 1");
    const std::string jid = submit(e, "mine", [e, opts]() {
      auto groups = std::make_shared<const GroupSet>(mine_closed_groups(*e->dataset, opts));
      save_groups(*e->dataset, *groups, e->dir);
      std::error_code ec;
      fs::remove(e->dir / layout::kIndex, ec);
      {
        std::lock_guard lock(e->mu);
        e->groups = groups;
        e->corpus.reset();
        e->facets.clear();
      }
      json result{{"groups", groups->size()}, {"minsup", groups->minsup()}};
      if (groups->empty()) result["warning"] = "no group reaches the support threshold";
      return result;
    });
    return json{{"job", jid}, {"dataset", e->id}, {"digest", e->dataset->digest()}};
  }

  json start_index(const std::shared_ptr<DatasetEntry>& e, const json& body) {
    const double fraction = body.value("fraction", 0.1);
    if (!(fraction > 0.0 && fraction <= 1.0))
      throw Error(ErrorCode::kInvalidArgument, "fraction must be in (0, 1]", {{"fraction", fmt::format("{}", fraction)}});
    auto groups = groups_of(*e);
    if (groups->empty()) throw Error(ErrorCode::kNotReady, "the group store is empty; nothing to index");
    const std::string jid = submit(e, "index", [e, groups, fraction]() {
      SimilarityIndex index = build_index(*groups, fraction);
      save_index_cache(e->dir / layout::kIndex, e->dataset->digest(), groups->minsup(), index);
      std::size_t entries = 0;
      for (const auto& l : index.lists()) entries += l.size();
      auto corpus = std::make_shared<const Corpus>(Corpus{*e->dataset, *groups, std::move(index)});
      {
        std::lock_guard lock(e->mu);
        if (e->groups == groups) e->corpus = corpus;
      }
      return json{{"groups", groups->size()}, {"entries", entries}, {"fraction", fraction}};
    });
    return json{{"job", jid}, {"dataset", e->id}, {"digest", e->dataset->digest()}};
  }

  json group_info(DatasetEntry& e, GroupId gid) {
    auto groups = groups_of(e);
    json out = group_json(*e.dataset, groups->at(gid), true);
    out["dataset"] = e.id;
    out["digest"] = e.dataset->digest();
    return out;
  }

  json group_stats(DatasetEntry& e, GroupId gid, const FilterState& filters) {
    CrossFilter cf(facets_of(e, gid));
    cf.apply(filters);
    json hists = json::array();
    for (const Dimension& d : stats_dimensions(*e.dataset)) hists.push_back(histogram_to_json(cf.histogram(d.name)));
    const std::vector<UserIndex> passing = cf.passing();
    const MemberSet passing_set = MemberSet::from_unsorted(passing);
    return json{{"dataset", e.id},
                {"digest", e.dataset->digest()},
                {"group", gid},
                {"filters", filters.to_json()},
                {"members", groups_of(e)->at(gid).support()},
                {"passing", passing.size()},
                {"histograms", std::move(hists)},
                {"summary", summary_to_json(summary_stats(*e.dataset, passing_set))}};
  }

  json group_members(DatasetEntry& e, GroupId gid, const FilterState& filters) {
    CrossFilter cf(facets_of(e, gid));
    cf.apply(filters);
    return json{{"dataset", e.id},
                {"digest", e.dataset->digest()},
                {"group", gid},
                {"filters", filters.to_json()},
                {"members", rows_to_json(cf.rows())}};
  }

  json group_projection(DatasetEntry& e, GroupId gid, const httplib::Request& req) {
    std::string label;
    if (req.has_param("label")) {
      label = req.get_param_value("label");
    } else {
      auto d = default_label_dimension(*e.dataset);
      if (!d) throw Error(ErrorCode::kInvalidArgument, "dataset has no categorical attribute to label by");
      label = *d;
    }
    const FilterState filters = parse_filters(req);
    MemberSet members;
    if (filters.empty()) {
      members = groups_of(e)->at(gid).members;
    } else {
      CrossFilter cf(facets_of(e, gid));
      cf.apply(filters);
      members = MemberSet::from_unsorted(cf.passing());
    }
    json out = projection_to_json(lda_project(*e.dataset, members, label));
    out["dataset"] = e.id;
    out["digest"] = e.dataset->digest();
    out["group"] = gid;
    out["filters"] = filters.to_json();
    return out;
  }

  std::string add_session(const std::string& dataset_id, Session s) {
    std::lock_guard lock(sessions_mu);
    std::string sid = fmt::format("s{}", next_session++);
    sessions.emplace(sid, std::make_shared<SessionEntry>(sid, dataset_id, std::move(s)));
    return sid;
  }

  json create_session(const json& body) {
    if (!body.contains("dataset")) throw Error(ErrorCode::kInvalidArgument, "missing field 'dataset'");
    const std::string did = body.at("dataset").get<std::string>();
    auto e = dataset(did);
    const SessionParams params =
        body.contains("params") ? params_from_json(body.at("params"), config.defaults) : config.defaults;
    params.validate();
    const bool deterministic = body.value("deterministic", config.deterministic);
    Session s(corpus_of(*e), params, deterministic);
    const std::string sid = add_session(did, std::move(s));
    return json{{"session", sid},
                {"dataset", did},
                {"digest", e->dataset->digest()},
                {"params", params_to_json(params)},
                {"deterministic", deterministic}};
  }

  json import_session(const json& body) {
    const json& doc = body.contains("export") ? body.at("export") : body;
    std::shared_ptr<DatasetEntry> e;
    if (body.contains("dataset")) {
      e = dataset(body.at("dataset").get<std::string>());
    } else {
      const std::string digest = doc.value("dataset_digest", std::string());
      std::shared_lock lock(datasets_mu);
      for (const auto& [id, entry] : datasets)
        if (entry->dataset->digest() == digest) {
          e = entry;
          break;
        }
      if (!e) throw Error(ErrorCode::kDatasetNotFound, "no dataset with digest " + digest, {{"digest", digest}});
    }
    Session s = Session::import_json(corpus_of(*e), doc);
    const std::string sid = add_session(e->id, std::move(s));
    auto entry = session(sid);
    std::lock_guard lock(entry->mu);
    return session_json(*entry);
  }

  static json envelope(const SessionEntry& s) {
    return json{{"session", s.id}, {"dataset", s.dataset}, {"digest", s.session.corpus().dataset.digest()}};
  }

  static json screen_json(const Session& s) {
    const ExplorationStep* cur = s.current();
    return cur ? step_to_json(s.corpus(), *cur) : json(nullptr);
  }

  static json step_index(const Session& s) {
    if (s.history().empty()) return nullptr;
    return s.history().size() - 1;
  }

  static json session_json(const SessionEntry& e) {
    const Session& s = e.session;
    json out = envelope(e);
    out["params"] = params_to_json(s.params());
    out["deterministic"] = s.deterministic();
    out["steps"] = s.history().size();
    out["step"] = step_index(s);
    out["screen"] = screen_json(s);
    return out;
  }

  json after_move(const SessionEntry& e) {
    json out = envelope(e);
    out["step"] = step_index(e.session);
    out["screen"] = screen_json(e.session);
    out["feedback"] = feedback_to_json(e.session.corpus().dataset, e.session.feedback());
    return out;
  }

  json memo_json(const SessionEntry& e) {
    json out = envelope(e);
    out["memo"] = memo_to_json(e.session.corpus(), e.session.memo());
    return out;
  }

  static MemoEntry memo_entry(const Session& s, const std::optional<std::string>& group,
                              const std::optional<std::string>& user) {
    if (group.has_value() == user.has_value())
      throw Error(ErrorCode::kInvalidArgument, "give exactly one of 'group' or 'user'");
    if (group) return MemoEntry::group(static_cast<GroupId>(parse_u64(*group, "group")));
    auto u = s.corpus().dataset.find_user(*user);
    if (!u) throw Error(ErrorCode::kUnknownUser, "unknown user " + *user, {{"user", *user}});
    return MemoEntry::user(*u);
  }

  // --- routing -------------------------------------------------------------

  using Handler = std::function<std::pair<int, json>(const httplib::Request&)>;

  static httplib::Server::Handler wrap(Handler h) {
    return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
      try {
        auto [status, body] = h(req);
        reply(res, status, body);
      } catch (const Error& e) {
        reply(res, http_status_for(e.code()), api_error_json(e));
      } catch (const json::exception& e) {
        reply(res, 400, api_error_json(Error(ErrorCode::kInvalidArgument, e.what())));
      } catch (const std::exception& e) {
        spdlog::error("{} {}: {}", req.method, req.path, e.what());
        reply(res, 500, api_error_json(Error(ErrorCode::kInternal, e.what())));
      }
    };
  }

  template <typename F>
  static std::pair<int, json> locked(const std::shared_ptr<SessionEntry>& e, F&& f) {
    std::lock_guard lock(e->mu);
    return {200, f(*e)};
  }

  void routes() {
    http.Post("/datasets", wrap([this](const auto& req) { return std::pair{201, create_dataset(req)}; }));
    http.Get(R"(/datasets/([^/]+))",
             wrap([this](const auto& req) { return std::pair{200, dataset_info(*dataset(req.matches[1]))}; }));
    http.Post(R"(/datasets/([^/]+)/mine)", wrap([this](const auto& req) {
                return std::pair{202, start_mine(dataset(req.matches[1]), parse_body(req))};
              }));
    http.Post(R"(/datasets/([^/]+)/index)", wrap([this](const auto& req) {
                return std::pair{202, start_index(dataset(req.matches[1]), parse_body(req))};
              }));
    http.Get(R"(/jobs/([^/]+))", wrap([this](const auto& req) { return std::pair{200, job_json(req.matches[1])}; }));

    http.Get(R"(/datasets/([^/]+)/groups/([^/]+))", wrap([this](const auto& req) {
               auto e = dataset(req.matches[1]);
               return std::pair{200, group_info(*e, static_cast<GroupId>(parse_u64(req.matches[2], "group")))};
             }));
    http.Get(R"(/datasets/([^/]+)/groups/([^/]+)/stats)", wrap([this](const auto& req) {
               auto e = dataset(req.matches[1]);
               const auto gid = static_cast<GroupId>(parse_u64(req.matches[2], "group"));
               return std::pair{200, group_stats(*e, gid, parse_filters(req))};
             }));
    http.Get(R"(/datasets/([^/]+)/groups/([^/]+)/members)", wrap([this](const auto& req) {
               auto e = dataset(req.matches[1]);
               const auto gid = static_cast<GroupId>(parse_u64(req.matches[2], "group"));
               return std::pair{200, group_members(*e, gid, parse_filters(req))};
             }));
    http.Get(R"(/datasets/([^/]+)/groups/([^/]+)/projection)", wrap([this](const auto& req) {
               auto e = dataset(req.matches[1]);
               const auto gid = static_cast<GroupId>(parse_u64(req.matches[2], "group"));
               return std::pair{200, group_projection(*e, gid, req)};
             }));

    http.Post("/sessions", wrap([this](const auto& req) { return std::pair{201, create_session(parse_body(req))}; }));
    http.Post("/sessions/import",
              wrap([this](const auto& req) { return std::pair{201, import_session(parse_body(req))}; }));
    http.Get(R"(/sessions/([^/]+))", wrap([this](const auto& req) {
               return locked(session(req.matches[1]), [](SessionEntry& e) { return session_json(e); });
             }));
    http.Get(R"(/sessions/([^/]+)/export)", wrap([this](const auto& req) {
               return locked(session(req.matches[1]), [](SessionEntry& e) {
                 json out = envelope(e);
                 out["export"] = e.session.export_json();
                 return out;
               });
             }));
    http.Post(R"(/sessions/([^/]+)/root)", wrap([this](const auto& req) {
                return locked(session(req.matches[1]), [this](SessionEntry& e) {
                  e.session.root_selection();
                  return after_move(e);
                });
              }));
    http.Post(R"(/sessions/([^/]+)/select)", wrap([this](const auto& req) {
                const json body = parse_body(req);
                if (!body.contains("gid")) throw Error(ErrorCode::kInvalidArgument, "missing field 'gid'");
                const auto gid = body.at("gid").get<GroupId>();
                return locked(session(req.matches[1]), [this, gid](SessionEntry& e) {
                  if (!e.session.current()) e.session.root_selection();
                  e.session.select(gid);
                  return after_move(e);
                });
              }));
    http.Post(R"(/sessions/([^/]+)/backtrack)", wrap([this](const auto& req) {
                const json body = parse_body(req);
                if (!body.contains("step")) throw Error(ErrorCode::kInvalidArgument, "missing field 'step'");
                const auto step = body.at("step").get<std::size_t>();
                return locked(session(req.matches[1]), [this, step](SessionEntry& e) {
                  e.session.backtrack(step);
                  json out = after_move(e);
                  out["history"] = history_to_json(e.session.corpus(), e.session.history());
                  return out;
                });
              }));
    http.Get(R"(/sessions/([^/]+)/context)", wrap([this](const auto& req) {
               return locked(session(req.matches[1]), [](SessionEntry& e) {
                 json out = envelope(e);
                 out["feedback"] = feedback_to_json(e.session.corpus().dataset, e.session.feedback());
                 return out;
               });
             }));
    http.Delete(R"(/sessions/([^/]+)/context/(.+))", wrap([this](const auto& req) {
                  const std::string name = req.matches[2];
                  return locked(session(req.matches[1]), [&name](SessionEntry& e) {
                    const Dataset& ds = e.session.corpus().dataset;
                    json out = envelope(e);
                    out["entity"] = name;
                    auto entity = parse_entity(ds, name);
                    bool removed = false;
                    if (entity) removed = e.session.unlearn(*entity);
                    out["removed"] = removed;
                    if (!entity) out["warning"] = "unknown entity";
                    else if (!removed) out["warning"] = "entity has no feedback";
                    out["feedback"] = feedback_to_json(ds, e.session.feedback());
                    return out;
                  });
                }));
    http.Get(R"(/sessions/([^/]+)/history)", wrap([this](const auto& req) {
               return locked(session(req.matches[1]), [](SessionEntry& e) {
                 json out = envelope(e);
                 const auto& root = e.session.root();
                 out["root"] = root ? step_to_json(e.session.corpus(), *root) : json(nullptr);
                 out["history"] = history_to_json(e.session.corpus(), e.session.history());
                 return out;
               });
             }));
    http.Get(R"(/sessions/([^/]+)/memo)", wrap([this](const auto& req) {
               return locked(session(req.matches[1]), [this](SessionEntry& e) { return memo_json(e); });
             }));
    http.Post(R"(/sessions/([^/]+)/memo)", wrap([this](const auto& req) {
                const json body = parse_body(req);
                std::optional<std::string> group;
                std::optional<std::string> user;
                if (body.contains("group")) group = std::to_string(body.at("group").get<GroupId>());
                if (body.contains("user")) user = body.at("user").get<std::string>();
                return locked(session(req.matches[1]), [&](SessionEntry& e) {
                  e.session.memo_add(memo_entry(e.session, group, user));
                  return memo_json(e);
                });
              }));
    http.Delete(R"(/sessions/([^/]+)/memo)", wrap([this](const auto& req) {
                  std::optional<std::string> group;
                  std::optional<std::string> user;
                  if (req.has_param("group")) group = req.get_param_value("group");
                  if (req.has_param("user")) user = req.get_param_value("user");
                  return locked(session(req.matches[1]), [&](SessionEntry& e) {
                    const bool removed = e.session.memo_remove(memo_entry(e.session, group, user));
                    json out = memo_json(e);
                    out["removed"] = removed;
                    return out;
                  });
                }));

    http.set_logger([](const httplib::Request& req, const httplib::Response& res) {
      spdlog::debug("{} {} -> {}", req.method, req.path, res.status);
    });
  }

  void bind() {
    if (config.port == 0) {
      bound_port = http.bind_to_any_port(config.host);
    } else {
      bound_port = http.bind_to_port(config.host, config.port) ? config.port : -1;
    }
    if (bound_port < 0)
      throw Error(ErrorCode::kIoError, fmt::format("cannot bind {}:{}", config.host, config.port),
                  {{"host", config.host}, {"port", std::to_string(config.port)}});
    spdlog::info("listening on {}:{}", config.host, bound_port);
  }
};

Server::Server(ServerConfig config) : state_(std::make_unique<State>(std::move(config))) {
  state_->config.defaults.validate();
  state_->routes();
}

Server::~Server() {
  stop();
  if (state_->listener.joinable()) state_->listener.join();
  std::vector<std::jthread> workers;
  {
    std::lock_guard lock(state_->jobs_mu);
    workers.swap(state_->workers);
  }
  workers.clear();  // joins
}

std::string Server::preload(const fs::path& dir, const std::string& id) {
  auto corpus = prepare_corpus(dir);
  auto ds = std::shared_ptr<const Dataset>(corpus, &corpus->dataset);
  auto groups = std::shared_ptr<const GroupSet>(corpus, &corpus->groups);
  state_->register_dataset(id, dir, std::move(ds), std::move(groups), corpus);
  spdlog::info("dataset {} loaded from {}: {} users, {} groups", id, dir.string(), corpus->dataset.user_count(),
               corpus->groups.size());
  return id;
}

int Server::start() {
  state_->bind();
  state_->listener = std::thread([this] { state_->http.listen_after_bind(); });
  state_->http.wait_until_ready();
  return state_->bound_port;
}

void Server::run() {
  state_->bind();
  state_->http.listen_after_bind();
}

void Server::stop() { state_->http.stop(); }

int Server::port() const { return state_->bound_port; }

}  // namespace vexplore
