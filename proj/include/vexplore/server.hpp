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
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "vexplore/error.hpp"
#include "vexplore/session.hpp"

namespace vexplore {

struct ServerConfig {
  std::string host = "127.0.0.1";
  // 0 binds an ephemeral port.
  int port = 8080;
  // Uploaded datasets are stored under this directory.
  std::filesystem::path data_dir = "vexplore-data";
  SessionParams defaults;
  // Sessions ignore the time budget unless a request opts out.
  bool deterministic = false;
};

// ApiError body: {"error": {"code", "message", "detail"}}.
nlohmann::json api_error_json(const Error& error);
int http_status_for(ErrorCode code);

// HTTP front end. Endpoints:
//
//   POST   /datasets                          multipart: actions, demographics, schema
//   GET    /datasets/{d}
//   POST   /datasets/{d}/mine                 {minsup}      -> job
//   POST   /datasets/{d}/index                {fraction}    -> job
//   GET    /jobs/{j}
//   GET    /datasets/{d}/groups/{g}
//   GET    /datasets/{d}/groups/{g}/stats       ?filters=<json>
//   GET    /datasets/{d}/groups/{g}/members     ?filters=<json>
//   GET    /datasets/{d}/groups/{g}/projection  ?label=<attr>
//   POST   /sessions                          {dataset, params, deterministic}
//   POST   /sessions/import                   session export document
//   GET    /sessions/{s}
//   GET    /sessions/{s}/export
//   POST   /sessions/{s}/root
//   POST   /sessions/{s}/select               {gid}
//   POST   /sessions/{s}/backtrack            {step}
//   GET    /sessions/{s}/context
//   DELETE /sessions/{s}/context/{entity}
//   GET    /sessions/{s}/history
//   POST   /sessions/{s}/memo                 {group} | {user}
//   DELETE /sessions/{s}/memo                 ?group=<id> | ?user=<id>
//   GET    /sessions/{s}/memo
//
// Every success body carries the "digest" of the dataset it was computed
// from. Mutations of one session are serialized; sessions run concurrently.
class Server {
 public:
  explicit Server(ServerConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Registers an existing dataset directory under `id`, mining and indexing
  // it first if needed. Returns the id.
  std::string preload(const std::filesystem::path& dir, const std::string& id);

  // Binds and serves on a background thread. Throws kIoError if the port
  // cannot be bound. Returns the bound port.
  int start();
  // Binds and serves on the calling thread until stop().
  void run();
  void stop();
  int port() const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

}  // namespace vexplore
